mod common;

use std::process::Command;
use std::time::Duration;

use common::{bin, example_dir, last_user, quoted_cue, StubServer};
use serde_json::Value;
use tulving::lexicon::CorpusTable;
use tulving::protocol::{assemble_session, Task, Timing};
use tulving::subject::{run_session, RemoteConfig, RemoteSubject, RunOptions};

fn corpus() -> CorpusTable {
    let dir = example_dir();
    CorpusTable::read(
        std::io::BufReader::new(std::fs::File::open(dir.join("corpus.csv")).unwrap()),
        std::io::BufReader::new(std::fs::File::open(dir.join("distractors.txt")).unwrap()),
    )
    .unwrap()
}

/// Says yes to recognition prompts and echoes the cue otherwise.
fn echo_reply(body: &Value) -> String {
    let prompt = last_user(body);
    if prompt.contains("yes or no") {
        "Yes.".into()
    } else {
        quoted_cue(&prompt).unwrap_or_else(|| "OK".into())
    }
}

fn config(url: &str) -> RemoteConfig {
    let mut c = RemoteConfig::new(url, "stub-model");
    c.retry_backoff = Duration::from_millis(5);
    c.api_key_env = "TULVING_TEST_KEY_UNSET".into();
    c
}

#[test]
fn wire_format_of_delayed_session() {
    let stub = StubServer::start(0, echo_reply);
    let subject = RemoteSubject::new(config(&stub.base_url)).unwrap();
    let plan = assemble_session(&corpus(), 3, Task::Familiarity, Timing::Delayed, Default::default());
    let t = run_session(&plan, &subject, &RunOptions::default()).unwrap();
    assert_eq!(t.preamble_response.as_deref(), Some("OK"));
    assert_eq!(t.subject_id, "remote:stub-model");

    let reqs = stub.requests();
    assert_eq!(reqs.len(), 33);
    for (i, r) in reqs.iter().enumerate() {
        assert_eq!(r.method, "POST");
        assert_eq!(r.path, "/v1/chat/completions");
        assert!(r.header("content-type").unwrap().starts_with("application/json"));
        assert!(r.header("authorization").is_none());
        assert_eq!(r.body["model"], "stub-model");
        assert_eq!(r.body["temperature"], 0.0);
        assert_eq!(r.body["max_tokens"], 64);
        let msgs = r.body["messages"].as_array().unwrap();
        // Preamble, then one question and answer per earlier trial.
        assert_eq!(msgs.len(), 1 + 2 * i);
        for (j, m) in msgs.iter().enumerate() {
            assert_eq!(m["role"], if j % 2 == 0 { "user" } else { "assistant" });
        }
    }
    let preamble = reqs[0].body["messages"][0]["content"].as_str().unwrap();
    for w in plan.study_list.iter() {
        assert!(preamble.contains(w.as_str()));
    }
}

#[test]
fn retries_after_server_errors_without_duplicates() {
    let stub = StubServer::start(2, echo_reply);
    let subject = RemoteSubject::new(config(&stub.base_url)).unwrap();
    let plan = assemble_session(&corpus(), 4, Task::Identification, Timing::Immediate, Default::default());
    let t = run_session(&plan, &subject, &RunOptions::default()).unwrap();
    assert_eq!(stub.hits(), 34);
    assert_eq!(t.entries.len(), 32);
    assert_eq!(t.entries[0].attempts, 3);
    assert!(t.entries[1..].iter().all(|e| e.attempts == 1));
    for (e, trial) in t.entries.iter().zip(&plan.trials) {
        assert_eq!(&e.trial, trial);
        assert_eq!(e.response, trial.cue);
    }
}

#[test]
fn immediate_session_records_all_32_responses() {
    let stub = StubServer::start(0, echo_reply);
    let subject = RemoteSubject::new(config(&stub.base_url)).unwrap();
    let plan = assemble_session(&corpus(), 5, Task::Identification, Timing::Immediate, Default::default());
    let t = run_session(&plan, &subject, &RunOptions::default()).unwrap();
    assert_eq!(t.entries.len(), 32);
    assert!(t.entries.iter().all(|e| e.error.is_none() && !e.response.is_empty()));
    let reqs = stub.requests();
    assert!(reqs.iter().all(|r| r.body["messages"].as_array().unwrap().len() == 1));
}

#[test]
fn bearer_token_comes_from_named_variable() {
    let stub = StubServer::start(0, echo_reply);
    let out = tempfile::tempdir().unwrap();
    let status = Command::new(bin())
        .args(["run", "--subject", "remote", "--model", "m", "--seed", "1"])
        .args(["--task", "identification", "--timing", "immediate"])
        .args(["--endpoint", &stub.base_url, "--api-key-env", "TULVING_STUB_KEY"])
        .arg("--corpus")
        .arg(example_dir())
        .arg("--out")
        .arg(out.path())
        .env("TULVING_STUB_KEY", "sekrit")
        .output()
        .unwrap();
    assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
    let reqs = stub.requests();
    assert_eq!(reqs.len(), 32);
    assert!(reqs.iter().all(|r| r.header("authorization") == Some("Bearer sekrit")));
}

#[test]
fn exhausted_retries_exit_three() {
    let stub = StubServer::start(usize::MAX, echo_reply);
    let out = tempfile::tempdir().unwrap();
    let o = Command::new(bin())
        .args(["run", "--subject", "remote", "--model", "m", "--seed", "1", "--retries", "1"])
        .args(["--task", "familiarity", "--timing", "immediate", "--endpoint", &stub.base_url])
        .arg("--corpus")
        .arg(example_dir())
        .arg("--out")
        .arg(out.path())
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("HTTP 500"));

    // With continue-on-error every trial is recorded as failed and the run
    // completes.
    let o = Command::new(bin())
        .args(["run", "--subject", "remote", "--model", "m", "--seed", "1", "--retries", "0"])
        .args(["--task", "familiarity", "--timing", "immediate", "--continue-on-error"])
        .args(["--endpoint", &stub.base_url])
        .arg("--corpus")
        .arg(example_dir())
        .arg("--out")
        .arg(out.path())
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    let csv = std::fs::read_to_string(out.path().join("seed1_familiarity_immediate.csv")).unwrap();
    assert_eq!(csv.matches("<error>").count(), 32);
}

#[test]
fn gen_associates_writes_tsv() {
    let stub = StubServer::start(0, |body| {
        let word = quoted_cue(&last_user(body)).unwrap_or_default();
        format!("{}ish", word)
    });
    let dir = tempfile::tempdir().unwrap();
    let study = dir.path().join("study.txt");
    std::fs::write(&study, "table\ncat\n").unwrap();
    let out = dir.path().join("assoc.tsv");
    let o = Command::new(bin())
        .args(["gen-associates", "--subject", "remote", "--model", "m", "--endpoint", &stub.base_url])
        .arg("--study")
        .arg(&study)
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let tsv = std::fs::read_to_string(&out).unwrap();
    assert!(tsv.contains("table\ttableish\tllm-associate"), "{tsv}");
    assert!(tsv.contains("cat\tcatish\tllm-associate"), "{tsv}");
}
