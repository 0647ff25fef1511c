#![allow(dead_code)]

use std::io::{BufRead, BufReader, Read, Write};
use std::net::{TcpListener, TcpStream};
use std::path::PathBuf;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};
use std::thread;

use serde_json::{json, Value};

pub fn example_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/example")
}

pub fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_tulving")
}

/// One request as the stub saw it.
#[derive(Debug, Clone)]
pub struct Seen {
    pub method: String,
    pub path: String,
    pub headers: Vec<(String, String)>,
    pub body: Value,
}

impl Seen {
    pub fn header(&self, name: &str) -> Option<&str> {
        self.headers
            .iter()
            .find(|(k, _)| k.eq_ignore_ascii_case(name))
            .map(|(_, v)| v.as_str())
    }
}

type Reply = dyn Fn(&Value) -> String + Send + Sync;

/// Minimal OpenAI-compatible chat-completions server on 127.0.0.1.
///
/// The first `fail_first` requests get HTTP 500; the rest are answered by
/// `reply` applied to the request body.
pub struct StubServer {
    pub base_url: String,
    pub seen: Arc<Mutex<Vec<Seen>>>,
    hits: Arc<AtomicUsize>,
}

impl StubServer {
    pub fn start(fail_first: usize, reply: impl Fn(&Value) -> String + Send + Sync + 'static) -> Self {
        let listener = TcpListener::bind("127.0.0.1:0").expect("bind");
        let addr = listener.local_addr().unwrap();
        let seen = Arc::new(Mutex::new(Vec::new()));
        let hits = Arc::new(AtomicUsize::new(0));
        let reply: Arc<Reply> = Arc::new(reply);
        {
            let seen = seen.clone();
            let hits = hits.clone();
            thread::spawn(move || {
                for stream in listener.incoming() {
                    let Ok(stream) = stream else { continue };
                    let (seen, hits, reply) = (seen.clone(), hits.clone(), reply.clone());
                    thread::spawn(move || {
                        let _ = serve(stream, fail_first, &seen, &hits, reply.as_ref());
                    });
                }
            });
        }
        StubServer {
            base_url: format!("http://{addr}/v1"),
            seen,
            hits,
        }
    }

    pub fn hits(&self) -> usize {
        self.hits.load(Ordering::SeqCst)
    }

    pub fn requests(&self) -> Vec<Seen> {
        self.seen.lock().unwrap().clone()
    }
}

fn serve(
    stream: TcpStream,
    fail_first: usize,
    seen: &Mutex<Vec<Seen>>,
    hits: &AtomicUsize,
    reply: &Reply,
) -> std::io::Result<()> {
    let mut reader = BufReader::new(stream.try_clone()?);
    let mut out = stream;
    loop {
        let mut request_line = String::new();
        if reader.read_line(&mut request_line)? == 0 {
            return Ok(());
        }
        let mut parts = request_line.split_whitespace();
        let method = parts.next().unwrap_or_default().to_string();
        let path = parts.next().unwrap_or_default().to_string();
        let mut headers = Vec::new();
        let mut length = 0usize;
        loop {
            let mut line = String::new();
            reader.read_line(&mut line)?;
            let line = line.trim_end();
            if line.is_empty() {
                break;
            }
            if let Some((k, v)) = line.split_once(':') {
                let (k, v) = (k.trim().to_string(), v.trim().to_string());
                if k.eq_ignore_ascii_case("content-length") {
                    length = v.parse().unwrap_or(0);
                }
                headers.push((k, v));
            }
        }
        let mut body = vec![0; length];
        reader.read_exact(&mut body)?;
        let body: Value = serde_json::from_slice(&body).unwrap_or(Value::Null);
        let n = hits.fetch_add(1, Ordering::SeqCst);
        let (status, payload) = if n < fail_first {
            ("500 Internal Server Error", json!({"error": "try again"}))
        } else {
            let text = reply(&body);
            seen.lock().unwrap().push(Seen {
                method,
                path,
                headers,
                body,
            });
            (
                "200 OK",
                json!({
                    "id": format!("stub-{n}"),
                    "object": "chat.completion",
                    "choices": [{"index": 0, "message": {"role": "assistant", "content": text}, "finish_reason": "stop"}],
                }),
            )
        };
        let payload = payload.to_string();
        write!(
            out,
            "HTTP/1.1 {status}\r\nContent-Type: application/json\r\nContent-Length: {}\r\n\r\n{payload}",
            payload.len()
        )?;
        out.flush()?;
    }
}

/// Text of the last user message in a chat-completions request.
pub fn last_user(body: &Value) -> String {
    body["messages"]
        .as_array()
        .and_then(|m| m.iter().rev().find(|m| m["role"] == "user"))
        .and_then(|m| m["content"].as_str())
        .unwrap_or_default()
        .to_string()
}

/// Quoted word in a rendered cue prompt, e.g. `"chair"`.
pub fn quoted_cue(prompt: &str) -> Option<String> {
    let start = prompt.find('"')? + 1;
    let len = prompt[start..].find('"')?;
    Some(prompt[start..start + len].to_string())
}

/// Independent token-membership check: scans every occurrence of `word` in
/// the lowercased text and accepts it when neither neighbour extends it
/// into a longer token. Letters and digits always extend; an apostrophe or
/// hyphen extends only when it sits between two word characters.
pub fn oracle_contains(raw: &str, word: &str) -> bool {
    let text: Vec<char> = raw
        .chars()
        .flat_map(char::to_lowercase)
        .map(|c| if c == '\u{2019}' { '\'' } else { c })
        .collect();
    let w: Vec<char> = word.chars().collect();
    if w.is_empty() || w.len() > text.len() {
        return false;
    }
    let alnum = |i: usize| text.get(i).is_some_and(|c| c.is_alphanumeric());
    let joiner = |i: usize| text.get(i).is_some_and(|c| *c == '\'' || *c == '-');
    (0..=text.len() - w.len()).any(|start| {
        let end = start + w.len();
        if text[start..end] != w[..] {
            return false;
        }
        let left_open = start == 0
            || (!alnum(start - 1) && !(joiner(start - 1) && start >= 2 && alnum(start - 2)));
        let right_open = !alnum(end) && !(joiner(end) && alnum(end + 1));
        left_open && right_open
    })
}

pub const FUZZ_LIST: [&str; 8] = ["table", "cat", "x-ray", "don't", "bread", "moon", "a", "2nd"];

const FUZZ_NOISE: [&str; 20] = [
    "tables", "stable", "cats", "catalog", "Table", "TABLE", "CAT", "x", "ray", "xray", "don", "t",
    "breadth", "moonlight", "honeymoon", "an", "2", "nd", "café", "Über",
];

const FUZZ_SEPARATORS: [&str; 18] = [
    " ", ", ", ".", "!", "?", "\n", "\"", "'", "-", "\u{2019}", "--", "(", ")", "'s ", "_", "/", "\t", "'-",
];

/// Word salad built from study words, near misses and mixed separators.
pub fn fuzz_response<R: rand::Rng>(rng: &mut R) -> String {
    let n = rng.random_range(0..12);
    let mut s = String::new();
    if rng.random_bool(0.3) {
        s.push_str(FUZZ_SEPARATORS[rng.random_range(0..FUZZ_SEPARATORS.len())]);
    }
    for i in 0..n {
        if i > 0 || rng.random_bool(0.2) {
            let k = if rng.random_bool(0.6) { 0 } else { rng.random_range(0..FUZZ_SEPARATORS.len()) };
            s.push_str(FUZZ_SEPARATORS[k]);
        }
        let word = if rng.random_bool(0.4) {
            FUZZ_LIST[rng.random_range(0..FUZZ_LIST.len())].to_string()
        } else {
            FUZZ_NOISE[rng.random_range(0..FUZZ_NOISE.len())].to_string()
        };
        if rng.random_bool(0.15) {
            s.push_str(&word.to_uppercase());
        } else {
            s.push_str(&word);
        }
    }
    if rng.random_bool(0.3) {
        s.push_str(FUZZ_SEPARATORS[rng.random_range(0..FUZZ_SEPARATORS.len())]);
    }
    s
}

/// Compares `score_trial` with the oracle on one response; returns a
/// description of the first disagreement.
pub fn check_scoring(raw: &str, target: Option<&str>) -> Result<(), String> {
    use tulving::protocol::{CueType, Task, Trial};
    use tulving::scoring::{score_trial, AffirmationMarkers};
    let list: Vec<String> = FUZZ_LIST.iter().map(|s| s.to_string()).collect();
    let trial = Trial {
        index: 0,
        cue: "cue".into(),
        cue_type: if target.is_some() { CueType::Associate } else { CueType::Unrelated },
        target: target.map(String::from),
    };
    let got = score_trial(&trial, raw, &list, Task::Identification, &AffirmationMarkers::default());
    let want_target = target.is_some_and(|t| oracle_contains(raw, t));
    let want_list = FUZZ_LIST.iter().any(|w| oracle_contains(raw, w));
    if got.target_present != want_target {
        return Err(format!("target_present {} for {raw:?} / {target:?}", got.target_present));
    }
    if got.list_word_present != want_list {
        return Err(format!("list_word_present {} for {raw:?}", got.list_word_present));
    }
    if got.target_present && !got.list_word_present {
        return Err(format!("target without list word for {raw:?}"));
    }
    Ok(())
}

/// The design invariants of one direct-comparison session.
pub fn check_session(corpus: &tulving::lexicon::CorpusTable, seed: u64) -> Result<(), String> {
    use std::collections::HashSet;
    use tulving::protocol::{assemble_session, CueType, Task, Timing};
    let study: HashSet<String> = corpus.study_list().into_iter().collect();
    for timing in Timing::ALL {
        let fam = assemble_session(corpus, seed, Task::Familiarity, timing, Default::default());
        let id = assemble_session(corpus, seed, Task::Identification, timing, Default::default());
        if fam.trials.len() != 32 {
            return Err(format!("seed {seed}: {} trials", fam.trials.len()));
        }
        for cue_type in CueType::DIRECT {
            let n = fam.trials.iter().filter(|t| t.cue_type == cue_type).count();
            if n != 8 {
                return Err(format!("seed {seed}: {n} {cue_type} cues"));
            }
        }
        let targets: Vec<&String> = fam.trials.iter().filter_map(|t| t.target.as_ref()).collect();
        let distinct: HashSet<&String> = targets.iter().copied().collect();
        if targets.len() != 24 || distinct.len() != 24 {
            return Err(format!("seed {seed}: {} targets, {} distinct", targets.len(), distinct.len()));
        }
        if let Some(t) = targets.iter().find(|t| !study.contains(**t)) {
            return Err(format!("seed {seed}: target {t} not in study list"));
        }
        if fam.trials.iter().enumerate().any(|(i, t)| t.index != i) {
            return Err(format!("seed {seed}: trial indices out of order"));
        }
        if fam.trials != id.trials {
            return Err(format!("seed {seed}: familiarity and identification cues differ"));
        }
    }
    Ok(())
}

pub fn example_corpus() -> tulving::lexicon::CorpusTable {
    let dir = example_dir();
    let open = |name: &str| BufReader::new(std::fs::File::open(dir.join(name)).unwrap());
    tulving::lexicon::CorpusTable::read(open("corpus.csv"), open("distractors.txt")).unwrap()
}

/// A scored session with arbitrary flags and awkward response text.
pub fn random_scored_session<R: rand::Rng>(rng: &mut R, corpus_id: &str) -> tulving::scoring::ScoredSession {
    use tulving::protocol::{CueType, Task, Timing};
    use tulving::scoring::{Affirmation, ScoredSession, ScoredTrial, SessionMeta};
    let seed: u64 = rng.random_range(0..1_000_000);
    let task = [Task::Familiarity, Task::Identification, Task::Ordering][rng.random_range(0..3)];
    let timing = Timing::ALL[rng.random_range(0..2)];
    let meta = SessionMeta {
        session_id: format!("seed{seed}"),
        seed,
        task,
        timing,
        corpus_id: corpus_id.into(),
        subject_id: "fuzz".into(),
    };
    let n = if task == Task::Ordering { 20 } else { rng.random_range(1..40) };
    let pieces = ["yes", "No,", "\"quoted\"", "line\nbreak", "comma, here", "  ", "ünï", "\r\n", "<error>", "table"];
    let trials = (0..n)
        .map(|i| {
            let cue_type = if task == Task::Ordering {
                CueType::Ordinal
            } else {
                CueType::DIRECT[rng.random_range(0..4)]
            };
            let target = (cue_type != CueType::Unrelated).then(|| format!("w{}", rng.random_range(0..48)));
            let k = rng.random_range(0..4);
            let response: String = (0..k).map(|_| pieces[rng.random_range(0..pieces.len())]).collect::<Vec<_>>().join(" ");
            let target_present = target.is_some() && rng.random_bool(0.5);
            ScoredTrial {
                session_id: meta.session_id.clone(),
                trial_index: i,
                cue: format!("c{i}"),
                cue_type,
                task,
                timing,
                target,
                response,
                affirmation: (task == Task::Familiarity).then(|| {
                    [Affirmation::Yes, Affirmation::No, Affirmation::Unparsed][rng.random_range(0..3)]
                }),
                target_present,
                list_word_present: target_present || rng.random_bool(0.3),
            }
        })
        .collect();
    ScoredSession { meta, trials }
}
