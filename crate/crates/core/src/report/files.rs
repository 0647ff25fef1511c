use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::ReportError;
use crate::scoring::{Affirmation, ScoredSession, ScoredTrial, SessionMeta};

pub const SCORED_HEADER: [&str; 11] = [
    "session_id",
    "trial_index",
    "cue",
    "cue_type",
    "task",
    "timing",
    "target",
    "response",
    "affirmation",
    "target_present",
    "list_word_present",
];

/// `{session_id}_{task}_{timing}.csv`
pub fn session_file_name(meta: &SessionMeta) -> String {
    format!("{}_{}_{}.csv", meta.session_id, meta.task, meta.timing)
}

/// Session facts that do not fit the per-trial CSV, stored next to it as
/// `<csv stem>.meta.json`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionSidecar {
    #[serde(flatten)]
    pub meta: SessionMeta,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preamble_response: Option<String>,
}

fn sidecar_path(csv: &Path) -> PathBuf {
    csv.with_extension("meta.json")
}

/// Writes the scored trials as CSV with LF line endings.
pub fn write_session_csv<W: Write>(session: &ScoredSession, out: W) -> Result<(), ReportError> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    let to_err = |e: csv::Error| ReportError::Invalid(e.to_string());
    w.write_record(SCORED_HEADER).map_err(to_err)?;
    for t in &session.trials {
        let index = t.trial_index.to_string();
        w.write_record([
            t.session_id.as_str(),
            index.as_str(),
            t.cue.as_str(),
            t.cue_type.as_str(),
            t.task.as_str(),
            t.timing.as_str(),
            t.target.as_deref().unwrap_or(""),
            t.response.as_str(),
            t.affirmation.map_or("", Affirmation::as_str),
            if t.target_present { "true" } else { "false" },
            if t.list_word_present { "true" } else { "false" },
        ])
        .map_err(to_err)?;
    }
    w.flush().map_err(|e| ReportError::Invalid(e.to_string()))?;
    Ok(())
}

fn parse_field<T: std::str::FromStr>(line: u64, name: &str, v: &str) -> Result<T, ReportError>
where
    T::Err: std::fmt::Display,
{
    v.parse().map_err(|e| ReportError::Row {
        line,
        message: format!("{name}: {e}"),
    })
}

fn parse_bool(line: u64, name: &str, v: &str) -> Result<bool, ReportError> {
    match v {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(ReportError::Row {
            line,
            message: format!("{name}: expected true or false, got `{v}`"),
        }),
    }
}

/// Reads trials written by [`write_session_csv`]. The header must match
/// [`SCORED_HEADER`] exactly.
pub fn read_session_csv<R: Read>(input: R) -> Result<Vec<ScoredTrial>, ReportError> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(input);
    let mut records = r.records();
    let header = match records.next() {
        None => return Err(ReportError::Schema("empty file; expected a header".into())),
        Some(h) => h.map_err(|e| ReportError::Schema(e.to_string()))?,
    };
    for (i, want) in SCORED_HEADER.iter().enumerate() {
        match header.get(i) {
            Some(got) if got == *want => {}
            Some(got) => {
                return Err(ReportError::Schema(format!(
                    "unexpected column `{got}` at position {}, expected `{want}`",
                    i + 1
                )))
            }
            None => return Err(ReportError::Schema(format!("missing column `{want}`"))),
        }
    }
    if let Some(extra) = header.get(SCORED_HEADER.len()) {
        return Err(ReportError::Schema(format!("unexpected column `{extra}`")));
    }
    let mut out = Vec::new();
    for rec in records {
        let rec = rec.map_err(|e| ReportError::Row {
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != SCORED_HEADER.len() {
            return Err(ReportError::Row {
                line,
                message: format!("expected {} fields, found {}", SCORED_HEADER.len(), rec.len()),
            });
        }
        let f = |i: usize| &rec[i];
        out.push(ScoredTrial {
            session_id: f(0).to_string(),
            trial_index: parse_field(line, "trial_index", f(1))?,
            cue: f(2).to_string(),
            cue_type: parse_field(line, "cue_type", f(3))?,
            task: parse_field(line, "task", f(4))?,
            timing: parse_field(line, "timing", f(5))?,
            target: (!f(6).is_empty()).then(|| f(6).to_string()),
            response: f(7).to_string(),
            affirmation: if f(8).is_empty() {
                None
            } else {
                Some(parse_field(line, "affirmation", f(8))?)
            },
            target_present: parse_bool(line, "target_present", f(9))?,
            list_word_present: parse_bool(line, "list_word_present", f(10))?,
        });
    }
    Ok(out)
}

/// Writes the CSV and its sidecar into `dir`, creating it if needed.
/// Returns the CSV path.
pub fn write_session_files(
    dir: &Path,
    session: &ScoredSession,
    preamble_response: Option<&str>,
) -> Result<PathBuf, ReportError> {
    fs::create_dir_all(dir).map_err(|e| ReportError::io(dir, e))?;
    let path = dir.join(session_file_name(&session.meta));
    let mut buf = Vec::new();
    write_session_csv(session, &mut buf)?;
    fs::write(&path, buf).map_err(|e| ReportError::io(&path, e))?;
    let sidecar = SessionSidecar {
        meta: session.meta.clone(),
        preamble_response: preamble_response.map(String::from),
    };
    let side = sidecar_path(&path);
    let mut json = serde_json::to_string_pretty(&sidecar).expect("sidecar serializes");
    json.push('\n');
    fs::write(&side, json).map_err(|e| ReportError::io(&side, e))?;
    Ok(path)
}

/// Reads one session CSV and, when present, its sidecar. Without a sidecar
/// the corpus and subject are recorded as `unknown`.
pub fn read_session_file(path: &Path) -> Result<(ScoredSession, Option<String>), ReportError> {
    let file = fs::File::open(path).map_err(|e| ReportError::io(path, e))?;
    let trials = read_session_csv(std::io::BufReader::new(file)).map_err(|e| e.in_file(path))?;
    let side = sidecar_path(path);
    let (meta, preamble) = if side.exists() {
        let text = fs::read_to_string(&side).map_err(|e| ReportError::io(&side, e))?;
        let s: SessionSidecar = serde_json::from_str(&text)
            .map_err(|e| ReportError::Invalid(e.to_string()).in_file(&side))?;
        (s.meta, s.preamble_response)
    } else {
        let first = trials.first().ok_or_else(|| {
            ReportError::Invalid("no trials and no sidecar; cannot identify session".into()).in_file(path)
        })?;
        let seed = first
            .session_id
            .strip_prefix("seed")
            .and_then(|s| s.parse().ok())
            .unwrap_or(0);
        let meta = SessionMeta {
            session_id: first.session_id.clone(),
            seed,
            task: first.task,
            timing: first.timing,
            corpus_id: "unknown".into(),
            subject_id: "unknown".into(),
        };
        (meta, None)
    };
    if let Some(t) = trials
        .iter()
        .find(|t| t.task != meta.task || t.timing != meta.timing || t.session_id != meta.session_id)
    {
        return Err(ReportError::Invalid(format!(
            "trial {} belongs to {}/{}/{}, not to the file's session",
            t.trial_index, t.session_id, t.task, t.timing
        ))
        .in_file(path));
    }
    Ok((ScoredSession { meta, trials }, preamble))
}

/// Every `*.csv` session file in `dir`, in file-name order.
pub fn read_results_dir(dir: &Path) -> Result<Vec<ScoredSession>, ReportError> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| ReportError::io(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "csv"))
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(ReportError::Invalid(format!("no session CSV files in {}", dir.display())));
    }
    paths.iter().map(|p| read_session_file(p).map(|(s, _)| s)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::{CueType, Task, Timing};

    fn session() -> ScoredSession {
        let meta = SessionMeta {
            session_id: "seed7".into(),
            seed: 7,
            task: Task::Familiarity,
            timing: Timing::Delayed,
            corpus_id: "abc".into(),
            subject_id: "perfect-mock".into(),
        };
        let trials = vec![
            ScoredTrial {
                session_id: "seed7".into(),
                trial_index: 0,
                cue: "chair".into(),
                cue_type: CueType::Copy,
                task: Task::Familiarity,
                timing: Timing::Delayed,
                target: Some("chair".into()),
                response: "Yes, \"chair\" was\nthere, I think".into(),
                affirmation: Some(Affirmation::Yes),
                target_present: true,
                list_word_present: true,
            },
            ScoredTrial {
                session_id: "seed7".into(),
                trial_index: 1,
                cue: "violin".into(),
                cue_type: CueType::Unrelated,
                task: Task::Familiarity,
                timing: Timing::Delayed,
                target: None,
                response: String::new(),
                affirmation: Some(Affirmation::Unparsed),
                target_present: false,
                list_word_present: false,
            },
        ];
        ScoredSession { meta, trials }
    }

    #[test]
    fn round_trip_and_layout() {
        let s = session();
        let mut buf = Vec::new();
        write_session_csv(&s, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with(&format!("{}\n", SCORED_HEADER.join(","))));
        assert!(text.ends_with('\n'));
        assert!(!text.contains('\r'));
        assert_eq!(read_session_csv(&buf[..]).unwrap(), s.trials);
    }

    #[test]
    fn schema_errors() {
        assert!(matches!(read_session_csv(&b""[..]), Err(ReportError::Schema(_))));
        let shuffled = "trial_index,session_id,cue,cue_type,task,timing,target,response,affirmation,target_present,list_word_present\n";
        match read_session_csv(shuffled.as_bytes()) {
            Err(ReportError::Schema(m)) => assert!(m.contains("trial_index")),
            other => panic!("{other:?}"),
        }
        let bad_row = format!("{}\nseed1,x,c,copy,familiarity,immediate,,r,,true,true\n", SCORED_HEADER.join(","));
        match read_session_csv(bad_row.as_bytes()) {
            Err(ReportError::Row { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn files_with_sidecar() {
        let dir = tempfile::tempdir().unwrap();
        let s = session();
        let path = write_session_files(dir.path(), &s, Some("OK")).unwrap();
        assert_eq!(path.file_name().unwrap(), "seed7_familiarity_delayed.csv");
        let (back, pre) = read_session_file(&path).unwrap();
        assert_eq!(back, s);
        assert_eq!(pre.as_deref(), Some("OK"));
        assert_eq!(read_results_dir(dir.path()).unwrap(), vec![s]);
    }
}
