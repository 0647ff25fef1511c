//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage, 2 data or coverage problem, 3 subject
//! transport failure.

use std::collections::BTreeMap;
use std::fs;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::kv;
use crate::lexicon::{
    build_corpus, coverage, parse_pronouncing_dict, read_word_list, AssociationLexicon,
    CorpusTable, DictIndex, LexiconError, ParseMode, Relation, STUDY_LIST_LEN,
};
use crate::pipeline::score_transcript;
use crate::protocol::{
    assemble_ordinal_session, assemble_session, render_conversation, render_study_preamble,
    SessionPlan, Task, Templates, Timing, ORDINAL_TRIALS,
};
use crate::report::{
    compare, fit_checks, human_benchmark, read_results_dir, render_comparison, render_table,
    render_unparsed, spearman, write_session_files, TableStyle,
};
use crate::scoring::{tabulate, AffirmationMarkers};
use crate::sem::{fit_to_benchmark, GridSpec, SemParams, Simulator};
use crate::subject::{
    run_sessions, write_transcript_jsonl, Conversation, RemoteConfig, RunOptions, SubjectConfig,
    SubjectError, TrialContext,
};

pub const DEFAULT_GRID: &str = include_str!("../data/sem-grid.txt");
pub const DEFAULT_FIT_SESSIONS: usize = 288;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(String),
    Transport(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Transport(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Data(m) => write!(f, "error: {m}"),
            CliError::Transport(m) => write!(f, "subject error: {m}"),
        }
    }
}

fn data<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Data(e.to_string())
}

#[derive(Parser, Debug)]
#[command(name = "tulving", version, about = "Recognition and recall tests for chat models, with an ecphory-model simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build the cue corpus from word lists, associations and a pronouncing dictionary.
    BuildCorpus(BuildCorpusArgs),
    /// Run test sessions against a subject and write scored CSV files.
    Run(RunArgs),
    /// Tabulate a directory of scored session files.
    Report(ReportArgs),
    /// Simulate or fit the ecphory model.
    #[command(subcommand)]
    Sem(SemCommand),
    /// Ask a model for one associate per study word and write an association TSV.
    GenAssociates(GenAssociatesArgs),
}

#[derive(Args, Debug)]
struct BuildCorpusArgs {
    /// Study words, one per line (48 required).
    #[arg(long)]
    study: PathBuf,
    /// Pronouncing dictionary in CMU format.
    #[arg(long)]
    dict: PathBuf,
    /// Association lexicon: head<TAB>associate<TAB>relation.
    #[arg(long)]
    assoc: PathBuf,
    /// Distractor pool, one word per line.
    #[arg(long)]
    pool: PathBuf,
    #[arg(long)]
    seed: u64,
    /// Output directory for corpus.csv and distractors.txt.
    #[arg(long)]
    out: PathBuf,
    /// Reject malformed dictionary lines instead of skipping them.
    #[arg(long)]
    strict: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SubjectKind {
    Remote,
    PerfectMock,
    ScriptedMock,
    Sem,
}

impl FromStr for SubjectKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        <SubjectKind as ValueEnum>::from_str(s, false)
    }
}

#[derive(Args, Debug, Default)]
struct SubjectArgs {
    /// remote, perfect-mock, scripted-mock or sem.
    #[arg(long)]
    subject: Option<SubjectKind>,
    /// Base URL of an OpenAI-compatible API, e.g. http://localhost:8080/v1.
    #[arg(long)]
    endpoint: Option<String>,
    #[arg(long)]
    model: Option<String>,
    #[arg(long)]
    temperature: Option<f64>,
    #[arg(long)]
    max_tokens: Option<u32>,
    #[arg(long)]
    timeout_secs: Option<u64>,
    #[arg(long)]
    retries: Option<u32>,
    /// Name of the environment variable holding the API key.
    #[arg(long)]
    api_key_env: Option<String>,
    /// Pause before each request, in milliseconds.
    #[arg(long)]
    request_delay_ms: Option<u64>,
    /// Response script for the scripted mock (cue<TAB>response lines).
    #[arg(long)]
    script: Option<PathBuf>,
    /// Parameter file for the sem subject.
    #[arg(long)]
    sem_params: Option<PathBuf>,
    /// Seed of the sem subject (defaults to --seed).
    #[arg(long)]
    subject_seed: Option<u64>,
    /// key = value file; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct RunArgs {
    #[command(flatten)]
    subject: SubjectArgs,
    /// Directory holding corpus.csv and distractors.txt.
    #[arg(long)]
    corpus: Option<PathBuf>,
    /// Prompt template file.
    #[arg(long)]
    templates: Option<PathBuf>,
    #[arg(long)]
    sessions: Option<usize>,
    /// Base seed; session i uses seed + i. Required.
    #[arg(long)]
    seed: Option<u64>,
    /// familiarity, identification or both.
    #[arg(long)]
    task: Option<String>,
    /// immediate, delayed or both.
    #[arg(long)]
    timing: Option<String>,
    /// Run the ordinal-position variant instead of the direct comparison.
    #[arg(long)]
    ordinal: bool,
    /// Print the prompts that would be sent and exit.
    #[arg(long)]
    dry_run: bool,
    /// Record failed trials and keep going.
    #[arg(long)]
    continue_on_error: bool,
    #[arg(long)]
    parallel_sessions: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ReportArgs {
    /// Directory of scored session CSV files.
    dir: PathBuf,
    /// paper, csv or tsv.
    #[arg(long, default_value = "paper")]
    style: TableStyle,
    /// Also compare against the human benchmark.
    #[arg(long)]
    compare_human: bool,
}

#[derive(Subcommand, Debug)]
enum SemCommand {
    /// Print the matrix simulated for a parameter set.
    Simulate {
        #[arg(long)]
        params: Option<PathBuf>,
        #[arg(long, default_value_t = 72)]
        sessions: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value = "paper")]
        style: TableStyle,
    },
    /// Grid-search parameters against the human benchmark or a results directory.
    Fit {
        /// Grid file of `name = min,max,steps` lines; the built-in grid if omitted.
        #[arg(long)]
        grid: Option<PathBuf>,
        /// Directory of scored session files to fit instead of the benchmark.
        #[arg(long)]
        target: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_FIT_SESSIONS)]
        sessions: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Write the fitted parameters to this file.
        #[arg(long)]
        params_out: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct GenAssociatesArgs {
    #[command(flatten)]
    subject: SubjectArgs,
    #[arg(long)]
    study: PathBuf,
    #[arg(long)]
    templates: Option<PathBuf>,
    /// Output TSV.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

/// Parses arguments and runs the command, writing normal output to `out`.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> Result<(), CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) if matches!(e.kind(), clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion) => {
            let _ = write!(out, "{e}");
            return Ok(());
        }
        Err(e) => return Err(CliError::Usage(e.to_string())),
    };
    match cli.command {
        Command::BuildCorpus(a) => cmd_build_corpus(a, out),
        Command::Run(a) => cmd_run(a, out),
        Command::Report(a) => cmd_report(a, out),
        Command::Sem(c) => cmd_sem(c, out),
        Command::GenAssociates(a) => cmd_gen_associates(a, out),
    }
}

/// Entry point for the binary; returns the process exit code.
pub fn main_with_args(args: Vec<String>) -> i32 {
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    match run(args, &mut lock) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}

fn w(out: &mut dyn Write, s: impl AsRef<str>) -> Result<(), CliError> {
    out.write_all(s.as_ref().as_bytes()).map_err(data)
}

fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

fn open(path: &Path) -> Result<BufReader<fs::File>, CliError> {
    fs::File::open(path)
        .map(BufReader::new)
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

fn cmd_build_corpus(a: BuildCorpusArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let study = read_word_list(open(&a.study)?).map_err(data)?;
    if study.len() != STUDY_LIST_LEN {
        return Err(CliError::Usage(format!(
            "{} has {} words; the study list needs exactly {STUDY_LIST_LEN}",
            a.study.display(),
            study.len()
        )));
    }
    let mode = if a.strict { ParseMode::Strict } else { ParseMode::Lenient };
    let parsed = parse_pronouncing_dict(open(&a.dict)?, mode).map_err(data)?;
    let dict = DictIndex::new(parsed.entries);
    let assoc = AssociationLexicon::from_tsv(open(&a.assoc)?).map_err(data)?;
    let pool = read_word_list(open(&a.pool)?).map_err(data)?;

    w(out, "word            associates  rhymes\n")?;
    for c in coverage(&study, &assoc, &dict, &pool) {
        w(out, format!("{:<16}{:>10}  {:>6}\n", c.word, c.associates, c.rhymes))?;
    }
    let corpus = build_corpus(&study, &assoc, &dict, &pool, a.seed).map_err(|e| match e {
        LexiconError::Coverage(words) => {
            CliError::Data(format!("insufficient coverage: {}", words.join("; ")))
        }
        e => data(e),
    })?;
    corpus.validate(Some(&dict)).map_err(data)?;
    fs::create_dir_all(&a.out).map_err(data)?;
    let mut csv = Vec::new();
    corpus.write_csv(&mut csv).map_err(data)?;
    fs::write(a.out.join("corpus.csv"), csv).map_err(data)?;
    let mut d = Vec::new();
    corpus.write_distractors(&mut d).map_err(data)?;
    fs::write(a.out.join("distractors.txt"), d).map_err(data)?;
    if !parsed.skipped.is_empty() {
        w(out, format!("skipped {} malformed dictionary lines\n", parsed.skipped.len()))?;
    }
    w(
        out,
        format!(
            "wrote {} rows and {} distractors to {} (corpus {})\n",
            corpus.rows.len(),
            corpus.distractors.len(),
            a.out.display(),
            corpus.fingerprint()
        ),
    )
}

/// `key = value` settings from a config file.
struct Config {
    values: BTreeMap<String, kv::KvLine>,
}

const RUN_KEYS: &[&str] = &[
    "subject", "endpoint", "model", "temperature", "max-tokens", "timeout-secs", "retries",
    "api-key-env", "request-delay-ms", "script", "sem-params", "subject-seed", "corpus",
    "templates", "sessions", "seed", "task", "timing", "ordinal", "continue-on-error",
    "parallel-sessions", "out",
];

impl Config {
    fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let mut values = BTreeMap::new();
        if let Some(p) = path {
            let text = read_text(p)?;
            for line in kv::parse(&text).map_err(|e| CliError::Data(format!("{}: {e}", p.display())))? {
                if !RUN_KEYS.contains(&line.key.as_str()) {
                    return Err(CliError::Data(format!(
                        "{}: line {}: unknown setting `{}`",
                        p.display(),
                        line.line,
                        line.key
                    )));
                }
                values.insert(line.key.clone(), line);
            }
        }
        Ok(Config { values })
    }

    /// The flag if given, else the config value.
    fn pick<T: FromStr>(&self, flag: Option<T>, key: &str) -> Result<Option<T>, CliError>
    where
        T::Err: std::fmt::Display,
    {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.values.get(key) {
            None => Ok(None),
            Some(line) => kv::parse_value(line).map(Some).map_err(data),
        }
    }

    fn flag(&self, flag: bool, key: &str) -> Result<bool, CliError> {
        Ok(flag || self.pick::<bool>(None, key)?.unwrap_or(false))
    }
}

fn subject_config(a: &SubjectArgs, cfg: &Config, seed: u64) -> Result<SubjectConfig, CliError> {
    let kind = cfg
        .pick(a.subject, "subject")?
        .ok_or_else(|| CliError::Usage("--subject is required".into()))?;
    Ok(match kind {
        SubjectKind::PerfectMock => SubjectConfig::PerfectMock,
        SubjectKind::ScriptedMock => {
            let path: PathBuf = cfg
                .pick(a.script.clone(), "script")?
                .ok_or_else(|| CliError::Usage("scripted-mock needs --script".into()))?;
            SubjectConfig::ScriptedMock {
                script: read_text(&path)?,
            }
        }
        SubjectKind::Sem => {
            let params = match cfg.pick(a.sem_params.clone(), "sem-params")? {
                Some(p) => SemParams::parse(&read_text(&p)?)
                    .map_err(|e| CliError::Data(format!("{}: {e}", p.display())))?,
                None => SemParams::default(),
            };
            SubjectConfig::Sem {
                params,
                seed: cfg.pick(a.subject_seed, "subject-seed")?.unwrap_or(seed),
            }
        }
        SubjectKind::Remote => {
            let endpoint = cfg
                .pick(a.endpoint.clone(), "endpoint")?
                .ok_or_else(|| CliError::Usage("remote subject needs --endpoint".into()))?;
            let model = cfg
                .pick(a.model.clone(), "model")?
                .ok_or_else(|| CliError::Usage("remote subject needs --model".into()))?;
            let mut rc = RemoteConfig::new(endpoint, model);
            if let Some(t) = cfg.pick(a.temperature, "temperature")? {
                rc.temperature = t;
            }
            if let Some(m) = cfg.pick(a.max_tokens, "max-tokens")? {
                rc.max_tokens = m;
            }
            if let Some(s) = cfg.pick(a.timeout_secs, "timeout-secs")? {
                rc.timeout = Duration::from_secs(s);
            }
            if let Some(r) = cfg.pick(a.retries, "retries")? {
                rc.retries = r;
            }
            if let Some(k) = cfg.pick(a.api_key_env.clone(), "api-key-env")? {
                rc.api_key_env = k;
            }
            SubjectConfig::Remote(rc)
        }
    })
}

fn load_corpus(dir: &Path) -> Result<CorpusTable, CliError> {
    let corpus = CorpusTable::read(open(&dir.join("corpus.csv"))?, open(&dir.join("distractors.txt"))?)
        .map_err(data)?;
    corpus.validate(None).map_err(data)?;
    Ok(corpus)
}

fn load_templates(path: Option<PathBuf>) -> Result<Templates, CliError> {
    match path {
        None => Ok(Templates::default()),
        Some(p) => Templates::parse(&read_text(&p)?).map_err(|e| CliError::Data(format!("{}: {e}", p.display()))),
    }
}

fn parse_which<T: FromStr<Err = String> + Copy>(v: Option<String>, all: &[T]) -> Result<Vec<T>, CliError> {
    match v.as_deref() {
        None | Some("both") => Ok(all.to_vec()),
        Some(s) => T::from_str(s).map(|t| vec![t]).map_err(CliError::Usage),
    }
}

fn cmd_run(a: RunArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let cfg = Config::load(a.subject.config.as_deref())?;
    let seed: u64 = cfg
        .pick(a.seed, "seed")?
        .ok_or_else(|| CliError::Usage("--seed is required".into()))?;
    let sessions: usize = cfg.pick(a.sessions, "sessions")?.unwrap_or(1);
    if sessions == 0 {
        return Err(CliError::Usage("--sessions must be at least 1".into()));
    }
    let ordinal = cfg.flag(a.ordinal, "ordinal")?;
    let continue_on_error = cfg.flag(a.continue_on_error, "continue-on-error")?;
    let parallel: usize = cfg.pick(a.parallel_sessions, "parallel-sessions")?.unwrap_or(1);
    let corpus_dir: PathBuf = cfg
        .pick(a.corpus, "corpus")?
        .ok_or_else(|| CliError::Usage("--corpus is required".into()))?;
    let out_dir: PathBuf = cfg.pick(a.out, "out")?.unwrap_or_else(|| PathBuf::from("results"));
    let templates = load_templates(cfg.pick(a.templates, "templates")?)?;
    let timings: Vec<Timing> = parse_which(cfg.pick(a.timing, "timing")?, &Timing::ALL)?;
    let tasks: Vec<Task> = if ordinal {
        vec![Task::Ordering]
    } else {
        parse_which(cfg.pick(a.task, "task")?, &Task::DIRECT)?
    };
    if tasks.contains(&Task::Ordering) && !ordinal {
        return Err(CliError::Usage("use --ordinal for the ordering task".into()));
    }

    let corpus = load_corpus(&corpus_dir)?;
    let corpus_id = corpus.fingerprint();
    let study_list = corpus.study_list();
    let mut plans: Vec<SessionPlan> = Vec::new();
    for i in 0..sessions as u64 {
        let s = seed.wrapping_add(i);
        for &task in &tasks {
            for &timing in &timings {
                let plan = if ordinal {
                    let mut p = assemble_ordinal_session(&study_list, ORDINAL_TRIALS, timing).map_err(data)?;
                    p.seed = s;
                    p
                } else {
                    assemble_session(&corpus, s, task, timing, Default::default())
                };
                plans.push(plan.with_session_id(format!("seed{s}")));
            }
        }
    }

    if a.dry_run {
        for plan in &plans {
            w(out, format!("## {} {} {}\n", plan.session_id, plan.task, plan.timing))?;
            if plan.timing == Timing::Delayed {
                let m = render_study_preamble(plan, &templates).map_err(data)?;
                w(out, format!("[preamble] {}\n", m.content))?;
            }
            for t in &plan.trials {
                for m in render_conversation(plan, t, &templates) {
                    w(out, format!("[{} {}] {}\n", t.index, t.cue_type, m.content))?;
                }
            }
        }
        return Ok(());
    }

    let sc = subject_config(&a.subject, &cfg, seed)?;
    if ordinal && matches!(sc, SubjectConfig::Sem { .. }) {
        return Err(CliError::Usage("the sem subject does not model ordinal cues".into()));
    }
    let subject = sc.build().map_err(|e| CliError::Usage(e.to_string()))?;
    let opts = RunOptions {
        templates,
        continue_on_error,
        request_delay: Duration::from_millis(cfg.pick(a.subject.request_delay_ms, "request-delay-ms")?.unwrap_or(0)),
    };
    let results = run_sessions(&plans, subject.as_ref(), &opts, parallel);
    let transcripts_dir = out_dir.join("transcripts");
    fs::create_dir_all(&transcripts_dir).map_err(data)?;
    let markers = AffirmationMarkers::default();
    let mut failures = Vec::new();
    for (plan, result) in plans.iter().zip(results) {
        let t = match result {
            Ok(t) => t,
            Err(e) => {
                eprintln!("{} {} {}: failed: {e}", plan.session_id, plan.task, plan.timing);
                failures.push(e.to_string());
                continue;
            }
        };
        let scored = score_transcript(&t, &study_list, &corpus_id, &markers);
        let path = write_session_files(&out_dir, &scored, t.preamble_response.as_deref()).map_err(data)?;
        let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("session").to_string();
        let mut jsonl = Vec::new();
        write_transcript_jsonl(&t, &mut jsonl).map_err(data)?;
        fs::write(transcripts_dir.join(format!("{stem}.jsonl")), jsonl).map_err(data)?;
        let errors = t.errors();
        eprintln!(
            "{} {} {}: {} trials{}",
            plan.session_id,
            plan.task,
            plan.timing,
            t.entries.len(),
            if errors > 0 { format!(", {errors} errors") } else { String::new() }
        );
    }
    w(out, format!("wrote {} session files to {}\n", plans.len() - failures.len(), out_dir.display()))?;
    if !failures.is_empty() {
        return Err(CliError::Transport(format!("{} session(s) failed: {}", failures.len(), failures.join("; "))));
    }
    Ok(())
}

fn cmd_report(a: ReportArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let sessions = read_results_dir(&a.dir).map_err(data)?;
    let m = tabulate(&sessions).map_err(data)?;
    w(out, render_table(&m, a.style).map_err(data)?)?;
    if m.cells.keys().any(|k| k.task == Task::Familiarity) {
        w(out, "\n")?;
        w(out, render_unparsed(&m))?;
    }
    if a.compare_human {
        let c = compare(&m, &human_benchmark()).map_err(data)?;
        w(out, "\n")?;
        w(out, render_comparison(&c, a.style))?;
    }
    Ok(())
}

fn cmd_sem(c: SemCommand, out: &mut dyn Write) -> Result<(), CliError> {
    match c {
        SemCommand::Simulate { params, sessions, seed, style } => {
            let p = match params {
                Some(path) => SemParams::parse(&read_text(&path)?)
                    .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?,
                None => SemParams::default(),
            };
            let m = crate::sem::simulate_matrix(&p, sessions, seed).map_err(data)?;
            w(out, render_table(&m, style).map_err(data)?)
        }
        SemCommand::Fit { grid, target, sessions, seed, params_out } => {
            let grid = match grid {
                Some(path) => GridSpec::parse(&read_text(&path)?)
                    .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?,
                None => GridSpec::parse(DEFAULT_GRID).map_err(data)?,
            };
            let target = match target {
                Some(dir) => tabulate(&read_results_dir(&dir).map_err(data)?).map_err(data)?,
                None => human_benchmark(),
            };
            let start = std::time::Instant::now();
            let fit = fit_to_benchmark(&target, &grid, sessions, seed).map_err(data)?;
            let fitted = Simulator::new(sessions, seed)
                .and_then(|s| s.matrix(&fit.params))
                .map_err(data)?;
            w(out, fit.params.to_kv())?;
            w(
                out,
                format!(
                    "loss = {:.6}\ncandidates = {} ({} skipped)\nsessions = {sessions}\nseed = {seed}\nelapsed = {:.1}s\n\n",
                    fit.loss,
                    fit.evaluated,
                    fit.skipped,
                    start.elapsed().as_secs_f64()
                ),
            )?;
            w(out, render_table(&fitted, TableStyle::Paper).map_err(data)?)?;
            let rho = spearman(
                &fitted.direct_values().map_err(data)?,
                &target.direct_values().map_err(data)?,
            );
            w(out, format!("Spearman rank correlation with target: {rho:.3}\n"))?;
            for ch in fit_checks(&fitted).map_err(data)? {
                w(out, format!("[{}] {}\n", if ch.pass { "PASS" } else { "FAIL" }, ch.name))?;
            }
            if let Some(p) = params_out {
                fs::write(&p, fit.params.to_kv()).map_err(data)?;
            }
            Ok(())
        }
    }
}

/// First word of a reply that is not the head word itself.
fn first_associate(reply: &str, head: &str) -> Option<String> {
    crate::scoring::normalize_text(reply)
        .into_iter()
        .find(|t| t != head && t.chars().all(|c| c.is_ascii_alphabetic()))
}

fn cmd_gen_associates(a: GenAssociatesArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let cfg = Config::load(a.subject.config.as_deref())?;
    let study = read_word_list(open(&a.study)?).map_err(data)?;
    let templates = load_templates(a.templates)?;
    let sc = subject_config(&a.subject, &cfg, a.seed)?;
    if !matches!(sc, SubjectConfig::Remote(_)) {
        return Err(CliError::Usage("gen-associates needs --subject remote".into()));
    }
    let subject = sc.build().map_err(|e| CliError::Usage(e.to_string()))?;
    let plan = SessionPlan {
        session_id: "associates".into(),
        seed: a.seed,
        study_list: Vec::new(),
        trials: Vec::new(),
        task: Task::Identification,
        timing: Timing::Immediate,
    };
    let mut lex = AssociationLexicon::default();
    let mut missing = Vec::new();
    for word in &study {
        let conv = Conversation::from_messages(vec![crate::protocol::Message::user(templates.associate_prompt(word))])
            .map_err(data)?;
        let reply = subject
            .complete(&conv, TrialContext { plan: &plan, trial: None })
            .map_err(|e| match e {
                SubjectError::Transport { .. } | SubjectError::Protocol { .. } | SubjectError::Malformed(_) => {
                    CliError::Transport(e.to_string())
                }
                e => data(e),
            })?;
        match first_associate(&reply.text, word) {
            Some(assoc) => lex.insert(word, &assoc, Relation::LlmAssociate).map_err(CliError::Data)?,
            None => missing.push(word.clone()),
        }
    }
    fs::write(&a.out, lex.to_tsv()).map_err(data)?;
    w(out, format!("wrote {} associations to {}\n", lex.len(), a.out.display()))?;
    if !missing.is_empty() {
        w(out, format!("no usable associate for: {}\n", missing.join(", ")))?;
    }
    Ok(())
}
