//! Rememberers and the session runner.
//!
//! A [`Subject`] answers one conversation at a time. Three kinds exist: a
//! remote chat model ([`RemoteSubject`]), scripted and perfect mocks, and the
//! ecphory-model simulator ([`SemSubject`]).

mod mock;
mod remote;
mod runner;

use std::time::Duration;

pub use mock::{perfect_mock_policy, PerfectMock, ScriptedMock};
pub use remote::{RemoteConfig, RemoteSubject};
pub use runner::{
    read_transcript_jsonl, run_session, run_sessions, write_transcript_jsonl, RunError,
    RunOptions, Transcript, TranscriptEntry, ERROR_SENTINEL,
};

use crate::protocol::{Message, Role, SessionPlan, Trial};
use crate::sem::{SemParams, SemSubjectCore};

#[derive(Debug, thiserror::Error)]
pub enum SubjectError {
    #[error("transport error after {attempts} attempt(s): {message}")]
    Transport { attempts: u32, message: String },
    #[error("HTTP {status}: {body}")]
    Protocol { status: u16, body: String },
    #[error("malformed response: {0}")]
    Malformed(String),
    #[error("invalid conversation: {0}")]
    Conversation(String),
    #[error("subject misconfigured: {0}")]
    Config(String),
    #[error("subject cannot answer: {0}")]
    Unsupported(String),
}

/// An ordered chat history. Never holds two assistant turns in a row.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Conversation {
    messages: Vec<Message>,
}

impl Conversation {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_messages(messages: Vec<Message>) -> Result<Self, SubjectError> {
        let mut c = Conversation::new();
        for m in messages {
            c.push(m)?;
        }
        Ok(c)
    }

    pub fn push(&mut self, message: Message) -> Result<(), SubjectError> {
        if message.role == Role::Assistant
            && self.messages.last().is_some_and(|m| m.role == Role::Assistant)
        {
            return Err(SubjectError::Conversation(
                "two consecutive assistant messages".into(),
            ));
        }
        self.messages.push(message);
        Ok(())
    }

    /// Drops the last message; used to retract a question that got no answer.
    pub fn pop(&mut self) -> Option<Message> {
        self.messages.pop()
    }

    pub fn messages(&self) -> &[Message] {
        &self.messages
    }

    pub fn len(&self) -> usize {
        self.messages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.messages.is_empty()
    }

    pub fn last_user_text(&self) -> Option<&str> {
        self.messages
            .iter()
            .rev()
            .find(|m| m.role == Role::User)
            .map(|m| m.content.as_str())
    }
}

/// What the runner is asking about. `trial` is `None` for the delayed-session
/// study preamble.
#[derive(Debug, Clone, Copy)]
pub struct TrialContext<'a> {
    pub plan: &'a SessionPlan,
    pub trial: Option<&'a Trial>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Completion {
    pub text: String,
    pub attempts: u32,
    pub http_status: Option<u16>,
}

impl Completion {
    pub fn local(text: impl Into<String>) -> Self {
        Completion {
            text: text.into(),
            attempts: 1,
            http_status: None,
        }
    }
}

pub trait Subject: Send + Sync {
    /// Stable identifier recorded with results.
    fn id(&self) -> String;

    /// Answers the final user message of `conversation`.
    fn complete(
        &self,
        conversation: &Conversation,
        ctx: TrialContext<'_>,
    ) -> Result<Completion, SubjectError>;

    /// Whether the subject reads the rendered prompts. Simulated subjects
    /// answer from the trial alone and let the runner skip rendering.
    fn reads_prompts(&self) -> bool {
        true
    }
}

/// The ecphory-model rememberer.
#[derive(Debug, Clone)]
pub struct SemSubject {
    core: SemSubjectCore,
}

impl SemSubject {
    pub fn new(params: SemParams, seed: u64) -> Self {
        SemSubject {
            core: SemSubjectCore::new(params, seed),
        }
    }
}

impl Subject for SemSubject {
    fn id(&self) -> String {
        format!("sem:{}", self.core.seed)
    }

    fn complete(
        &self,
        _conversation: &Conversation,
        ctx: TrialContext<'_>,
    ) -> Result<Completion, SubjectError> {
        let Some(trial) = ctx.trial else {
            return Ok(Completion::local("OK"));
        };
        self.core
            .respond(ctx.plan, trial)
            .map(Completion::local)
            .map_err(|e| SubjectError::Unsupported(e.to_string()))
    }

    fn reads_prompts(&self) -> bool {
        false
    }
}

/// Which subject to build, and its settings.
#[derive(Debug, Clone, PartialEq)]
pub enum SubjectConfig {
    Remote(RemoteConfig),
    PerfectMock,
    ScriptedMock { script: String },
    Sem { params: SemParams, seed: u64 },
}

impl SubjectConfig {
    pub fn build(&self) -> Result<Box<dyn Subject>, SubjectError> {
        Ok(match self {
            SubjectConfig::Remote(cfg) => Box::new(RemoteSubject::new(cfg.clone())?),
            SubjectConfig::PerfectMock => Box::new(PerfectMock),
            SubjectConfig::ScriptedMock { script } => Box::new(ScriptedMock::parse(script)?),
            SubjectConfig::Sem { params, seed } => Box::new(SemSubject::new(params.clone(), *seed)),
        })
    }
}

pub(crate) fn default_timeout() -> Duration {
    Duration::from_secs(60)
}
