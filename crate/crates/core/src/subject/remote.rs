use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{Completion, Conversation, Subject, SubjectError, TrialContext};
use crate::protocol::Message;

pub const DEFAULT_API_KEY_ENV: &str = "ECPHORY_API_KEY";

/// Settings for an OpenAI-compatible chat-completions endpoint.
#[derive(Debug, Clone, PartialEq)]
pub struct RemoteConfig {
    /// Base URL; requests go to `{endpoint}/chat/completions`.
    pub endpoint: String,
    pub model: String,
    pub temperature: f64,
    pub max_tokens: u32,
    pub timeout: Duration,
    /// Extra attempts after the first failure.
    pub retries: u32,
    /// Wait before the first retry; doubles on each further retry.
    pub retry_backoff: Duration,
    /// Environment variable holding the bearer token, if any.
    pub api_key_env: String,
}

impl RemoteConfig {
    pub fn new(endpoint: impl Into<String>, model: impl Into<String>) -> Self {
        RemoteConfig {
            endpoint: endpoint.into(),
            model: model.into(),
            temperature: 0.0,
            max_tokens: 64,
            timeout: super::default_timeout(),
            retries: 2,
            retry_backoff: Duration::from_millis(500),
            api_key_env: DEFAULT_API_KEY_ENV.into(),
        }
    }

    pub fn url(&self) -> String {
        format!("{}/chat/completions", self.endpoint.trim_end_matches('/'))
    }
}

#[derive(Debug, Deserialize)]
struct ChatResponse {
    choices: Vec<Choice>,
}

#[derive(Debug, Deserialize)]
struct Choice {
    message: ChoiceMessage,
}

#[derive(Debug, Deserialize)]
struct ChoiceMessage {
    content: Option<String>,
}

#[derive(Serialize)]
struct WireMessage<'a> {
    role: String,
    content: &'a str,
}

impl<'a> From<&'a Message> for WireMessage<'a> {
    fn from(m: &'a Message) -> Self {
        WireMessage {
            role: m.role.to_string(),
            content: &m.content,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RemoteSubject {
    config: RemoteConfig,
    agent: ureq::Agent,
    api_key: Option<String>,
}

enum Attempt {
    Done(Completion),
    Retry(SubjectError),
    Fail(SubjectError),
}

impl RemoteSubject {
    pub fn new(config: RemoteConfig) -> Result<Self, SubjectError> {
        if config.endpoint.is_empty() || config.model.is_empty() {
            return Err(SubjectError::Config(
                "remote subject needs an endpoint and a model".into(),
            ));
        }
        if !(config.temperature >= 0.0) {
            return Err(SubjectError::Config("temperature must be >= 0".into()));
        }
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .timeout_global(Some(config.timeout))
            .http_status_as_error(false)
            .build()
            .into();
        let api_key = std::env::var(&config.api_key_env)
            .ok()
            .filter(|k| !k.is_empty());
        Ok(RemoteSubject {
            config,
            agent,
            api_key,
        })
    }

    pub fn config(&self) -> &RemoteConfig {
        &self.config
    }

    fn attempt(&self, body: &serde_json::Value, attempt: u32) -> Attempt {
        let mut req = self.agent.post(self.config.url());
        if let Some(key) = &self.api_key {
            req = req.header("Authorization", format!("Bearer {key}"));
        }
        let mut resp = match req.send_json(body) {
            Ok(r) => r,
            Err(e) => {
                return Attempt::Retry(SubjectError::Transport {
                    attempts: attempt,
                    message: e.to_string(),
                })
            }
        };
        let status = resp.status().as_u16();
        let text = match resp.body_mut().read_to_string() {
            Ok(t) => t,
            Err(e) => {
                return Attempt::Retry(SubjectError::Transport {
                    attempts: attempt,
                    message: e.to_string(),
                })
            }
        };
        if !(200..300).contains(&status) {
            let err = SubjectError::Protocol { status, body: text };
            return if status == 429 || status >= 500 {
                Attempt::Retry(err)
            } else {
                Attempt::Fail(err)
            };
        }
        let parsed: ChatResponse = match serde_json::from_str(&text) {
            Ok(p) => p,
            Err(e) => return Attempt::Fail(SubjectError::Malformed(e.to_string())),
        };
        let Some(first) = parsed.choices.into_iter().next() else {
            return Attempt::Fail(SubjectError::Malformed("empty choices".into()));
        };
        Attempt::Done(Completion {
            text: first.message.content.unwrap_or_default(),
            attempts: attempt,
            http_status: Some(status),
        })
    }
}

impl Subject for RemoteSubject {
    fn id(&self) -> String {
        format!("remote:{}", self.config.model)
    }

    fn complete(
        &self,
        conversation: &Conversation,
        _ctx: TrialContext<'_>,
    ) -> Result<Completion, SubjectError> {
        if conversation.is_empty() {
            return Err(SubjectError::Conversation("empty conversation".into()));
        }
        let messages: Vec<WireMessage> = conversation.messages().iter().map(Into::into).collect();
        let body = json!({
            "model": self.config.model,
            "messages": messages,
            "temperature": self.config.temperature,
            "max_tokens": self.config.max_tokens,
        });
        let total = self.config.retries + 1;
        let mut last = None;
        for attempt in 1..=total {
            if attempt > 1 {
                let factor = 1u32 << (attempt - 2).min(16);
                std::thread::sleep(self.config.retry_backoff * factor);
            }
            match self.attempt(&body, attempt) {
                Attempt::Done(c) => return Ok(c),
                Attempt::Fail(e) => return Err(e),
                Attempt::Retry(e) => last = Some(e),
            }
        }
        Err(match last.expect("at least one attempt") {
            SubjectError::Transport { message, .. } => SubjectError::Transport {
                attempts: total,
                message,
            },
            other => other,
        })
    }
}
