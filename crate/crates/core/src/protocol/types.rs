use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

macro_rules! string_enum {
    ($name:ident { $($variant:ident => $text:literal),+ $(,)? }) => {
        impl $name {
            pub fn as_str(self) -> &'static str {
                match self { $($name::$variant => $text),+ }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.pad(self.as_str())
            }
        }

        impl FromStr for $name {
            type Err = String;

            fn from_str(s: &str) -> Result<Self, Self::Err> {
                match s {
                    $($text => Ok($name::$variant),)+
                    other => Err(format!(concat!("unknown ", stringify!($name), " `{}`"), other)),
                }
            }
        }
    };
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CueType {
    Copy,
    Associate,
    Rhyme,
    Unrelated,
    Ordinal,
}

string_enum!(CueType {
    Copy => "copy",
    Associate => "associate",
    Rhyme => "rhyme",
    Unrelated => "unrelated",
    Ordinal => "ordinal",
});

impl CueType {
    /// The four cue types of a direct-comparison session, in table order.
    pub const DIRECT: [CueType; 4] = [
        CueType::Copy,
        CueType::Associate,
        CueType::Rhyme,
        CueType::Unrelated,
    ];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    /// Recognition: was the cue in the list?
    Familiarity,
    /// Recall: which list word does the cue evoke?
    Identification,
    /// Which word is at a given position?
    Ordering,
}

string_enum!(Task {
    Familiarity => "familiarity",
    Identification => "identification",
    Ordering => "ordering",
});

impl Task {
    pub const DIRECT: [Task; 2] = [Task::Familiarity, Task::Identification];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Timing {
    Immediate,
    Delayed,
}

string_enum!(Timing {
    Immediate => "immediate",
    Delayed => "delayed",
});

impl Timing {
    pub const ALL: [Timing; 2] = [Timing::Immediate, Timing::Delayed];
}

/// One cue presentation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Trial {
    /// 0-based position in the session.
    pub index: usize,
    /// The cue word, or the ordinal word ("first", ...) for ordering trials.
    pub cue: String,
    pub cue_type: CueType,
    /// `None` exactly for unrelated cues.
    pub target: Option<String>,
}

impl Trial {
    /// 1-based list position asked about by an ordering trial.
    pub fn ordinal_position(&self) -> Option<usize> {
        (self.cue_type == CueType::Ordinal).then_some(self.index + 1)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionPlan {
    pub session_id: String,
    pub seed: u64,
    pub study_list: Vec<String>,
    pub trials: Vec<Trial>,
    pub task: Task,
    pub timing: Timing,
}

impl SessionPlan {
    pub fn is_ordinal(&self) -> bool {
        self.task == Task::Ordering
    }

    pub fn with_session_id(mut self, id: impl Into<String>) -> Self {
        self.session_id = id.into();
        self
    }
}
