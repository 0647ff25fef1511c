use std::fmt;
use std::str::FromStr;

use super::SemError;
use crate::kv::{self, parse_value, KvError};
use crate::protocol::{CueType, Timing};

/// How trace and cue strengths combine into one ecphoric value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SynergyForm {
    /// `w·t·c + (1−w)·max(0, t + c − 1)`.
    #[default]
    Blend,
    /// `sqrt(t·c)`; ignores the weight.
    Geometric,
}

impl SynergyForm {
    pub fn as_str(self) -> &'static str {
        match self {
            SynergyForm::Blend => "blend",
            SynergyForm::Geometric => "geometric",
        }
    }
}

impl fmt::Display for SynergyForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SynergyForm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "blend" => Ok(SynergyForm::Blend),
            "geometric" => Ok(SynergyForm::Geometric),
            _ => Err(format!("unknown synergy form `{s}`")),
        }
    }
}

/// Trace strength used for unrelated cues, which have no studied target.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LureTrace {
    /// Always 0.
    Zero,
    /// Normal around 0 with the timing's trace spread, clamped to [0, 1].
    /// Reduces to `Zero` as the spread goes to 0.
    #[default]
    Noise,
}

impl LureTrace {
    pub fn as_str(self) -> &'static str {
        match self {
            LureTrace::Zero => "zero",
            LureTrace::Noise => "noise",
        }
    }
}

impl fmt::Display for LureTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LureTrace {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "zero" => Ok(LureTrace::Zero),
            "noise" => Ok(LureTrace::Noise),
            _ => Err(format!("unknown lure trace `{s}`")),
        }
    }
}

/// Numeric parameters, in canonical order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Param {
    TraceMeanImmediate,
    TraceMeanDelayed,
    TraceSd,
    TraceSdDelayed,
    CueCopy,
    CueAssociate,
    CueRhyme,
    CueUnrelated,
    CueSd,
    ThetaFamiliarity,
    ThetaIdentification,
    SynergyWeight,
}

impl Param {
    pub const ALL: [Param; 12] = [
        Param::TraceMeanImmediate,
        Param::TraceMeanDelayed,
        Param::TraceSd,
        Param::TraceSdDelayed,
        Param::CueCopy,
        Param::CueAssociate,
        Param::CueRhyme,
        Param::CueUnrelated,
        Param::CueSd,
        Param::ThetaFamiliarity,
        Param::ThetaIdentification,
        Param::SynergyWeight,
    ];

    pub fn key(self) -> &'static str {
        match self {
            Param::TraceMeanImmediate => "trace_mean_immediate",
            Param::TraceMeanDelayed => "trace_mean_delayed",
            Param::TraceSd => "trace_sd",
            Param::TraceSdDelayed => "trace_sd_delayed",
            Param::CueCopy => "cue_copy",
            Param::CueAssociate => "cue_associate",
            Param::CueRhyme => "cue_rhyme",
            Param::CueUnrelated => "cue_unrelated",
            Param::CueSd => "cue_sd",
            Param::ThetaFamiliarity => "theta_familiarity",
            Param::ThetaIdentification => "theta_identification",
            Param::SynergyWeight => "synergy_weight",
        }
    }

    pub fn from_key(key: &str) -> Option<Param> {
        Param::ALL.into_iter().find(|p| p.key() == key)
    }
}

/// Model parameters.
///
/// Trace strength is drawn per trial from a normal distribution whose mean
/// and spread depend on timing; cue strength from a normal around the cue
/// type's strength. Both are clamped to [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct SemParams {
    pub trace_mean_immediate: f64,
    pub trace_mean_delayed: f64,
    /// Trace spread for immediate tests.
    pub trace_sd: f64,
    /// Trace spread for delayed tests.
    pub trace_sd_delayed: f64,
    pub cue_copy: f64,
    pub cue_associate: f64,
    pub cue_rhyme: f64,
    pub cue_unrelated: f64,
    pub cue_sd: f64,
    pub theta_familiarity: f64,
    pub theta_identification: f64,
    pub synergy_weight: f64,
    pub synergy: SynergyForm,
    pub lure_trace: LureTrace,
}

impl Default for SemParams {
    fn default() -> Self {
        SemParams {
            trace_mean_immediate: 0.8,
            trace_mean_delayed: 0.7,
            trace_sd: 0.2,
            trace_sd_delayed: 0.3,
            cue_copy: 1.0,
            cue_associate: 0.6,
            cue_rhyme: 0.5,
            cue_unrelated: 0.5,
            cue_sd: 0.2,
            theta_familiarity: 0.5,
            theta_identification: 0.6,
            synergy_weight: 0.5,
            synergy: SynergyForm::Blend,
            lure_trace: LureTrace::Noise,
        }
    }
}

impl SemParams {
    pub fn get(&self, p: Param) -> f64 {
        match p {
            Param::TraceMeanImmediate => self.trace_mean_immediate,
            Param::TraceMeanDelayed => self.trace_mean_delayed,
            Param::TraceSd => self.trace_sd,
            Param::TraceSdDelayed => self.trace_sd_delayed,
            Param::CueCopy => self.cue_copy,
            Param::CueAssociate => self.cue_associate,
            Param::CueRhyme => self.cue_rhyme,
            Param::CueUnrelated => self.cue_unrelated,
            Param::CueSd => self.cue_sd,
            Param::ThetaFamiliarity => self.theta_familiarity,
            Param::ThetaIdentification => self.theta_identification,
            Param::SynergyWeight => self.synergy_weight,
        }
    }

    pub fn set(&mut self, p: Param, v: f64) {
        *match p {
            Param::TraceMeanImmediate => &mut self.trace_mean_immediate,
            Param::TraceMeanDelayed => &mut self.trace_mean_delayed,
            Param::TraceSd => &mut self.trace_sd,
            Param::TraceSdDelayed => &mut self.trace_sd_delayed,
            Param::CueCopy => &mut self.cue_copy,
            Param::CueAssociate => &mut self.cue_associate,
            Param::CueRhyme => &mut self.cue_rhyme,
            Param::CueUnrelated => &mut self.cue_unrelated,
            Param::CueSd => &mut self.cue_sd,
            Param::ThetaFamiliarity => &mut self.theta_familiarity,
            Param::ThetaIdentification => &mut self.theta_identification,
            Param::SynergyWeight => &mut self.synergy_weight,
        } = v;
    }

    /// Mean cue strength for a cue type, clamped to [0, 1].
    pub fn cue_strength(&self, cue_type: CueType) -> f64 {
        let v = match cue_type {
            CueType::Copy => self.cue_copy,
            CueType::Associate => self.cue_associate,
            CueType::Rhyme => self.cue_rhyme,
            CueType::Unrelated | CueType::Ordinal => self.cue_unrelated,
        };
        v.clamp(0.0, 1.0)
    }

    /// Trace mean and spread for a timing, mean clamped to [0, 1].
    pub fn trace(&self, timing: Timing) -> (f64, f64) {
        match timing {
            Timing::Immediate => (self.trace_mean_immediate.clamp(0.0, 1.0), self.trace_sd),
            Timing::Delayed => (self.trace_mean_delayed.clamp(0.0, 1.0), self.trace_sd_delayed),
        }
    }

    pub fn validate(&self) -> Result<(), SemError> {
        for p in Param::ALL {
            if !self.get(p).is_finite() {
                return Err(SemError::InvalidParams(format!("{} is not finite", p.key())));
            }
        }
        for p in [Param::TraceSd, Param::TraceSdDelayed, Param::CueSd] {
            if self.get(p) <= 0.0 {
                return Err(SemError::InvalidParams(format!("{} must be > 0", p.key())));
            }
        }
        if !(0.0..=1.0).contains(&self.synergy_weight) {
            return Err(SemError::InvalidParams("synergy_weight must lie in [0, 1]".into()));
        }
        if self.theta_identification < self.theta_familiarity {
            return Err(SemError::InvalidParams(
                "theta_identification must be >= theta_familiarity".into(),
            ));
        }
        Ok(())
    }

    /// Parses a `key = value` file. Absent keys keep their defaults;
    /// `trace_sd_delayed` defaults to `trace_sd` when only the latter is set.
    pub fn parse(text: &str) -> Result<Self, SemError> {
        let mut p = SemParams::default();
        let mut sd_delayed_set = false;
        for line in kv::parse(text)? {
            match line.key.as_str() {
                "synergy" => p.synergy = parse_value(&line)?,
                "lure_trace" => p.lure_trace = parse_value(&line)?,
                key => {
                    let param = Param::from_key(key)
                        .ok_or_else(|| KvError::new(line.line, format!("unknown parameter `{key}`")))?;
                    sd_delayed_set |= param == Param::TraceSdDelayed;
                    p.set(param, parse_value(&line)?);
                }
            }
        }
        if !sd_delayed_set {
            p.trace_sd_delayed = p.trace_sd;
        }
        p.validate()?;
        Ok(p)
    }

    pub fn to_kv(&self) -> String {
        let mut out = String::new();
        for p in Param::ALL {
            out.push_str(&format!("{} = {}\n", p.key(), self.get(p)));
        }
        out.push_str(&format!("synergy = {}\n", self.synergy));
        out.push_str(&format!("lure_trace = {}\n", self.lure_trace));
        out
    }
}
