use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{LureTrace, SemError, SemParams, SynergyForm};
use crate::protocol::{CueType, SessionPlan, Task, Timing, Trial};

/// A location in the (trace, cue) plane and its ecphoric value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EcphoricPoint {
    pub trace: f64,
    pub cue: f64,
    pub value: f64,
}

impl EcphoricPoint {
    pub fn new(trace: f64, cue: f64, w: f64) -> Result<Self, SemError> {
        Ok(EcphoricPoint {
            trace,
            cue,
            value: ecphoric_value(trace, cue, w)?,
        })
    }
}

fn check_unit(name: &str, v: f64) -> Result<(), SemError> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(SemError::Domain(format!("{name} = {v} is outside [0, 1]")))
    }
}

/// `w·trace·cue + (1−w)·max(0, trace + cue − 1)`.
pub fn ecphoric_value(trace: f64, cue: f64, w: f64) -> Result<f64, SemError> {
    check_unit("trace", trace)?;
    check_unit("cue", cue)?;
    check_unit("w", w)?;
    Ok(blend(trace, cue, w))
}

#[inline]
fn blend(trace: f64, cue: f64, w: f64) -> f64 {
    w * (trace * cue) + (1.0 - w) * (trace + cue - 1.0).clamp(0.0, 1.0)
}

#[inline]
pub(crate) fn synergy(form: SynergyForm, trace: f64, cue: f64, w: f64) -> f64 {
    match form {
        SynergyForm::Blend => blend(trace, cue, w),
        SynergyForm::Geometric => (trace * cue).sqrt(),
    }
}

/// Whether the point clears the task's threshold (pass at equality).
pub fn convert(point: &EcphoricPoint, task: Task, params: &SemParams) -> Result<bool, SemError> {
    let theta = match task {
        Task::Familiarity => params.theta_familiarity,
        Task::Identification => params.theta_identification,
        Task::Ordering => return Err(SemError::UnsupportedTask(task)),
    };
    Ok(point.value >= theta)
}

/// Maps standard-normal draws to a point. Shared by the subject and the
/// batch simulator so both produce identical decisions.
#[inline]
pub(crate) fn point_from_draws(
    params: &SemParams,
    cue_type: CueType,
    timing: Timing,
    z_trace: f64,
    z_cue: f64,
) -> EcphoricPoint {
    let (mean, sd) = params.trace(timing);
    let trace = match (cue_type, params.lure_trace) {
        (CueType::Unrelated, LureTrace::Zero) => 0.0,
        (CueType::Unrelated, LureTrace::Noise) => (sd * z_trace).clamp(0.0, 1.0),
        _ => (mean + sd * z_trace).clamp(0.0, 1.0),
    };
    let cue = (params.cue_strength(cue_type) + params.cue_sd * z_cue).clamp(0.0, 1.0);
    EcphoricPoint {
        trace,
        cue,
        value: synergy(params.synergy, trace, cue, params.synergy_weight),
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Generator for one trial. The task is deliberately not an input: the
/// familiarity and identification tests of a session present the same cues,
/// and a given trial yields the same ecphoric value under both, differing
/// only in the threshold it is converted against.
pub(crate) fn trial_rng(subject_seed: u64, plan_seed: u64, timing: Timing, index: usize) -> ChaCha8Rng {
    let mut h = splitmix64(subject_seed);
    h = splitmix64(h ^ plan_seed);
    h = splitmix64(h ^ timing as u64);
    h = splitmix64(h ^ index as u64);
    ChaCha8Rng::seed_from_u64(h)
}

pub(crate) fn draw_normals(rng: &mut ChaCha8Rng) -> (f64, f64) {
    let z_trace: f64 = rng.sample(StandardNormal);
    let z_cue: f64 = rng.sample(StandardNormal);
    (z_trace, z_cue)
}

/// The simulated rememberer's decision rule.
#[derive(Debug, Clone, PartialEq)]
pub struct SemSubjectCore {
    pub params: SemParams,
    pub seed: u64,
}

impl SemSubjectCore {
    pub fn new(params: SemParams, seed: u64) -> Self {
        SemSubjectCore { params, seed }
    }

    /// Answer to one direct-comparison trial: `yes`/`no` for familiarity;
    /// the target or `none` for identification. An unrelated cue that passes
    /// identification yields a random study word.
    pub fn respond(&self, plan: &SessionPlan, trial: &Trial) -> Result<String, SemError> {
        if plan.task == Task::Ordering || trial.cue_type == CueType::Ordinal {
            return Err(SemError::UnsupportedTask(Task::Ordering));
        }
        let mut rng = trial_rng(self.seed, plan.seed, plan.timing, trial.index);
        let (zt, zc) = draw_normals(&mut rng);
        let point = point_from_draws(&self.params, trial.cue_type, plan.timing, zt, zc);
        let pass = convert(&point, plan.task, &self.params)?;
        Ok(match (plan.task, pass) {
            (Task::Familiarity, true) => "yes".into(),
            (Task::Familiarity, false) => "no".into(),
            (_, false) => "none".into(),
            (_, true) => match &trial.target {
                Some(t) => t.clone(),
                None if plan.study_list.is_empty() => "none".into(),
                None => plan.study_list[rng.random_range(0..plan.study_list.len())].clone(),
            },
        })
    }
}
