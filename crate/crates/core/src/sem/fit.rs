use rayon::prelude::*;

use super::{Param, SemError, SemParams, Simulator};
use crate::kv::{self, parse_value, KvError};
use crate::scoring::ResultsMatrix;

/// One searched parameter and its candidate values, in search order.
#[derive(Debug, Clone, PartialEq)]
pub struct GridAxis {
    pub param: Param,
    pub values: Vec<f64>,
}

/// A rectangular parameter grid around a base parameter set.
///
/// Canonical order: axes sorted by [`Param::ALL`] order, each axis's values
/// ascending and deduplicated, enumerated like an odometer with the last
/// axis changing fastest. Ties in loss go to the earliest candidate in this
/// order, so the result does not depend on how a grid file lists them.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub base: SemParams,
    axes: Vec<GridAxis>,
}

impl GridSpec {
    pub fn new(base: SemParams, mut axes: Vec<GridAxis>) -> Result<Self, SemError> {
        axes.sort_by_key(|a| a.param);
        for pair in axes.windows(2) {
            if pair[0].param == pair[1].param {
                return Err(SemError::InvalidParams(format!("{} listed twice", pair[0].param.key())));
            }
        }
        if axes.iter().any(|a| a.values.iter().any(|v| !v.is_finite())) {
            return Err(SemError::InvalidParams("grid values must be finite".into()));
        }
        for a in &mut axes {
            a.values.sort_by(f64::total_cmp);
            a.values.dedup();
        }
        Ok(GridSpec { base, axes })
    }

    /// Parses `name = min,max,steps` lines (or `name = value` for a fixed
    /// value). `synergy` and `lure_trace` set the base. Parameters not
    /// listed keep their defaults.
    pub fn parse(text: &str) -> Result<Self, SemError> {
        let mut base = SemParams::default();
        let mut axes = Vec::new();
        for line in kv::parse(text)? {
            match line.key.as_str() {
                "synergy" => base.synergy = parse_value(&line)?,
                "lure_trace" => base.lure_trace = parse_value(&line)?,
                key => {
                    let param = Param::from_key(key)
                        .ok_or_else(|| KvError::new(line.line, format!("unknown parameter `{key}`")))?;
                    axes.push(GridAxis {
                        param,
                        values: parse_range(&line)?,
                    });
                }
            }
        }
        GridSpec::new(base, axes)
    }

    pub fn axes(&self) -> &[GridAxis] {
        &self.axes
    }

    /// Number of grid points, admissible or not.
    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.values.len()).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The `index`-th point in canonical order.
    pub fn candidate(&self, mut index: usize) -> SemParams {
        let mut p = self.base.clone();
        for axis in self.axes.iter().rev() {
            let n = axis.values.len();
            p.set(axis.param, axis.values[index % n]);
            index /= n;
        }
        p
    }
}

/// Drops floating-point residue so grid points print as written.
fn round12(x: f64) -> f64 {
    (x * 1e12).round() / 1e12
}

fn parse_range(line: &kv::KvLine) -> Result<Vec<f64>, KvError> {
    let err = |m: &str| KvError::new(line.line, format!("`{}`: {m}", line.key));
    let parts: Vec<&str> = line.value.split(',').map(str::trim).collect();
    let num = |s: &str| s.parse::<f64>().map_err(|e| err(&e.to_string()));
    match parts.as_slice() {
        [v] => Ok(vec![num(v)?]),
        [lo, hi, steps] => {
            let (lo, hi) = (num(lo)?, num(hi)?);
            let steps: usize = steps.parse().map_err(|_| err("steps must be a whole number"))?;
            Ok(match steps {
                0 => Vec::new(),
                1 => vec![lo],
                n => (0..n)
                    .map(|i| round12(lo + (hi - lo) * i as f64 / (n - 1) as f64))
                    .collect(),
            })
        }
        _ => Err(err("expected `min,max,steps` or a single value")),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub params: SemParams,
    /// Mean squared error over the 16 direct cells.
    pub loss: f64,
    /// Admissible candidates simulated.
    pub evaluated: usize,
    /// Candidates rejected by [`SemParams::validate`].
    pub skipped: usize,
}

fn mse(a: &[f64; 16], b: &[f64; 16]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>() / 16.0
}

/// Exhaustive grid search for the parameters whose simulated matrix is
/// closest, in mean squared error over the direct cells, to `target`.
pub fn fit_to_benchmark(
    target: &ResultsMatrix,
    grid: &GridSpec,
    sessions: usize,
    seed: u64,
) -> Result<FitResult, SemError> {
    let want = target.direct_values()?;
    if grid.is_empty() {
        return Err(SemError::EmptyGrid);
    }
    let sim = Simulator::new(sessions, seed)?;
    let best = (0..grid.len())
        .into_par_iter()
        .filter_map(|i| {
            let p = grid.candidate(i);
            p.validate().ok()?;
            Some((mse(&sim.proportions(&p), &want), i))
        })
        .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let evaluated = (0..grid.len())
        .filter(|&i| grid.candidate(i).validate().is_ok())
        .count();
    let (loss, index) = best.ok_or(SemError::EmptyGrid)?;
    Ok(FitResult {
        params: grid.candidate(index),
        loss,
        evaluated,
        skipped: grid.len() - evaluated,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_ranges() {
        let g = GridSpec::parse("theta_identification = 0.5, 0.7, 3\nsynergy_weight = 0.25\ntrace_sd = 0.1,0.2,2\n").unwrap();
        assert_eq!(g.len(), 6);
        assert_eq!(g.axes()[0].param, Param::TraceSd);
        assert_eq!(g.axes()[1].values.len(), 3);
        assert!((g.axes()[1].values[1] - 0.6).abs() < 1e-12);
        // Last axis varies fastest.
        assert_eq!(g.candidate(1).theta_identification, g.axes()[1].values[1]);
        assert_eq!(g.candidate(3).trace_sd, 0.2);
        assert!(GridSpec::parse("trace_sd = 1,2\n").is_err());
        assert!(GridSpec::parse("trace_sd = 1\ntrace_sd = 2\n").is_err());
        assert!(GridSpec::parse("cue_sd = 0.1,0.2,x\n").is_err());
    }

    #[test]
    fn empty_grid_is_an_error() {
        let target = super::super::simulate_matrix(&SemParams::default(), 1, 1).unwrap();
        let g = GridSpec::parse("cue_sd = 0.1,0.2,0\n").unwrap();
        assert!(matches!(fit_to_benchmark(&target, &g, 1, 1), Err(SemError::EmptyGrid)));
        // Every point inadmissible.
        let g = GridSpec::parse("theta_familiarity = 0.9\ntheta_identification = 0.1\n").unwrap();
        assert!(matches!(fit_to_benchmark(&target, &g, 1, 1), Err(SemError::EmptyGrid)));
    }

    #[test]
    fn singleton_grid_returns_candidate() {
        let target = super::super::simulate_matrix(&SemParams::default(), 2, 3).unwrap();
        let g = GridSpec::parse("cue_rhyme = 0.35\n").unwrap();
        let fit = fit_to_benchmark(&target, &g, 2, 9).unwrap();
        assert_eq!(fit.params.cue_rhyme, 0.35);
        assert_eq!(fit.evaluated, 1);
    }
}
