use std::fmt::Write as _;

use super::{human_benchmark, ReportError, TableStyle};
use crate::protocol::{CueType, Task, Timing};
use crate::scoring::{CellKey, ResultsMatrix};

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    /// `matrix − reference` per direct cell, in [`CellKey::direct`] order.
    pub differences: Vec<(CellKey, f64)>,
    /// Spearman correlation over the 16 cells; NaN when either side is
    /// constant.
    pub spearman: f64,
    /// Qualitative checks on the compared matrix.
    pub checks: Vec<Check>,
    pub reference_note: Option<String>,
}

fn average_ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut ranks = vec![0.0; v.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
            j += 1;
        }
        let r = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            ranks[k] = r;
        }
        i = j + 1;
    }
    ranks
}

/// Spearman rank correlation with tied values given their average rank.
pub fn spearman(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len(), "spearman needs equal-length inputs");
    let (ra, rb) = (average_ranks(a), average_ranks(b));
    let n = a.len() as f64;
    let (ma, mb) = (ra.iter().sum::<f64>() / n, rb.iter().sum::<f64>() / n);
    let mut cov = 0.0;
    let mut va = 0.0;
    let mut vb = 0.0;
    for (x, y) in ra.iter().zip(&rb) {
        cov += (x - ma) * (y - mb);
        va += (x - ma) * (x - ma);
        vb += (y - mb) * (y - mb);
    }
    cov / (va * vb).sqrt()
}

fn cell(v: &[f64; 16], c: CueType, task: Task, t: Timing) -> f64 {
    let i = CellKey::direct()
        .position(|k| k == CellKey::new(c, task, t))
        .expect("direct cell");
    v[i]
}

fn shared_checks(v: &[f64; 16]) -> Vec<Check> {
    use CueType::*;
    use Task::*;
    use Timing::*;
    let g = |c, task, t| cell(v, c, task, t);
    vec![
        Check {
            name: "copy familiarity >= copy identification at both timings",
            pass: Timing::ALL
                .into_iter()
                .all(|t| g(Copy, Familiarity, t) >= g(Copy, Identification, t)),
        },
        Check {
            name: "unrelated false positives increase from immediate to delayed",
            pass: g(Unrelated, Familiarity, Delayed) > g(Unrelated, Familiarity, Immediate),
        },
        Check {
            name: "rhyme identification > unrelated identification at both timings",
            pass: Timing::ALL
                .into_iter()
                .all(|t| g(Rhyme, Identification, t) > g(Unrelated, Identification, t)),
        },
    ]
}

/// The four comparisons of interest for a results table. The fourth asks
/// whether associate cues lead familiarity less after a delay: the gap
/// identification − familiarity for associates shrinks.
pub fn qualitative_checks(m: &ResultsMatrix) -> Result<Vec<Check>, ReportError> {
    use CueType::Associate;
    use Task::*;
    let v = m.direct_values()?;
    let gap = |t| cell(&v, Associate, Identification, t) - cell(&v, Associate, Familiarity, t);
    let mut checks = shared_checks(&v);
    checks.push(Check {
        name: "associate identification-familiarity gap shrinks from immediate to delayed",
        pass: gap(Timing::Delayed) < gap(Timing::Immediate),
    });
    Ok(checks)
}

/// Checks applied to a fitted model: as [`qualitative_checks`] but the
/// fourth asks only that associate identification declines with delay.
pub fn fit_checks(m: &ResultsMatrix) -> Result<Vec<Check>, ReportError> {
    let v = m.direct_values()?;
    let mut checks = shared_checks(&v);
    checks.push(Check {
        name: "associate identification decreases from immediate to delayed",
        pass: cell(&v, CueType::Associate, Task::Identification, Timing::Delayed)
            < cell(&v, CueType::Associate, Task::Identification, Timing::Immediate),
    });
    Ok(checks)
}

/// Per-cell differences and rank agreement of `m` against `reference`;
/// checks are evaluated on `m`.
pub fn compare(m: &ResultsMatrix, reference: &ResultsMatrix) -> Result<Comparison, ReportError> {
    let a = m.direct_values()?;
    let b = reference.direct_values()?;
    Ok(Comparison {
        differences: CellKey::direct()
            .zip(a.iter().zip(&b))
            .map(|(k, (x, y))| (k, x - y))
            .collect(),
        spearman: spearman(&a, &b),
        checks: qualitative_checks(m)?,
        reference_note: reference.meta.note.clone(),
    })
}

pub fn compare_to_human(m: &ResultsMatrix) -> Result<Comparison, ReportError> {
    compare(m, &human_benchmark())
}

fn fmt_rho(r: f64) -> String {
    if r.is_nan() {
        "undefined".into()
    } else {
        format!("{r:.3}")
    }
}

pub fn render_comparison(c: &Comparison, style: TableStyle) -> String {
    let mut s = String::new();
    let pf = |p: bool| if p { "PASS" } else { "FAIL" };
    match style {
        TableStyle::Paper => {
            let _ = writeln!(s, "Difference from reference (subject - reference)");
            let _ = writeln!(
                s,
                "{:<22}{:<11}{:<11}{:<11}{}",
                "", "Fam/Imm", "Fam/Del", "Id/Imm", "Id/Del"
            );
            for (row, cue) in CueType::DIRECT.into_iter().enumerate() {
                let d: Vec<String> = c.differences[row * 4..row * 4 + 4]
                    .iter()
                    .map(|(_, x)| format!("{x:+.2}"))
                    .collect();
                let _ = writeln!(s, "{:<22}{:<11}{:<11}{:<11}{}", cue, d[0], d[1], d[2], d[3]);
            }
            let _ = writeln!(s, "Spearman rank correlation: {}", fmt_rho(c.spearman));
            for ch in &c.checks {
                let _ = writeln!(s, "[{}] {}", pf(ch.pass), ch.name);
            }
            if let Some(n) = &c.reference_note {
                let _ = writeln!(s, "Reference: {n}");
            }
        }
        TableStyle::Csv | TableStyle::Tsv => {
            let sep = if style == TableStyle::Csv { "," } else { "\t" };
            let _ = writeln!(s, "{}", ["item", "cue_type", "task", "timing", "value"].join(sep));
            for (k, d) in &c.differences {
                let _ = writeln!(s, "{}", ["difference", k.cue_type.as_str(), k.task.as_str(), k.timing.as_str(), &d.to_string()].join(sep));
            }
            let _ = writeln!(s, "{}", ["spearman", "", "", "", &fmt_rho(c.spearman)].join(sep));
            for ch in &c.checks {
                let name = format!("\"{}\"", ch.name);
                let _ = writeln!(s, "{}", ["check", &name, "", "", pf(ch.pass)].join(sep));
            }
        }
    }
    s
}
