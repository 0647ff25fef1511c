use std::fmt::Write as _;
use std::str::FromStr;

use super::ReportError;
use crate::protocol::{CueType, Task, Timing};
use crate::scoring::{CellKey, ResultsMatrix, ScoringError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TableStyle {
    /// Fixed-width text laid out like the published tables.
    #[default]
    Paper,
    Csv,
    Tsv,
}

impl FromStr for TableStyle {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "paper" => Ok(TableStyle::Paper),
            "csv" => Ok(TableStyle::Csv),
            "tsv" => Ok(TableStyle::Tsv),
            _ => Err(format!("unknown table style `{s}` (paper, csv, tsv)")),
        }
    }
}

fn row_label(c: CueType) -> &'static str {
    match c {
        CueType::Copy => "Copy",
        CueType::Associate => "Associate",
        CueType::Rhyme => "Rhyme",
        CueType::Unrelated => "Unrelated",
        CueType::Ordinal => "Ordinal cue word",
    }
}

fn ordinal_keys() -> [CellKey; 2] {
    Timing::ALL.map(|t| CellKey::new(CueType::Ordinal, Task::Ordering, t))
}

fn is_ordinal(m: &ResultsMatrix) -> bool {
    !m.cells.is_empty() && m.cells.keys().all(|k| k.task == Task::Ordering)
}

/// Renders a matrix. Direct-comparison matrices give four cue rows by
/// familiarity/identification × immediate/delayed; ordinal matrices give one
/// row with immediate and delayed columns. Paper style prints proportions to
/// 2 decimals (3 for the ordinal row); csv/tsv give full precision with
/// counts and, for ordinal matrices, one row per list position.
pub fn render_table(m: &ResultsMatrix, style: TableStyle) -> Result<String, ReportError> {
    if is_ordinal(m) {
        let missing: Vec<CellKey> = ordinal_keys()
            .into_iter()
            .filter(|k| m.cells.get(k).is_none_or(|c| c.denominator == 0))
            .collect();
        if !missing.is_empty() {
            return Err(ScoringError::MissingCells(missing).into());
        }
        return Ok(match style {
            TableStyle::Paper => ordinal_paper(m),
            TableStyle::Csv => delimited(m, ','),
            TableStyle::Tsv => delimited(m, '\t'),
        });
    }
    let values = m.direct_values()?;
    Ok(match style {
        TableStyle::Paper => direct_paper(&values, m),
        TableStyle::Csv => delimited(m, ','),
        TableStyle::Tsv => delimited(m, '\t'),
    })
}

fn direct_paper(values: &[f64; 16], m: &ResultsMatrix) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{:<22}{:<22}{}", "", "Familiarity", "Identification");
    let _ = writeln!(
        s,
        "{:<22}{:<11}{:<11}{:<11}{}",
        "Retrieval information", "Immediate", "Delayed", "Immediate", "Delayed"
    );
    for (row, cue) in CueType::DIRECT.into_iter().enumerate() {
        let v = &values[row * 4..row * 4 + 4];
        let _ = writeln!(
            s,
            "{:<22}{:<11.2}{:<11.2}{:<11.2}{:.2}",
            row_label(cue),
            v[0],
            v[1],
            v[2],
            v[3]
        );
    }
    footer(&mut s, m);
    s
}

fn ordinal_paper(m: &ResultsMatrix) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{:<22}{:<11}{}", "Retrieval information", "Immediate", "Delayed");
    let [i, d] = ordinal_keys().map(|k| m.cells[&k].proportion());
    let _ = writeln!(s, "{:<22}{:<11.3}{:.3}", row_label(CueType::Ordinal), i, d);
    footer(&mut s, m);
    s
}

fn footer(s: &mut String, m: &ResultsMatrix) {
    let denoms: std::collections::BTreeSet<u64> = m.cells.values().map(|c| c.denominator).collect();
    let denoms: Vec<String> = denoms.iter().map(u64::to_string).collect();
    let _ = writeln!(s, "Observations per cell: {}", denoms.join(", "));
    if let Some(note) = &m.meta.note {
        let _ = writeln!(s, "Note: {note}");
    }
}

fn delimited(m: &ResultsMatrix, sep: char) -> String {
    let mut s = String::new();
    let header = [
        "cue_type",
        "task",
        "timing",
        "position",
        "numerator",
        "denominator",
        "proportion",
        "unparsed_rate",
    ];
    let _ = writeln!(s, "{}", header.join(&sep.to_string()));
    let mut row = |k: &CellKey, pos: Option<usize>, c: &crate::scoring::Cell| {
        let fields = [
            k.cue_type.to_string(),
            k.task.to_string(),
            k.timing.to_string(),
            pos.map_or(String::new(), |p| p.to_string()),
            c.numerator.to_string(),
            c.denominator.to_string(),
            c.proportion().to_string(),
            c.unparsed_rate().to_string(),
        ];
        let _ = writeln!(s, "{}", fields.join(&sep.to_string()));
    };
    for (k, c) in &m.cells {
        row(k, None, c);
    }
    for ((timing, pos), c) in &m.ordinal_positions {
        row(&CellKey::new(CueType::Ordinal, Task::Ordering, *timing), Some(*pos), c);
    }
    s
}

/// Familiarity cells whose responses were not recognizably yes or no.
pub fn render_unparsed(m: &ResultsMatrix) -> String {
    let mut s = String::from("Unparsed familiarity responses\n");
    for (k, c) in m.cells.iter().filter(|(k, _)| k.task == Task::Familiarity) {
        let _ = writeln!(
            s,
            "  {:<10}{:<10}{:>6.3} ({} of {})",
            k.cue_type,
            k.timing,
            c.unparsed_rate(),
            c.unparsed,
            c.denominator
        );
    }
    s
}
