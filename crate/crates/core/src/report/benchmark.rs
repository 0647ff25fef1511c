use crate::scoring::{Cell, CellKey, ResultsMatrix};

/// Human proportions from Tulving's direct-comparison experiment, in
/// [`CellKey::direct`] order: rows copy, associate, rhyme, unrelated;
/// columns familiarity immediate/delayed, identification immediate/delayed.
pub const HUMAN_BENCHMARK: [f64; 16] = [
    0.78, 0.71, 0.69, 0.60, //
    0.15, 0.20, 0.54, 0.37, //
    0.09, 0.15, 0.20, 0.31, //
    0.08, 0.18, 0.04, 0.02,
];

pub const HUMAN_DENOMINATOR: u64 = 576;

pub const BENCHMARK_NOTE: &str =
    "human benchmark: Tulving (1983), direct-comparison experiment, 576 observations per cell";

pub fn human_benchmark() -> ResultsMatrix {
    let mut m = ResultsMatrix::default();
    for (key, p) in CellKey::direct().zip(HUMAN_BENCHMARK) {
        m.cells.insert(key, Cell::from_proportion(p, HUMAN_DENOMINATOR));
    }
    m.meta.subject_id = Some("human-benchmark".into());
    m.meta.note = Some(BENCHMARK_NOTE.into());
    m
}
