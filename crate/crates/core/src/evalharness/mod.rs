//! Datasets, synthetic data, evaluation, smoothing sweeps, agreement maps and
//! timing benchmarks.

mod agreement;
mod bench;
mod dataset;
mod evaluate;
pub mod synth;

pub use agreement::{agreement_map, AgreementGrid, AgreementPoint};
pub use bench::{bench, BenchReport};
pub use dataset::{load_dataset, parse_labels, parse_probs, Dataset};
pub use evaluate::{
    evaluate, paired_difference, smooth_sweep, DecoderResult, EvalReport, SweepOptions, SweepPoint,
    SweepReport,
};
pub use synth::synth_generate;
