//! Relative gap of heuristics to the optimal decoder as the predicted
//! distributions are mixed toward uniform.

use hierdecode::evalharness::synth::{random_tree_with_leaves, rng, synth_generate};
use hierdecode::evalharness::{smooth_sweep, SweepOptions};
use hierdecode::{Decoder, DecoderSpec, HeuristicKind, MetricKind};

fn main() -> hierdecode::Result<()> {
    let h = random_tree_with_leaves(&mut rng(3), 40, 4);
    let ds = synth_generate(&h, 2000, 0.2, 4)?;
    let metric = MetricKind::HfBeta(1.0);
    let decoders: Vec<Decoder> = [HeuristicKind::ArgmaxLeaf, HeuristicKind::TopDown, HeuristicKind::Majority]
        .iter()
        .map(|&k| Decoder::prepare(DecoderSpec::Heuristic(k), &h))
        .collect::<hierdecode::Result<_>>()?;
    let lambdas = [0.0, 0.2, 0.4, 0.6, 0.8];
    let report = smooth_sweep(&ds, metric, &decoders, &lambdas, SweepOptions { seed: 9, ..Default::default() })?;
    print!("{}", report.to_text());
    Ok(())
}
