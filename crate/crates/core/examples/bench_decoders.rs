//! Decode latency and candidate-set sizes on a 9841-node balanced tree.
//!
//! Run with `--release` for meaningful timings.

use hierdecode::decode_node::{decode_exhaustive, NodeDecoder};
use hierdecode::evalharness::bench;
use hierdecode::evalharness::synth::{balanced_tree, dirichlet, rng};
use hierdecode::{CandidateSpace, CostModel, Decoder, DecoderSpec, MetricKind};

fn main() -> hierdecode::Result<()> {
    let h = balanced_tree(3, 8);
    println!("{} nodes, {} leaves", h.node_count(), h.leaf_count());
    for m in ["dl", "wp", "zhao", "hf:1", "hf:2"] {
        let spec = DecoderSpec::Optimal(m.parse()?);
        // Budget 0 keeps built-in metrics in closed form instead of a dense matrix.
        let d = Decoder::prepare_with_budget(spec, &h, 0)?;
        print!("{}", bench(&h, &d, 100, 1.0, 0)?.to_text());
    }
    let d = Decoder::prepare(DecoderSpec::Heuristic("argmax".parse()?), &h)?;
    print!("{}", bench(&h, &d, 100, 1.0, 0)?.to_text());

    let model = CostModel::builtin_on(MetricKind::WuPalmer, CandidateSpace::Nodes)?;
    let pruned = NodeDecoder::with_budget(&h, model.clone(), 0)?;
    let p = dirichlet(&mut rng(1), h.leaf_count(), 1.0)?;
    let t = std::time::Instant::now();
    let a = pruned.decode_detailed(&h, &p)?;
    let fast = t.elapsed();
    let t = std::time::Instant::now();
    let b = decode_exhaustive(&model, &h, &p)?;
    let slow = t.elapsed();
    println!(
        "wp pruned {:?} ({} candidates) vs exhaustive {:?}; same risk: {}",
        fast,
        a.candidates,
        slow,
        (a.risk - b.risk).abs() < 1e-12
    );
    Ok(())
}
