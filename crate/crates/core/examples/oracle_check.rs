//! Cross-check the fast decoders against exhaustive search on a small random tree.

use hierdecode::decode_hfbeta::decode_hfbeta;
use hierdecode::evalharness::synth::{dirichlet, random_tree, rng};
use hierdecode::oracle::{brute_force_node, brute_force_set, count_antichains, expected_set_value};
use hierdecode::decode_node::NodeDecoder;
use hierdecode::{CandidateSpace, CostModel, MetricKind};

fn main() -> hierdecode::Result<()> {
    let mut r = rng(42);
    let h = random_tree(&mut r, 14);
    println!("{} nodes, {} leaves, {} antichains", h.node_count(), h.leaf_count(), count_antichains(&h)?);
    for trial in 0..5 {
        let p = dirichlet(&mut r, h.leaf_count(), 0.5)?;
        for kind in [MetricKind::Dl, MetricKind::WuPalmer, MetricKind::Zhao] {
            let model = CostModel::builtin_on(kind, CandidateSpace::Nodes)?;
            let fast = NodeDecoder::new(&h, model.clone())?.decode_detailed(&h, &p)?;
            let (best, risk) = brute_force_node(&model, &h, &p);
            println!(
                "trial {trial} {:<5} decoder {:>3} risk {:+.6} | oracle {:>3} risk {:+.6}",
                kind.to_string(),
                h.name(fast.node),
                fast.risk,
                h.name(best),
                risk
            );
        }
        let kind = MetricKind::HfBeta(1.0);
        let fast = decode_hfbeta(&h, &p, 1.0)?;
        let (ac, best) = brute_force_set(kind, &h, &p)?;
        println!(
            "trial {trial} hF    decoder {{{}}} {:.6} | oracle {:.6} ({} nodes)",
            fast.display(&h),
            expected_set_value(kind, &h, &fast.antichain(), &p),
            best,
            ac.len()
        );
    }
    Ok(())
}
