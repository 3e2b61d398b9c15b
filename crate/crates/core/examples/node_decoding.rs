//! Bayes-optimal single-node predictions for tree-distance, Wu-Palmer and
//! Zhao, with the pruned candidate set that makes them fast.

use hierdecode::decode_node::{decode_threshold_closed_form, find_candidate_set, NodeDecoder};
use hierdecode::{Hierarchy, LeafDistribution, MetricKind};

fn main() -> hierdecode::Result<()> {
    let h = Hierarchy::parse_tsv(
        "root\tvehicle\nvehicle\tcar\nvehicle\tbus\nvehicle\ttruck\n\
         root\tanimal\nanimal\tdog\nanimal\tcat\n",
    )?;
    let rows = [
        vec![0.50, 0.10, 0.05, 0.20, 0.15],
        vec![0.30, 0.25, 0.25, 0.10, 0.10],
        vec![0.20, 0.15, 0.15, 0.25, 0.25],
        vec![0.05, 0.05, 0.05, 0.45, 0.40],
    ];
    let kinds = [MetricKind::Dl, MetricKind::Dlc(0.5), MetricKind::WuPalmer, MetricKind::Zhao];
    let decoders: Vec<NodeDecoder> = kinds
        .iter()
        .map(|&k| NodeDecoder::for_metric(&h, k))
        .collect::<hierdecode::Result<_>>()?;

    for row in rows {
        let p = LeafDistribution::new(row)?;
        println!("p = {:?}", p.probs());
        let scores = h.aggregate(&p)?;
        for (k, d) in kinds.iter().zip(&decoders) {
            let r = d.decode_detailed(&h, &p)?;
            let cands: Vec<&str> = find_candidate_set(&h, &scores, d.thresholds())
                .iter()
                .map(|&n| h.name(n))
                .collect();
            println!(
                "  {:<8} -> {:<8} risk {:>7.4}  candidates {:?}",
                k.to_string(),
                h.name(r.node),
                r.risk,
                cands
            );
        }
        // Tree distance also has a closed form: the deepest node with p(n) > 1/2.
        let cf = decode_threshold_closed_form(&h, &p, 0.5)?;
        println!("  closed form (tau = 1/2) -> {}", cf.display(&h));
    }
    Ok(())
}
