//! Score predictions under the built-in metrics and check which cost models
//! satisfy the reasonableness condition the node decoder relies on.

use hierdecode::metrics::{build_cost_matrix, check_reasonable, score};
use hierdecode::{CandidateSpace, CostMatrix, CostModel, Hierarchy, MetricKind, Orientation, Prediction};

fn main() -> hierdecode::Result<()> {
    let h = Hierarchy::parse_tsv("r\tA\nA\ta1\nA\ta2\nr\tb\n")?;
    let id = |s: &str| h.node_by_name(s).unwrap();
    let truth = id("a2");

    let metrics: Vec<MetricKind> = ["top1", "lca", "dl", "dlc:0.5", "wp", "zhao", "hf:1", "hamming", "jaccard"]
        .iter()
        .map(|s| s.parse())
        .collect::<hierdecode::Result<_>>()?;
    let preds = [
        Prediction::Node(id("a1")),
        Prediction::Node(id("A")),
        Prediction::node_set(&h, &[id("a1"), id("b")])?,
    ];
    println!("truth = a2");
    for m in &metrics {
        let model = CostModel::builtin(*m);
        let row: Vec<String> = preds
            .iter()
            .map(|p| match score(&model, &h, p, truth) {
                Ok(v) => format!("{:>8.3}", v),
                Err(_) => format!("{:>8}", "-"),
            })
            .collect();
        println!("{:<8} ({:?}) {}", m.to_string(), m.orientation(), row.join(" "));
    }

    for m in [MetricKind::Dl, MetricKind::WuPalmer, MetricKind::Zhao] {
        let model = build_cost_matrix(m, &h, CandidateSpace::Nodes)?;
        println!("{m}: {}", check_reasonable(&model, &h));
    }

    // Rewarding the root more than its children breaks the condition.
    let bad = CostMatrix::new(5, 3, vec![0.0, 0.0, 0.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0])?;
    let bad = CostModel::explicit(&h, bad, Orientation::Cost, CandidateSpace::Nodes)?;
    println!("root-favoring matrix: {}", check_reasonable(&bad, &h));
    print!("DL as text matrix:\n{}", build_cost_matrix(MetricKind::Dl, &h, CandidateSpace::Nodes)?.matrix().unwrap().to_text());
    Ok(())
}
