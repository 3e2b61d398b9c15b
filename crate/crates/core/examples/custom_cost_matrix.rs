//! Decode under a user-supplied node-by-leaf cost matrix loaded from disk.

use hierdecode::decode_node::NodeDecoder;
use hierdecode::evalharness::synth::{random_reasonable_matrix, rng};
use hierdecode::metrics::check_reasonable;
use hierdecode::{CandidateSpace, CostMatrix, CostModel, Hierarchy, LeafDistribution, Orientation};

fn main() -> hierdecode::Result<()> {
    let h = Hierarchy::parse_tsv(
        "root\tvehicle\nvehicle\tcar\nvehicle\tbus\nroot\tanimal\nanimal\tdog\nanimal\tcat\n",
    )?;
    let dir = std::env::temp_dir().join("hierdecode-matrix-example");
    std::fs::create_dir_all(&dir)?;

    let m = random_reasonable_matrix(&mut rng(5), &h);
    let text = dir.join("costs.mat");
    m.write_text(&text)?;
    let bin = dir.join("costs.bin");
    std::fs::write(&bin, m.to_binary())?;
    let loaded = CostMatrix::read(&bin)?;
    assert_eq!(loaded, CostMatrix::read(&text)?);

    let model = CostModel::explicit(&h, loaded, Orientation::Cost, CandidateSpace::Nodes)?;
    println!("{}", check_reasonable(&model, &h));
    let d = NodeDecoder::new(&h, model)?;
    for row in [[0.7, 0.1, 0.1, 0.1], [0.3, 0.3, 0.2, 0.2], [0.25; 4]] {
        let p = LeafDistribution::new(row.to_vec())?;
        let r = d.decode_detailed(&h, &p)?;
        println!("{:?} -> {} (expected cost {:.3})", row, h.name(r.node), r.risk);
    }
    Ok(())
}
