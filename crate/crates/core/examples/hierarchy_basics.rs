//! Build a hierarchy, push leaf probabilities up the tree and query its structure.

use hierdecode::{Hierarchy, LeafDistribution};

fn main() -> hierdecode::Result<()> {
    let h = Hierarchy::parse_tsv(
        "animal\tmammal\n\
         mammal\tcat\n\
         mammal\tdog\n\
         animal\tbird\n\
         bird\tcrow\n\
         bird\towl\n\
         animal\tfish\n",
    )?;
    println!(
        "{} nodes, {} leaves, max depth {}",
        h.node_count(),
        h.leaf_count(),
        h.max_depth()
    );
    println!("leaves: {:?}", h.leaf_names());

    let p = LeafDistribution::new(vec![0.30, 0.25, 0.20, 0.15, 0.10])?;
    let scores = h.aggregate(&p)?;
    for n in h.nodes() {
        println!(
            "{:<7} depth {} p = {:.2}  info = {:.3}",
            h.name(n),
            h.depth(n),
            scores.get(n),
            h.info(n)
        );
    }

    let cat = h.node_by_name("cat").unwrap();
    let owl = h.node_by_name("owl").unwrap();
    println!("lca(cat, owl) = {}", h.name(h.lca(cat, owl)));
    let path: Vec<&str> = h.ancestors(owl).map(|a| h.name(a)).collect();
    println!("ancestors of owl: {path:?}");

    // A stop leaf under `mammal` lets a classifier say "some other mammal".
    let mammal = h.node_by_name("mammal").unwrap();
    let g = h.augment_with_stop_nodes(&[mammal])?;
    println!("with stop node: {:?}", g.leaf_names());
    print!("{}", g.to_tsv());
    Ok(())
}
