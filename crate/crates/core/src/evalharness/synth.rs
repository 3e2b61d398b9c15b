//! Synthetic trees and oracle-labeled datasets.
//!
//! Labels are drawn from each row's own distribution, so the rows are the
//! true posteriors and Bayes-optimal decoders are best in expectation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};

use super::Dataset;
use crate::error::{Error, Result};
use crate::hierarchy::{Hierarchy, LeafDistribution, NodeId};
use crate::metrics::CostMatrix;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Symmetric Dirichlet draw over `n` categories.
pub fn dirichlet<R: Rng>(rng: &mut R, n: usize, alpha: f64) -> Result<LeafDistribution> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidAlpha(alpha));
    }
    let gamma = Gamma::new(alpha, 1.0).map_err(|_| Error::InvalidAlpha(alpha))?;
    loop {
        let mut v: Vec<f64> = (0..n).map(|_| gamma.sample(rng)).collect();
        let sum: f64 = v.iter().sum();
        if sum > 0.0 && sum.is_finite() {
            v.iter_mut().for_each(|x| *x /= sum);
            return LeafDistribution::new(v);
        }
    }
}

/// Leaf position drawn from `p`.
pub fn sample_leaf<R: Rng>(rng: &mut R, p: &LeafDistribution) -> usize {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    let mut last = 0;
    for (i, &v) in p.probs().iter().enumerate() {
        if v > 0.0 {
            acc += v;
            last = i;
            if u < acc {
                return i;
            }
        }
    }
    last
}

/// `n` Dirichlet(`alpha`) rows with labels sampled from each row.
pub fn synth_generate(h: &Hierarchy, n: usize, alpha: f64, seed: u64) -> Result<Dataset> {
    if n == 0 {
        return Err(Error::InvalidParam("sample count must be >= 1".into()));
    }
    let mut rng = rng(seed);
    let mut rows = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for _ in 0..n {
        let p = dirichlet(&mut rng, h.leaf_count(), alpha)?;
        labels.push(h.leaf(sample_leaf(&mut rng, &p)));
        rows.push(p);
    }
    Dataset::new(h.clone(), rows, Some(labels))
}

/// Random recursive tree: node `i` attaches to a uniformly chosen earlier node.
pub fn random_tree<R: Rng>(rng: &mut R, nodes: usize) -> Hierarchy {
    let nodes = nodes.max(2);
    let parents: Vec<Option<usize>> = std::iter::once(None)
        .chain((1..nodes).map(|i| Some(rng.gen_range(0..i))))
        .collect();
    Hierarchy::from_parent_list(&parents).expect("generated tree is valid")
}

/// Random tree with `leaves` leaves where every internal node has between 2
/// and `max_children` children, built by repeatedly merging runs of sibling
/// candidates under a new parent.
pub fn random_tree_with_leaves<R: Rng>(rng: &mut R, leaves: usize, max_children: usize) -> Hierarchy {
    let leaves = leaves.max(2);
    let max_children = max_children.max(2);
    let mut parent: Vec<Option<usize>> = vec![None; leaves];
    let mut frontier: Vec<usize> = (0..leaves).collect();
    while frontier.len() > 1 {
        let k = rng.gen_range(2..=max_children.min(frontier.len()));
        let start = rng.gen_range(0..=frontier.len() - k);
        let new = parent.len();
        parent.push(None);
        for &c in &frontier[start..start + k] {
            parent[c] = Some(new);
        }
        frontier.splice(start..start + k, [new]);
    }
    from_arbitrary_parents(&parent)
}

/// Complete tree with the given branching factor and leaf depth.
pub fn balanced_tree(branching: usize, depth: u32) -> Hierarchy {
    let mut parents = vec![None];
    let mut level = vec![0usize];
    for _ in 0..depth {
        let mut next = Vec::with_capacity(level.len() * branching);
        for &p in &level {
            for _ in 0..branching {
                next.push(parents.len());
                parents.push(Some(p));
            }
        }
        level = next;
    }
    Hierarchy::from_parent_list(&parents).expect("generated tree is valid")
}

/// Deterministic tree with 843 nodes, 608 leaves, leaf depth up to 12 and at
/// least two children per internal node.
pub fn table1_shaped_tree(seed: u64) -> Hierarchy {
    shaped_tree(&mut rng(seed), 843, 608, 12)
}

/// Tree with exactly `nodes` nodes, `leaves` leaves, maximum leaf depth
/// `depth` and at least two children per internal node.
///
/// Panics when the shape is infeasible (`nodes - leaves < depth` or too few
/// leaves to give every internal node two children).
pub fn shaped_tree<R: Rng>(rng: &mut R, nodes: usize, leaves: usize, depth: usize) -> Hierarchy {
    let internal = nodes - leaves;
    assert!(internal >= depth && depth >= 1, "infeasible shape");
    // Spine guarantees the depth; other internal nodes hang anywhere above it.
    let mut parents: Vec<Option<usize>> = vec![None];
    let mut node_depth = vec![0usize];
    for d in 1..depth {
        parents.push(Some(d - 1));
        node_depth.push(d);
    }
    while parents.len() < internal {
        let eligible: Vec<usize> = (0..parents.len()).filter(|&i| node_depth[i] + 1 < depth).collect();
        let p = eligible[rng.gen_range(0..eligible.len())];
        node_depth.push(node_depth[p] + 1);
        parents.push(Some(p));
    }
    let mut child_count = vec![0usize; internal];
    for p in parents.iter().flatten() {
        child_count[*p] += 1;
    }
    let mut leaf_parents = Vec::with_capacity(leaves);
    for (i, &c) in child_count.iter().enumerate() {
        leaf_parents.extend(std::iter::repeat(i).take(2usize.saturating_sub(c)));
    }
    assert!(leaf_parents.len() <= leaves, "infeasible shape");
    while leaf_parents.len() < leaves {
        leaf_parents.push(rng.gen_range(0..internal));
    }
    leaf_parents.sort_unstable();
    parents.extend(leaf_parents.into_iter().map(Some));
    from_arbitrary_parents(&parents)
}

/// Parent list in any order (the root is the unique `None`).
fn from_arbitrary_parents(parents: &[Option<usize>]) -> Hierarchy {
    let edges: Vec<(String, String)> = parents
        .iter()
        .enumerate()
        .filter_map(|(i, p)| p.map(|p| (format!("n{p}"), format!("n{i}"))))
        .collect();
    Hierarchy::build_from_edges(&edges).expect("generated tree is valid")
}

/// Mixes a row toward the uniform distribution.
pub fn smooth(p: &LeafDistribution, lambda: f64) -> LeafDistribution {
    let u = 1.0 / p.len() as f64;
    let v = p.probs().iter().map(|&x| (1.0 - lambda) * x + lambda * u).collect();
    LeafDistribution::new(v).expect("convex combination of distributions")
}

/// Leaves drawn from the given rows.
pub fn resample_labels<R: Rng>(rng: &mut R, h: &Hierarchy, rows: &[LeafDistribution]) -> Vec<NodeId> {
    rows.iter().map(|p| h.leaf(sample_leaf(rng, p))).collect()
}

/// Random strictly reasonable node-by-leaf cost matrix.
///
/// `C(n, l) = c_l + sum over edges e on the path root -> n of s(e, l)`, with
/// `s(e, l) = -u` when `e` also leads to `l` and `+v` otherwise (`u, v > 0`
/// drawn per edge and leaf), so every node-parent difference has the required
/// sign.
pub fn random_reasonable_matrix<R: Rng>(rng: &mut R, h: &Hierarchy) -> CostMatrix {
    let (nn, nl) = (h.node_count(), h.leaf_count());
    let offset: Vec<f64> = (0..nl).map(|_| rng.gen_range(0.0..5.0)).collect();
    let mut data = vec![0.0; nn * nl];
    data[..nl].copy_from_slice(&offset);
    for n in h.nodes().skip(1) {
        let parent = h.parent(n).unwrap().index();
        for l in 0..nl {
            let step = if h.covers_leaf(n, l) {
                -rng.gen_range(0.05..2.0)
            } else {
                rng.gen_range(0.05..2.0)
            };
            data[n.index() * nl + l] = data[parent * nl + l] + step;
        }
    }
    CostMatrix::new(nn, nl, data).expect("shape matches")
}
