//! Optimal node-set decoding for the hierarchical F-score.
//!
//! A set prediction is scored through its ancestor-closed augmentation `H`.
//! For `|H| = k`, the expected score splits into per-node terms
//!
//! ```text
//! E[hF_beta(H)] = sum_{n in H} Delta_k(n),
//! Delta_k(n)    = sum_{l in L(n)} p(l) (1 + beta^2) / (k + beta^2 (d(l) + 1)),
//! ```
//!
//! and `Delta_k` never increases from parent to child, so the `k` largest
//! terms form an ancestor-closed set. The decoder tries every admissible `k`
//! and keeps the best.
//!
//! The search is restricted to nodes whose probability clears a per-node
//! threshold. [`q_set`] is the textbook set `p(n) >= 1/(1 + beta^2 (d_max(n)+1))`.
//! On trees whose leaves sit at different depths it can miss nodes of the
//! optimum, so the decoder searches [`search_set`] instead, a superset built
//! from the threshold
//!
//! ```text
//! (2 + beta^2 (d_min(n) + 1)) / ((2 + B)(1 + B)),   B = beta^2 (D + 1),
//! ```
//!
//! where `d_min(n)` is the shallowest leaf below `n` and `D` the deepest leaf
//! of the tree. On trees with all leaves at depth `D` both sets coincide.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hierarchy::{Hierarchy, LeafDistribution, NodeId, NodeScores};
use crate::prediction::Prediction;

/// Per-tree constants for one value of beta.
#[derive(Clone, Debug, PartialEq)]
pub struct HfBetaContext {
    beta: f64,
    q_thresholds: Vec<f64>,
    search_thresholds: Vec<f64>,
    n_max: usize,
}

impl HfBetaContext {
    pub fn new(h: &Hierarchy, beta: f64) -> Result<Self> {
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::InvalidParam(format!("beta must be > 0, got {beta}")));
        }
        let b2 = beta * beta;
        let d = f64::from(h.max_depth());
        let big_b = b2 * (d + 1.0);
        let q_thresholds = h
            .nodes()
            .map(|n| 1.0 / (1.0 + b2 * (f64::from(h.subtree_max_leaf_depth(n)) + 1.0)))
            .collect();
        let search_thresholds = h
            .nodes()
            .map(|n| {
                (2.0 + b2 * (f64::from(h.subtree_min_leaf_depth(n)) + 1.0))
                    / ((2.0 + big_b) * (1.0 + big_b))
            })
            .collect();
        let n_max = ((1.0 + big_b) * (d + 1.0)).floor() as usize;
        Ok(HfBetaContext {
            beta,
            q_thresholds,
            search_thresholds,
            n_max,
        })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// `1 / (1 + beta^2 (d_max(n) + 1))`.
    pub fn q_threshold(&self, n: NodeId) -> f64 {
        self.q_thresholds[n.index()]
    }

    pub fn search_threshold(&self, n: NodeId) -> f64 {
        self.search_thresholds[n.index()]
    }

    /// `(1 + beta^2 (D + 1)) (D + 1)`: no optimal augmented set is larger.
    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn decode(&self, h: &Hierarchy, p: &LeafDistribution) -> Result<Prediction> {
        Ok(self.decode_detailed(h, p)?.prediction)
    }

    pub fn decode_detailed(&self, h: &Hierarchy, p: &LeafDistribution) -> Result<HfBetaDecision> {
        let scores = h.aggregate(p)?;
        let q = pruned_set(h, &scores, &self.search_thresholds);
        let k_max = q.len().min(self.n_max).max(1);
        let table = delta_table(h, p, self.beta, &q, k_max);

        let depth_of = |i: usize| h.depth(q[i]);
        let mut order: Vec<usize> = (0..q.len()).collect();
        let mut best: Option<(f64, usize, Vec<NodeId>)> = None;
        for k in 1..=k_max {
            order.sort_unstable_by(|&a, &b| {
                table
                    .get(k, b)
                    .total_cmp(&table.get(k, a))
                    .then(depth_of(a).cmp(&depth_of(b)))
                    .then(q[a].cmp(&q[b]))
            });
            let utility: f64 = order[..k].iter().map(|&i| table.get(k, i)).sum();
            if best.as_ref().map_or(true, |b| utility > b.0) {
                let chosen: Vec<NodeId> = order[..k].iter().map(|&i| q[i]).collect();
                best = Some((utility, k, chosen));
            }
        }
        let (utility, k, chosen) = best.expect("k_max >= 1");
        debug_assert!(is_ancestor_closed(h, &chosen));
        Ok(HfBetaDecision {
            prediction: Prediction::from_augmented(h, &chosen),
            utility,
            k,
            search_size: q.len(),
        })
    }
}

/// Result of an hF_beta decode with diagnostics.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HfBetaDecision {
    pub prediction: Prediction,
    /// Expected hF_beta of the prediction.
    pub utility: f64,
    /// Size of the augmented prediction.
    pub k: usize,
    /// Number of nodes searched.
    pub search_size: usize,
}

/// Nodes with `p(n) >= 1/(1 + beta^2 (d_max(n) + 1))`, sorted by id.
pub fn q_set(h: &Hierarchy, p: &NodeScores, beta: f64) -> Vec<NodeId> {
    let b2 = beta * beta;
    let th: Vec<f64> = h
        .nodes()
        .map(|n| 1.0 / (1.0 + b2 * (f64::from(h.subtree_max_leaf_depth(n)) + 1.0)))
        .collect();
    pruned_set(h, p, &th)
}

/// The superset of [`q_set`] searched by the decoder, sorted by id.
pub fn search_set(h: &Hierarchy, p: &NodeScores, ctx: &HfBetaContext) -> Vec<NodeId> {
    pruned_set(h, p, &ctx.search_thresholds)
}

/// Root plus every node passing its threshold, stopping at the first failure
/// on each branch.
fn pruned_set(h: &Hierarchy, p: &NodeScores, thresholds: &[f64]) -> Vec<NodeId> {
    let mut out = vec![NodeId::ROOT];
    let mut i = 1;
    while i < h.node_count() {
        let n = NodeId(i as u32);
        if p.get(n) >= thresholds[i] {
            out.push(n);
            i += 1;
        } else {
            i = h.subtree(n).end;
        }
    }
    out
}

/// `Delta_k(n)` for `k` in `1..=k_max` and `n` in a node list.
#[derive(Clone, Debug, PartialEq)]
pub struct DeltaTable {
    nodes: Vec<NodeId>,
    k_max: usize,
    values: Vec<f64>,
}

impl DeltaTable {
    /// Value for `k` and the `i`-th node of the list.
    #[inline]
    pub fn get(&self, k: usize, i: usize) -> f64 {
        self.values[(k - 1) * self.nodes.len() + i]
    }

    pub fn value(&self, k: usize, n: NodeId) -> Option<f64> {
        let i = self.nodes.iter().position(|&m| m == n)?;
        Some(self.get(k, i))
    }

    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }
}

/// Builds the table from per-depth leaf masses of each listed node.
pub fn delta_table(
    h: &Hierarchy,
    p: &LeafDistribution,
    beta: f64,
    nodes: &[NodeId],
    k_max: usize,
) -> DeltaTable {
    let b2 = beta * beta;
    let depths = h.max_depth() as usize + 1;
    let mut mass = vec![0.0; nodes.len() * depths];
    for (i, &n) in nodes.iter().enumerate() {
        let row = &mut mass[i * depths..(i + 1) * depths];
        for l in h.leaf_span(n) {
            let pl = p.probs()[l];
            if pl != 0.0 {
                row[h.depth(h.leaf(l)) as usize] += pl;
            }
        }
    }
    let mut values = Vec::with_capacity(k_max * nodes.len());
    for k in 1..=k_max {
        let w: Vec<f64> = (0..depths)
            .map(|d| (1.0 + b2) / (k as f64 + b2 * (d as f64 + 1.0)))
            .collect();
        for i in 0..nodes.len() {
            let row = &mass[i * depths..(i + 1) * depths];
            values.push(row.iter().zip(&w).map(|(m, w)| m * w).sum());
        }
    }
    DeltaTable {
        nodes: nodes.to_vec(),
        k_max,
        values,
    }
}

/// Bayes-optimal antichain under hF_beta.
pub fn decode_hfbeta(h: &Hierarchy, p: &LeafDistribution, beta: f64) -> Result<Prediction> {
    HfBetaContext::new(h, beta)?.decode(h, p)
}

/// Guaranteed floor on the optimal expected score: `(1 + beta^2) / (1 + beta^2 (D + 1))`
/// with `D` the deepest leaf.
pub fn utility_lower_bound(h: &Hierarchy, beta: f64) -> f64 {
    let b2 = beta * beta;
    (1.0 + b2) / (1.0 + b2 * (f64::from(h.max_depth()) + 1.0))
}

fn is_ancestor_closed(h: &Hierarchy, set: &[NodeId]) -> bool {
    set.iter()
        .all(|&n| h.parent(n).map_or(true, |p| set.contains(&p)))
}
