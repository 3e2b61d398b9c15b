//! Optimal single-node decoding for hierarchically reasonable costs.
//!
//! For every non-root node `n` the node-parent differences
//! `delta(n, l) = C(n, l) - C(parent(n), l)` give four constants from which two
//! probability thresholds follow:
//!
//! * `p(n) > q_max(n)` rules out the parent of `n`,
//! * `p(n) < q_min(n)` rules out `n` itself.
//!
//! [`find_candidate_set`] applies both rules in a single pre-order pass. Because
//! node probabilities never increase from parent to child, a node whose
//! probability falls below the smallest `q_min` takes its whole subtree with
//! it. The surviving set is small (at most `(d_max + 1) / q_min_floor` nodes in
//! the strict variant), and the optimum is found by evaluating the risk of the
//! survivors only.
//!
//! The rooted variant accepts metrics whose node-parent difference vanishes
//! whenever the lowest common ancestor is the root (Wu-Palmer, Zhao). The
//! constants are then taken over the leaves of `a_n`, the child of the root
//! above `n`, and thresholds are scaled by `p(a_n)`.
//!
//! Gain metrics are handled in cost form: differences and risks use the
//! negated values.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hierarchy::{Hierarchy, LeafDistribution, NodeId, NodeScores};
use crate::metrics::{
    build_cost_matrix, CandidateSpace, CostModel, CostSource, MetricKind, EQUALITY_EPS, STRICT_EPS,
};
use crate::prediction::Prediction;

/// Largest `|N| * |L|` for which built-in metrics are materialized as a dense
/// matrix before decoding.
pub const DEFAULT_MATRIX_BUDGET: usize = 200_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Variant {
    Strict,
    Rooted,
}

/// Per-node pruning thresholds. Reusable across queries.
#[derive(Clone, Debug, PartialEq)]
pub struct Thresholds {
    variant: Variant,
    q_min: Vec<f64>,
    q_max: Vec<f64>,
    /// Whether the node has at least one leaf on the "outside" of its
    /// comparison set. Nodes without one get `q_min = q_max = 0`.
    constrained: Vec<bool>,
    anchor: Vec<NodeId>,
    q_min_floor: f64,
}

impl Thresholds {
    pub fn variant(&self) -> Variant {
        self.variant
    }

    /// `q_min(n)`; 0 for the root.
    pub fn q_min(&self, n: NodeId) -> f64 {
        self.q_min[n.index()]
    }

    /// `q_max(n)`; 0 for the root.
    pub fn q_max(&self, n: NodeId) -> f64 {
        self.q_max[n.index()]
    }

    pub fn is_constrained(&self, n: NodeId) -> bool {
        self.constrained[n.index()]
    }

    /// Shallowest ancestor whose leaf set is not all of `L` (rooted variant);
    /// the root otherwise.
    pub fn anchor(&self, n: NodeId) -> NodeId {
        self.anchor[n.index()]
    }

    /// Smallest `q_min` over constrained nodes, 1 if there are none.
    pub fn q_min_floor(&self) -> f64 {
        self.q_min_floor
    }

    /// Upper bound on the candidate-set size, `(d_max + 1) / q_min_floor`.
    pub fn candidate_bound(&self, h: &Hierarchy) -> f64 {
        f64::from(h.max_depth() + 1) / self.q_min_floor
    }

    #[inline]
    fn scale(&self, p: &NodeScores, n: NodeId) -> f64 {
        match self.variant {
            Variant::Strict => 1.0,
            Variant::Rooted => p.get(self.anchor[n.index()]),
        }
    }
}

/// Computes the thresholds of a node-space cost model.
///
/// Fails with [`Error::NotReasonable`] and a witness pair when a node-parent
/// difference has the wrong sign. Differences of exactly zero on leaves below
/// `n` are accepted (the parent-pruning threshold then degenerates to 1); in
/// the rooted variant, differences on leaves whose LCA with `n` is the root
/// must vanish within `1e-9`.
pub fn compute_thresholds(model: &CostModel, h: &Hierarchy, variant: Variant) -> Result<Thresholds> {
    if model.space != CandidateSpace::Nodes {
        return Err(Error::SpaceMismatch(format!(
            "thresholds need a node-space model, got {:?}",
            model.space
        )));
    }
    let mut anchor = vec![NodeId::ROOT; h.node_count()];
    if variant == Variant::Rooted {
        for n in h.nodes().skip(1) {
            let p = h.parent(n).unwrap();
            let top = h.leaf_span(p).len() == h.leaf_count();
            anchor[n.index()] = if top { n } else { anchor[p.index()] };
        }
    }
    let per_node: Vec<(f64, f64, bool)> = h
        .nodes()
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|n| node_constants(model, h, n, variant, anchor[n.index()]))
        .collect::<Result<_>>()?;

    let mut q_min = Vec::with_capacity(per_node.len());
    let mut q_max = Vec::with_capacity(per_node.len());
    let mut constrained = Vec::with_capacity(per_node.len());
    let mut q_min_floor = f64::INFINITY;
    for (lo, hi, c) in per_node {
        if c {
            q_min_floor = q_min_floor.min(lo);
        }
        q_min.push(lo);
        q_max.push(hi);
        constrained.push(c);
    }
    if !q_min_floor.is_finite() {
        q_min_floor = 1.0;
    }
    Ok(Thresholds {
        variant,
        q_min,
        q_max,
        constrained,
        anchor,
        q_min_floor,
    })
}

fn node_constants(
    model: &CostModel,
    h: &Hierarchy,
    n: NodeId,
    variant: Variant,
    anchor: NodeId,
) -> Result<(f64, f64, bool)> {
    let Some(parent) = h.parent(n) else {
        return Ok((0.0, 0.0, false));
    };
    let inside = h.leaf_span(n);
    let outer = match variant {
        Variant::Strict => 0..h.leaf_count(),
        Variant::Rooted => h.leaf_span(anchor),
    };
    // A node whose cost row equals its parent's (a unary chain under an
    // information-based metric) ties with the parent everywhere: never a
    // candidate, never a reason to drop the parent.
    if (0..h.leaf_count()).all(|l| (model.cost(h, n, l) - model.cost(h, parent, l)).abs() <= EQUALITY_EPS) {
        return Ok((f64::INFINITY, f64::INFINITY, false));
    }
    let witness = |l: usize| Error::NotReasonable {
        node: n.index(),
        leaf: h.leaf(l).index(),
    };
    // m_n, M_n: smallest and largest improvement on leaves below n.
    let (mut m_in, mut big_m_in) = (f64::INFINITY, f64::NEG_INFINITY);
    // m_bar, M_bar: smallest and largest loss on leaves outside.
    let (mut m_out, mut big_m_out) = (f64::INFINITY, f64::NEG_INFINITY);
    for l in 0..h.leaf_count() {
        let raw = model.cost(h, n, l) - model.cost(h, parent, l);
        let delta = if raw.abs() < STRICT_EPS { 0.0 } else { raw };
        if inside.contains(&l) {
            if delta > 0.0 {
                return Err(witness(l));
            }
            m_in = m_in.min(-delta);
            big_m_in = big_m_in.max(-delta);
        } else if outer.contains(&l) {
            if delta <= 0.0 {
                return Err(witness(l));
            }
            m_out = m_out.min(delta);
            big_m_out = big_m_out.max(delta);
        } else if raw.abs() > EQUALITY_EPS {
            return Err(witness(l));
        }
    }
    if !m_out.is_finite() {
        return Ok((0.0, 0.0, false));
    }
    let q_min = m_out / (m_out + big_m_in);
    let q_max = big_m_out / (big_m_out + m_in);
    Ok((q_min, q_max, true))
}

/// Nodes surviving threshold pruning, sorted by id. Always contains a risk
/// minimizer.
pub fn find_candidate_set(h: &Hierarchy, p: &NodeScores, t: &Thresholds) -> Vec<NodeId> {
    let n_nodes = h.node_count();
    let mut keep = vec![false; n_nodes];
    keep[0] = true;
    let mut i = 1;
    while i < n_nodes {
        let n = NodeId(i as u32);
        let parent = h.parent(n).unwrap();
        let scale = t.scale(p, n);
        let pn = p.get(n);
        if t.variant == Variant::Rooted && scale == 0.0 {
            // Every node below a massless top-level node ties with the root.
            i = h.subtree(n).end;
            continue;
        }
        if pn > t.q_max(n) * scale {
            keep[parent.index()] = false;
        }
        if pn < t.q_min_floor * scale {
            i = h.subtree(n).end;
            continue;
        }
        keep[i] = !(pn < t.q_min(n) * scale);
        i += 1;
    }
    (0..n_nodes)
        .filter(|&i| keep[i])
        .map(|i| NodeId(i as u32))
        .collect()
}

/// Expected cost of predicting `n` (negated expected gain for gain metrics).
#[inline]
pub fn node_risk(model: &CostModel, h: &Hierarchy, n: NodeId, probs: &[f64]) -> f64 {
    model.orientation.cost_sign() * model.expected(h, n, probs)
}

fn argmin_risk(
    model: &CostModel,
    h: &Hierarchy,
    cands: impl IntoIterator<Item = NodeId>,
    probs: &[f64],
) -> (NodeId, f64) {
    let mut best = (NodeId::ROOT, f64::INFINITY);
    for n in cands {
        let r = node_risk(model, h, n, probs);
        if r < best.1 {
            best = (n, r);
        }
    }
    best
}

/// Scans every node with the same risk evaluation as the pruned decoder.
pub fn decode_exhaustive(model: &CostModel, h: &Hierarchy, p: &LeafDistribution) -> Result<NodeDecision> {
    if p.len() != h.leaf_count() {
        return Err(Error::LengthMismatch {
            expected: h.leaf_count(),
            got: p.len(),
        });
    }
    let (node, risk) = argmin_risk(model, h, h.nodes(), p.probs());
    Ok(NodeDecision {
        node,
        risk,
        candidates: h.node_count(),
    })
}

/// Bayes-optimal node under a reasonable cost, given precomputed thresholds.
/// Ties go to the smallest id.
pub fn decode_reasonable(
    model: &CostModel,
    h: &Hierarchy,
    p: &LeafDistribution,
    t: &Thresholds,
) -> Result<Prediction> {
    let scores = h.aggregate(p)?;
    let s = find_candidate_set(h, &scores, t);
    Ok(Prediction::Node(argmin_risk(model, h, s, p.probs()).0))
}

/// Result of a single node decode with diagnostics.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NodeDecision {
    pub node: NodeId,
    /// Expected cost in cost orientation.
    pub risk: f64,
    pub candidates: usize,
}

/// A node-space cost model prepared for repeated decoding.
#[derive(Clone, Debug)]
pub struct NodeDecoder {
    model: CostModel,
    thresholds: Thresholds,
}

impl NodeDecoder {
    /// Picks the strict variant when possible, the rooted one otherwise.
    pub fn new(h: &Hierarchy, model: CostModel) -> Result<Self> {
        Self::with_budget(h, model, DEFAULT_MATRIX_BUDGET)
    }

    /// Like [`NodeDecoder::new`]; built-in metrics are materialized when
    /// `|N| * |L| <= budget`.
    pub fn with_budget(h: &Hierarchy, model: CostModel, budget: usize) -> Result<Self> {
        let model = match model.source {
            CostSource::Builtin(k) if h.node_count().saturating_mul(h.leaf_count()) <= budget => {
                build_cost_matrix(k, h, model.space)?
            }
            _ => model,
        };
        let thresholds = match compute_thresholds(&model, h, Variant::Strict) {
            Ok(t) => t,
            Err(Error::NotReasonable { .. }) => compute_thresholds(&model, h, Variant::Rooted)?,
            Err(e) => return Err(e),
        };
        Ok(NodeDecoder { model, thresholds })
    }

    pub fn with_variant(h: &Hierarchy, model: CostModel, variant: Variant) -> Result<Self> {
        let thresholds = compute_thresholds(&model, h, variant)?;
        Ok(NodeDecoder { model, thresholds })
    }

    pub fn for_metric(h: &Hierarchy, kind: MetricKind) -> Result<Self> {
        Self::new(h, CostModel::builtin_on(kind, CandidateSpace::Nodes)?)
    }

    pub fn model(&self) -> &CostModel {
        &self.model
    }

    pub fn thresholds(&self) -> &Thresholds {
        &self.thresholds
    }

    pub fn decode(&self, h: &Hierarchy, p: &LeafDistribution) -> Result<Prediction> {
        Ok(Prediction::Node(self.decode_detailed(h, p)?.node))
    }

    pub fn decode_detailed(&self, h: &Hierarchy, p: &LeafDistribution) -> Result<NodeDecision> {
        let scores = h.aggregate(p)?;
        let s = find_candidate_set(h, &scores, &self.thresholds);
        let candidates = s.len();
        let (node, risk) = argmin_risk(&self.model, h, s, p.probs());
        Ok(NodeDecision {
            node,
            risk,
            candidates,
        })
    }
}

/// Deepest node with `p(n) > tau`, the root when no other node qualifies.
///
/// Optimal for DL at `tau = 1/2` and for DL_c at `tau = (1 + c) / 2`.
pub fn decode_threshold_closed_form(h: &Hierarchy, p: &LeafDistribution, tau: f64) -> Result<Prediction> {
    if !(0.5..=1.0).contains(&tau) {
        return Err(Error::InvalidTau(tau));
    }
    let scores = h.aggregate(p)?;
    Ok(Prediction::Node(deepest_above(h, &scores, tau)))
}

/// Walks down from the root while some child exceeds `tau` (at most one can
/// when `tau >= 1/2`; the smallest id wins exact ties).
pub(crate) fn deepest_above(h: &Hierarchy, scores: &NodeScores, tau: f64) -> NodeId {
    let mut cur = NodeId::ROOT;
    while let Some(&next) = h.children(cur).iter().find(|&&c| scores.get(c) > tau) {
        cur = next;
    }
    cur
}

/// Bayes-optimal leaf. Top1 reduces to the argmax; for the LCA-height cost
/// the argmax is returned directly when it carries more than half the mass.
pub fn decode_leaf_bayes(model: &CostModel, h: &Hierarchy, p: &LeafDistribution) -> Result<Prediction> {
    if p.len() != h.leaf_count() {
        return Err(Error::LengthMismatch {
            expected: h.leaf_count(),
            got: p.len(),
        });
    }
    if matches!(model.source, CostSource::Matrix(_)) && model.space != CandidateSpace::Leaves {
        return Err(Error::SpaceMismatch("leaf decoding needs a leaf-space model".into()));
    }
    let argmax = h.leaf(p.argmax());
    match model.kind() {
        Some(MetricKind::Top1) => return Ok(Prediction::Leaf(argmax)),
        Some(MetricKind::EtaLca) if p.probs()[p.argmax()] > 0.5 => return Ok(Prediction::Leaf(argmax)),
        _ => {}
    }
    let (leaf, _) = argmin_risk(model, h, h.leaves().iter().copied(), p.probs());
    Ok(Prediction::Leaf(leaf))
}
