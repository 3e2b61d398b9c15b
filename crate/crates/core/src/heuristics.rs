//! Baseline decoders from the hierarchical-classification literature.
//!
//! None of these is optimal for a given metric in general; they are what the
//! optimal decoders are compared against.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::decode_node::decode_leaf_bayes;
use crate::error::{Error, Result};
use crate::hierarchy::{Hierarchy, LeafDistribution, NodeId, NodeScores};
use crate::metrics::{CostModel, MetricKind};
use crate::prediction::Prediction;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum HeuristicKind {
    /// Most likely leaf.
    ArgmaxLeaf,
    /// Greedy descent through the most likely child.
    TopDown,
    /// Leaf maximizing `p(parent(l)) * p(l)`.
    HieSelf,
    /// Bayes-optimal leaf under the LCA-height cost.
    KarthikLeaf,
    /// `ConfidenceThreshold(0.5)`.
    Majority,
    /// Most informative node with `p(n) > tau`.
    ConfidenceThreshold(f64),
    /// Most informative node more likely than every non-ancestor.
    Plurality,
    /// Node maximizing `(I(n) + lambda) * p(n)`.
    Darts(f64),
    /// `Darts(0)`.
    ExpectedInfo,
}

impl HeuristicKind {
    pub const ALL_DEFAULT: [HeuristicKind; 8] = [
        HeuristicKind::ArgmaxLeaf,
        HeuristicKind::TopDown,
        HeuristicKind::HieSelf,
        HeuristicKind::KarthikLeaf,
        HeuristicKind::Majority,
        HeuristicKind::Plurality,
        HeuristicKind::Darts(0.5),
        HeuristicKind::ExpectedInfo,
    ];

    pub fn threshold(tau: f64) -> Result<Self> {
        if tau > 0.0 && tau <= 1.0 {
            Ok(HeuristicKind::ConfidenceThreshold(tau))
        } else {
            Err(Error::InvalidParam(format!("threshold must lie in (0, 1], got {tau}")))
        }
    }

    pub fn darts(lambda: f64) -> Result<Self> {
        if lambda >= 0.0 && lambda.is_finite() {
            Ok(HeuristicKind::Darts(lambda))
        } else {
            Err(Error::InvalidParam(format!("darts lambda must be >= 0, got {lambda}")))
        }
    }

    pub fn validate(self) -> Result<Self> {
        match self {
            HeuristicKind::ConfidenceThreshold(t) => Self::threshold(t),
            HeuristicKind::Darts(l) => Self::darts(l),
            k => Ok(k),
        }
    }

    /// Whether the output is always a leaf.
    pub fn predicts_leaves(self) -> bool {
        matches!(
            self,
            HeuristicKind::ArgmaxLeaf
                | HeuristicKind::TopDown
                | HeuristicKind::HieSelf
                | HeuristicKind::KarthikLeaf
        )
    }
}

impl fmt::Display for HeuristicKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HeuristicKind::ArgmaxLeaf => write!(f, "argmax"),
            HeuristicKind::TopDown => write!(f, "topdown"),
            HeuristicKind::HieSelf => write!(f, "hie-self"),
            HeuristicKind::KarthikLeaf => write!(f, "karthik"),
            HeuristicKind::Majority => write!(f, "majority"),
            HeuristicKind::ConfidenceThreshold(t) => write!(f, "threshold:{t}"),
            HeuristicKind::Plurality => write!(f, "plurality"),
            HeuristicKind::Darts(l) => write!(f, "darts:{l}"),
            HeuristicKind::ExpectedInfo => write!(f, "expinfo"),
        }
    }
}

impl FromStr for HeuristicKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let unknown = || Error::UnknownDecoder(s.to_string());
        let (name, param) = match s.split_once(':') {
            Some((n, p)) => (n, Some(p.parse::<f64>().map_err(|_| unknown())?)),
            None => (s, None),
        };
        match (name, param) {
            ("argmax", None) => Ok(HeuristicKind::ArgmaxLeaf),
            ("topdown", None) => Ok(HeuristicKind::TopDown),
            ("hie-self", None) => Ok(HeuristicKind::HieSelf),
            ("karthik", None) => Ok(HeuristicKind::KarthikLeaf),
            ("majority", None) => Ok(HeuristicKind::Majority),
            ("threshold", Some(t)) => Self::threshold(t),
            ("plurality", None) => Ok(HeuristicKind::Plurality),
            ("darts", Some(l)) => Self::darts(l),
            ("darts", None) => Ok(HeuristicKind::Darts(0.0)),
            ("expinfo", None) => Ok(HeuristicKind::ExpectedInfo),
            _ => Err(unknown()),
        }
    }
}

pub fn decode_heuristic(kind: HeuristicKind, h: &Hierarchy, p: &LeafDistribution) -> Result<Prediction> {
    let kind = kind.validate()?;
    let probs = p.probs();
    if kind == HeuristicKind::ArgmaxLeaf {
        if probs.len() != h.leaf_count() {
            return Err(Error::LengthMismatch {
                expected: h.leaf_count(),
                got: probs.len(),
            });
        }
        return Ok(Prediction::Leaf(h.leaf(p.argmax())));
    }
    if kind == HeuristicKind::KarthikLeaf {
        return decode_leaf_bayes(&CostModel::builtin(MetricKind::EtaLca), h, p);
    }
    let s = h.aggregate(p)?;
    Ok(match kind {
        HeuristicKind::TopDown => Prediction::Leaf(top_down(h, &s)),
        HeuristicKind::HieSelf => {
            let score = |l: NodeId| s.get(h.parent(l).unwrap_or(l)) * s.get(l);
            Prediction::Leaf(argmax_by(h.leaves().iter().copied(), score))
        }
        HeuristicKind::Majority => Prediction::Node(most_informative_above(h, &s, 0.5)),
        HeuristicKind::ConfidenceThreshold(t) => Prediction::Node(most_informative_above(h, &s, t)),
        HeuristicKind::Plurality => Prediction::Node(plurality(h, &s)),
        HeuristicKind::Darts(l) => Prediction::Node(darts(h, &s, l)),
        HeuristicKind::ExpectedInfo => Prediction::Node(darts(h, &s, 0.0)),
        HeuristicKind::ArgmaxLeaf | HeuristicKind::KarthikLeaf => unreachable!(),
    })
}

/// First maximizer in iteration order.
fn argmax_by(items: impl Iterator<Item = NodeId>, f: impl Fn(NodeId) -> f64) -> NodeId {
    let mut best: Option<(NodeId, f64)> = None;
    for n in items {
        let v = f(n);
        if best.map_or(true, |(_, b)| v > b) {
            best = Some((n, v));
        }
    }
    best.expect("non-empty candidate list").0
}

fn top_down(h: &Hierarchy, s: &NodeScores) -> NodeId {
    let mut cur = NodeId::ROOT;
    while !h.is_leaf(cur) {
        cur = argmax_by(h.children(cur).iter().copied(), |c| s.get(c));
    }
    cur
}

fn most_informative_above(h: &Hierarchy, s: &NodeScores, tau: f64) -> NodeId {
    let mut best = NodeId::ROOT;
    for n in h.nodes().skip(1) {
        if s.get(n) > tau && h.info(n) > h.info(best) {
            best = n;
        }
    }
    best
}

fn plurality(h: &Hierarchy, s: &NodeScores) -> NodeId {
    let mut sorted: Vec<NodeId> = h.nodes().collect();
    sorted.sort_by(|&a, &b| s.get(b).total_cmp(&s.get(a)).then(a.cmp(&b)));
    let mut best = NodeId::ROOT;
    let mut best_ok = false;
    for n in h.nodes() {
        // Ancestors of n form a chain of at most depth(n) + 1 nodes, so the
        // largest non-ancestor is among the first depth(n) + 2 entries.
        let rival = sorted.iter().find(|&&z| !h.is_ancestor(z, n));
        let ok = rival.map_or(true, |&z| s.get(n) > s.get(z));
        if ok && (!best_ok || h.info(n) > h.info(best)) {
            best = n;
            best_ok = true;
        }
    }
    best
}

fn darts(h: &Hierarchy, s: &NodeScores, lambda: f64) -> NodeId {
    argmax_by(h.nodes(), |n| (h.info(n) + lambda) * s.get(n))
}
