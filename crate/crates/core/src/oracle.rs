//! Brute-force reference implementations.
//!
//! Everything here recomputes depths, ancestors and metric values from the
//! parent pointers alone, so it can be used to check the fast decoders.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::hierarchy::{Hierarchy, LeafDistribution, NodeId};
use crate::metrics::{CostModel, CostSource, MetricKind};

/// Largest tree accepted by the antichain enumerators.
pub const ENUMERATION_LIMIT: usize = 25;

/// Structure recomputed by walking parent pointers.
struct Naive<'a> {
    h: &'a Hierarchy,
    depth: Vec<u32>,
    leaf_count: Vec<usize>,
    /// Max leaf depth below each node.
    deepest: Vec<u32>,
}

impl<'a> Naive<'a> {
    fn new(h: &'a Hierarchy) -> Self {
        let n = h.node_count();
        let mut depth = vec![0; n];
        for (i, d) in depth.iter_mut().enumerate() {
            let mut cur = NodeId(i as u32);
            while let Some(p) = h.parent(cur) {
                *d += 1;
                cur = p;
            }
        }
        let mut leaf_count = vec![0; n];
        let mut deepest = vec![0; n];
        for i in 0..n {
            let leaf = NodeId(i as u32);
            if !h.children(leaf).is_empty() {
                continue;
            }
            let mut cur = Some(leaf);
            while let Some(a) = cur {
                leaf_count[a.index()] += 1;
                deepest[a.index()] = deepest[a.index()].max(depth[i]);
                cur = h.parent(a);
            }
        }
        Naive {
            h,
            depth,
            leaf_count,
            deepest,
        }
    }

    fn chain(&self, n: NodeId) -> Vec<NodeId> {
        let mut out = vec![n];
        let mut cur = n;
        while let Some(p) = self.h.parent(cur) {
            out.push(p);
            cur = p;
        }
        out
    }

    fn lca(&self, a: NodeId, b: NodeId) -> NodeId {
        let (mut a, mut b) = (a, b);
        while self.depth[a.index()] > self.depth[b.index()] {
            a = self.h.parent(a).unwrap();
        }
        while self.depth[b.index()] > self.depth[a.index()] {
            b = self.h.parent(b).unwrap();
        }
        while a != b {
            a = self.h.parent(a).unwrap();
            b = self.h.parent(b).unwrap();
        }
        a
    }

    fn info(&self, n: NodeId) -> f64 {
        (self.leaf_count[0] as f64 / self.leaf_count[n.index()] as f64).ln()
    }

    fn d(&self, n: NodeId) -> f64 {
        f64::from(self.depth[n.index()])
    }

    /// Pair metric value straight from its definition.
    fn pair(&self, kind: MetricKind, n: NodeId, y: NodeId) -> f64 {
        let a = self.lca(n, y);
        match kind {
            MetricKind::Top1 => {
                if n == y {
                    0.0
                } else {
                    1.0
                }
            }
            MetricKind::EtaLca => f64::from(self.deepest[a.index()] - self.depth[a.index()]),
            MetricKind::Dl => self.d(n) + self.d(y) - 2.0 * self.d(a),
            MetricKind::Dlc(c) => self.d(n) + self.d(y) - 2.0 * self.d(a) + c * self.d(n),
            MetricKind::WuPalmer => {
                let den = self.d(n) + self.d(y);
                if den == 0.0 {
                    1.0
                } else {
                    2.0 * self.d(a) / den
                }
            }
            MetricKind::Zhao => {
                let den = self.info(n) + self.info(y);
                if den == 0.0 {
                    1.0
                } else {
                    2.0 * self.info(a) / den
                }
            }
            MetricKind::HfBeta(_) | MetricKind::Hamming | MetricKind::Jaccard => {
                self.set(kind, &self.chain(n), y)
            }
        }
    }

    /// Set metric of an augmented set, via precision and recall.
    fn set(&self, kind: MetricKind, aug: &[NodeId], y: NodeId) -> f64 {
        let y_aug = self.chain(y);
        let inter = aug.iter().filter(|a| y_aug.contains(a)).count() as f64;
        let (hs, ys) = (aug.len() as f64, y_aug.len() as f64);
        match kind {
            MetricKind::HfBeta(beta) => {
                let (prec, rec) = (inter / hs, inter / ys);
                if prec + rec == 0.0 {
                    0.0
                } else {
                    let b2 = beta * beta;
                    (1.0 + b2) * prec * rec / (b2 * prec + rec)
                }
            }
            MetricKind::Hamming => (hs - inter + ys - inter) / ys,
            MetricKind::Jaccard => inter / (hs + ys - inter),
            _ => unreachable!(),
        }
    }

    fn augment(&self, antichain: &[NodeId]) -> Vec<NodeId> {
        let mut set: Vec<NodeId> = antichain.iter().flat_map(|&n| self.chain(n)).collect();
        set.sort_unstable();
        set.dedup();
        set
    }
}

/// Exact risk minimizer over all nodes, ties to the smallest id. The risk is
/// reported in cost orientation (negated expected gain for gain models).
pub fn brute_force_node(model: &CostModel, h: &Hierarchy, p: &LeafDistribution) -> (NodeId, f64) {
    brute_force_among(model, h, p, false)
}

/// Like [`brute_force_node`] but restricted to leaves.
pub fn brute_force_leaf(model: &CostModel, h: &Hierarchy, p: &LeafDistribution) -> (NodeId, f64) {
    brute_force_among(model, h, p, true)
}

fn brute_force_among(
    model: &CostModel,
    h: &Hierarchy,
    p: &LeafDistribution,
    leaves_only: bool,
) -> (NodeId, f64) {
    let naive = Naive::new(h);
    let sign = model.orientation.cost_sign();
    let probs = p.probs();
    let leaves: Vec<NodeId> = (0..h.node_count())
        .map(|i| NodeId(i as u32))
        .filter(|&n| h.children(n).is_empty())
        .collect();
    let mut best = (NodeId::ROOT, f64::INFINITY);
    for i in 0..h.node_count() {
        let n = NodeId(i as u32);
        let row = if leaves_only {
            match leaves.iter().position(|&l| l == n) {
                Some(r) => r,
                None => continue,
            }
        } else {
            i
        };
        let mut risk = 0.0;
        for (j, &y) in leaves.iter().enumerate() {
            if probs[j] == 0.0 {
                continue;
            }
            let v = match &model.source {
                CostSource::Builtin(k) => naive.pair(*k, n, y),
                CostSource::Matrix(m) => m.get(row, j),
            };
            risk += probs[j] * v;
        }
        risk *= sign;
        if risk < best.1 {
            best = (n, risk);
        }
    }
    best
}

/// Streams every nonempty antichain of a tree, each exactly once, with
/// members sorted by id.
pub struct AntichainIter<'a> {
    h: &'a Hierarchy,
    cur: Vec<NodeId>,
    stack: Vec<(usize, usize)>,
}

impl Iterator for AntichainIter<'_> {
    type Item = Vec<NodeId>;

    fn next(&mut self) -> Option<Vec<NodeId>> {
        let n = self.h.node_count();
        while let Some((i, len)) = self.stack.pop() {
            self.cur.truncate(len);
            if i == n {
                if !self.cur.is_empty() {
                    return Some(self.cur.clone());
                }
                continue;
            }
            let node = NodeId(i as u32);
            self.stack.push((i + 1, len));
            self.cur.push(node);
            self.stack.push((self.h.subtree(node).end, len + 1));
        }
        None
    }
}

fn guard(h: &Hierarchy) -> Result<()> {
    if h.node_count() > ENUMERATION_LIMIT {
        return Err(Error::TooLarge {
            nodes: h.node_count(),
            limit: ENUMERATION_LIMIT,
        });
    }
    Ok(())
}

pub fn enumerate_antichains(h: &Hierarchy) -> Result<AntichainIter<'_>> {
    guard(h)?;
    Ok(AntichainIter {
        h,
        cur: Vec::new(),
        stack: vec![(0, 0)],
    })
}

/// Best nonempty antichain under a set metric: maximum expected score for
/// hF_beta and Jaccard, minimum for Hamming. Ties keep the first found.
pub fn brute_force_set(
    kind: MetricKind,
    h: &Hierarchy,
    p: &LeafDistribution,
) -> Result<(Vec<NodeId>, f64)> {
    if !kind.is_set_metric() {
        return Err(Error::SpaceMismatch(format!("{kind} is not a set metric")));
    }
    let naive = Naive::new(h);
    let sign = kind.orientation().cost_sign();
    let mut best: Option<(Vec<NodeId>, f64)> = None;
    for ac in enumerate_antichains(h)? {
        let value = expected_set_score(&naive, kind, &ac, p);
        if best.as_ref().map_or(true, |b| sign * value < sign * b.1) {
            best = Some((ac, value));
        }
    }
    Ok(best.expect("every tree has the root antichain"))
}

/// Expected set-metric value of an antichain, computed from scratch.
pub fn expected_set_value(kind: MetricKind, h: &Hierarchy, antichain: &[NodeId], p: &LeafDistribution) -> f64 {
    expected_set_score(&Naive::new(h), kind, antichain, p)
}

fn expected_set_score(naive: &Naive, kind: MetricKind, antichain: &[NodeId], p: &LeafDistribution) -> f64 {
    let aug = naive.augment(antichain);
    naive
        .h
        .leaves()
        .iter()
        .zip(p.probs())
        .filter(|(_, &pl)| pl != 0.0)
        .map(|(&y, &pl)| pl * naive.set(kind, &aug, y))
        .sum()
}

/// Number of nonempty antichains.
pub fn count_antichains(h: &Hierarchy) -> Result<u64> {
    Ok(enumerate_antichains(h)?.count() as u64)
}

/// Checks that augmentation is a bijection between antichains and
/// root-containing ancestor-closed sets: mapping back through the set's
/// bottom elements recovers the antichain, and no two antichains collide.
pub fn phi_roundtrip_check(h: &Hierarchy) -> Result<bool> {
    let naive = Naive::new(h);
    let mut seen: HashSet<Vec<NodeId>> = HashSet::new();
    for ac in enumerate_antichains(h)? {
        let aug = naive.augment(&ac);
        if !aug.contains(&NodeId::ROOT) {
            return Ok(false);
        }
        let mut back: Vec<NodeId> = aug
            .iter()
            .copied()
            .filter(|&n| !h.children(n).iter().any(|c| aug.contains(c)))
            .collect();
        back.sort_unstable();
        if back != ac || !seen.insert(aug) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hierarchy::fixtures::*;
    use crate::metrics::{CostMatrix, Orientation};
    use crate::metrics::CandidateSpace;

    fn dist(v: &[f64]) -> LeafDistribution {
        LeafDistribution::new(v.to_vec()).unwrap()
    }

    #[test]
    fn node_examples() {
        let h = five();
        let dl = CostModel::builtin(MetricKind::Dl);
        let (n, r) = brute_force_node(&dl, &h, &dist(&[0.4, 0.3, 0.3]));
        assert_eq!(n, id(&h, "A"));
        assert!((r - 1.3).abs() < 1e-12);
        assert_eq!(
            brute_force_node(&dl, &h, &LeafDistribution::point_mass(3, 2)),
            (id(&h, "b"), 0.0)
        );
        let flat = CostModel::explicit(
            &h,
            CostMatrix::new(5, 3, vec![2.0; 15]).unwrap(),
            Orientation::Cost,
            CandidateSpace::Nodes,
        )
        .unwrap();
        assert_eq!(brute_force_node(&flat, &h, &dist(&[0.4, 0.3, 0.3])), (NodeId::ROOT, 2.0));
    }

    #[test]
    fn antichain_counts() {
        let two = Hierarchy::from_parent_list(&[None, Some(0), Some(0)]).unwrap();
        assert_eq!(count_antichains(&two).unwrap(), 4);
        let h = five();
        let all: Vec<Vec<NodeId>> = enumerate_antichains(&h).unwrap().collect();
        assert_eq!(all.len(), 10);
        let unique: HashSet<_> = all.iter().cloned().collect();
        assert_eq!(unique.len(), 10);
        let chain = Hierarchy::from_parent_list(&[None, Some(0)]).unwrap();
        assert_eq!(count_antichains(&chain).unwrap(), 2);
        let big = Hierarchy::from_parent_list(
            &std::iter::once(None).chain((0..30).map(|_| Some(0))).collect::<Vec<_>>(),
        )
        .unwrap();
        assert!(matches!(enumerate_antichains(&big), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn set_examples() {
        let h = five();
        let (ac, v) = brute_force_set(MetricKind::HfBeta(1.0), &h, &dist(&[0.4, 0.3, 0.3])).unwrap();
        assert_eq!(ac, vec![id(&h, "a1")]);
        assert!((v - 0.72).abs() < 1e-12);
        let pm = LeafDistribution::point_mass(3, 2);
        for kind in [MetricKind::HfBeta(2.0), MetricKind::Jaccard] {
            assert_eq!(brute_force_set(kind, &h, &pm).unwrap(), (vec![id(&h, "b")], 1.0));
        }
        assert_eq!(
            brute_force_set(MetricKind::Hamming, &h, &pm).unwrap(),
            (vec![id(&h, "b")], 0.0)
        );
    }

    #[test]
    fn phi_is_bijective() {
        assert!(phi_roundtrip_check(&five()).unwrap());
        let chain = Hierarchy::from_parent_list(&[None, Some(0)]).unwrap();
        assert!(phi_roundtrip_check(&chain).unwrap());
    }
}
