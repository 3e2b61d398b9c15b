//! Rooted class hierarchy.
//!
//! Nodes are numbered in depth-first pre-order (root = 0), so every subtree
//! occupies a contiguous id range and every node's leaf descendants occupy a
//! contiguous span of the leaf ordering. Leaf ordering is pre-order restricted
//! to leaves.

use std::collections::HashMap;
use std::fmt;
use std::ops::Range;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense node index in pre-order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NodeId(pub u32);

impl NodeId {
    pub const ROOT: NodeId = NodeId(0);

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl From<usize> for NodeId {
    fn from(i: usize) -> Self {
        NodeId(i as u32)
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// Negative entries below this are rejected, above it they are clamped to 0.
pub const NEGATIVE_TOLERANCE: f64 = 1e-12;
/// Accepted deviation of the probability mass from 1 before renormalization.
pub const SUM_TOLERANCE: f64 = 1e-6;

/// Immutable rooted tree with precomputed structural arrays.
#[derive(Clone, Debug)]
pub struct Hierarchy {
    names: Vec<String>,
    by_name: HashMap<String, NodeId>,
    parent: Vec<Option<NodeId>>,
    children: Vec<Vec<NodeId>>,
    depth: Vec<u32>,
    subtree_end: Vec<u32>,
    leaf_span: Vec<(u32, u32)>,
    leaves: Vec<NodeId>,
    leaf_pos: Vec<u32>,
    max_leaf_depth: Vec<u32>,
    min_leaf_depth: Vec<u32>,
    info: Vec<f64>,
    // sparse[k][i] = node of minimum depth among pre-order ids [i, i + 2^k)
    sparse: Vec<Vec<u32>>,
}

const NOT_A_LEAF: u32 = u32::MAX;

impl Hierarchy {
    /// Builds and validates a hierarchy from `(parent, child)` name pairs.
    ///
    /// Children keep the order in which their edges appear.
    pub fn build_from_edges<S: AsRef<str>>(edges: &[(S, S)]) -> Result<Self> {
        if edges.is_empty() {
            return Err(Error::EmptyHierarchy);
        }
        let mut names: Vec<String> = Vec::new();
        let mut index: HashMap<String, usize> = HashMap::new();
        let mut intern = |s: &str, names: &mut Vec<String>| -> usize {
            if let Some(&i) = index.get(s) {
                return i;
            }
            names.push(s.to_string());
            index.insert(s.to_string(), names.len() - 1);
            names.len() - 1
        };
        let mut raw_edges = Vec::with_capacity(edges.len());
        for (p, c) in edges {
            let pi = intern(p.as_ref(), &mut names);
            let ci = intern(c.as_ref(), &mut names);
            raw_edges.push((pi, ci));
        }
        let n = names.len();
        let mut parent: Vec<Option<usize>> = vec![None; n];
        let mut children: Vec<Vec<usize>> = vec![Vec::new(); n];
        for &(p, c) in &raw_edges {
            if parent[c].is_some() {
                return Err(Error::DuplicateChildEdge(names[c].clone()));
            }
            parent[c] = Some(p);
            children[p].push(c);
        }
        let roots: Vec<usize> = (0..n).filter(|&i| parent[i].is_none()).collect();
        if roots.is_empty() {
            return Err(Error::CycleDetected(find_cycle(&parent, 0, &names)));
        }
        if roots.len() > 1 {
            return Err(Error::MultipleRoots(
                roots.iter().map(|&i| names[i].clone()).collect(),
            ));
        }

        // Pre-order relabelling.
        let mut order = Vec::with_capacity(n);
        let mut stack = vec![roots[0]];
        let mut seen = vec![false; n];
        while let Some(v) = stack.pop() {
            seen[v] = true;
            order.push(v);
            for &c in children[v].iter().rev() {
                stack.push(c);
            }
        }
        if order.len() != n {
            let missing: Vec<String> = (0..n)
                .filter(|&i| !seen[i])
                .map(|i| names[i].clone())
                .collect();
            return Err(Error::DisconnectedNode(missing));
        }
        let mut new_id = vec![0u32; n];
        for (pos, &old) in order.iter().enumerate() {
            new_id[old] = pos as u32;
        }
        let names_pre: Vec<String> = order.iter().map(|&o| names[o].clone()).collect();
        let parent_pre: Vec<Option<NodeId>> = order
            .iter()
            .map(|&o| parent[o].map(|p| NodeId(new_id[p])))
            .collect();
        let children_pre: Vec<Vec<NodeId>> = order
            .iter()
            .map(|&o| children[o].iter().map(|&c| NodeId(new_id[c])).collect())
            .collect();
        Ok(Self::from_preorder(names_pre, parent_pre, children_pre))
    }

    /// Builds a hierarchy from a parent list where `parents[i] < i` for every
    /// non-root node; node `i` is named `n{i}`. Convenient for generated trees.
    pub fn from_parent_list(parents: &[Option<usize>]) -> Result<Self> {
        let edges: Vec<(String, String)> = parents
            .iter()
            .enumerate()
            .filter_map(|(i, p)| p.map(|p| (format!("n{p}"), format!("n{i}"))))
            .collect();
        Self::build_from_edges(&edges)
    }

    fn from_preorder(
        names: Vec<String>,
        parent: Vec<Option<NodeId>>,
        children: Vec<Vec<NodeId>>,
    ) -> Self {
        let n = names.len();
        let mut depth = vec![0u32; n];
        for i in 1..n {
            depth[i] = depth[parent[i].expect("non-root has parent").index()] + 1;
        }
        let mut leaves = Vec::new();
        let mut leaf_pos = vec![NOT_A_LEAF; n];
        for i in 0..n {
            if children[i].is_empty() {
                leaf_pos[i] = leaves.len() as u32;
                leaves.push(NodeId(i as u32));
            }
        }
        let mut subtree_end = vec![0u32; n];
        let mut leaf_span = vec![(0u32, 0u32); n];
        let mut max_leaf_depth = vec![0u32; n];
        let mut min_leaf_depth = vec![u32::MAX; n];
        for i in (0..n).rev() {
            if children[i].is_empty() {
                subtree_end[i] = i as u32 + 1;
                leaf_span[i] = (leaf_pos[i], leaf_pos[i] + 1);
                max_leaf_depth[i] = depth[i];
                min_leaf_depth[i] = depth[i];
            } else {
                let first = children[i][0].index();
                let last = children[i][children[i].len() - 1].index();
                subtree_end[i] = subtree_end[last];
                leaf_span[i] = (leaf_span[first].0, leaf_span[last].1);
                for c in &children[i] {
                    max_leaf_depth[i] = max_leaf_depth[i].max(max_leaf_depth[c.index()]);
                    min_leaf_depth[i] = min_leaf_depth[i].min(min_leaf_depth[c.index()]);
                }
            }
        }
        let total = leaves.len() as f64;
        let info = leaf_span
            .iter()
            .map(|&(lo, hi)| (total / f64::from(hi - lo)).ln())
            .collect();
        let by_name = names
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), NodeId(i as u32)))
            .collect();
        let sparse = build_sparse(&depth);
        Hierarchy {
            names,
            by_name,
            parent,
            children,
            depth,
            subtree_end,
            leaf_span,
            leaves,
            leaf_pos,
            max_leaf_depth,
            min_leaf_depth,
            info,
            sparse,
        }
    }

    /// Parses the tab-separated edge format (`parent<TAB>child`, `#` comments).
    pub fn parse_tsv(text: &str) -> Result<Self> {
        let mut edges = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split('\t');
            match (parts.next(), parts.next(), parts.next()) {
                (Some(p), Some(c), None) if !p.is_empty() && !c.is_empty() => {
                    edges.push((p.to_string(), c.to_string()))
                }
                _ => {
                    return Err(Error::FormatError {
                        line: lineno + 1,
                        msg: "expected `parent<TAB>child`".into(),
                    })
                }
            }
        }
        Self::build_from_edges(&edges)
    }

    pub fn read_tsv(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse_tsv(&crate::error::read_text(path.as_ref())?)
    }

    /// Serializes back to the edge format, in pre-order.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for i in 1..self.node_count() {
            let p = self.parent[i].unwrap();
            out.push_str(&self.names[p.index()]);
            out.push('\t');
            out.push_str(&self.names[i]);
            out.push('\n');
        }
        out
    }

    /// Returns a new hierarchy where each listed internal node gets an extra
    /// leaf child named `<name>#stop`, placed after its existing children.
    pub fn augment_with_stop_nodes(&self, internal: &[NodeId]) -> Result<Hierarchy> {
        let mut mark = vec![false; self.node_count()];
        for &n in internal {
            self.check_id(n)?;
            if self.is_leaf(n) {
                return Err(Error::NotInternal(self.name(n).to_string()));
            }
            mark[n.index()] = true;
        }
        if !mark.iter().any(|&m| m) {
            return Ok(self.clone());
        }
        let mut edges: Vec<(String, String)> = Vec::with_capacity(self.node_count());
        // Edge order only matters per parent, so emitting each parent's
        // children consecutively (in pre-order) reproduces the existing order.
        for i in 0..self.node_count() {
            for c in &self.children[i] {
                edges.push((self.names[i].clone(), self.names[c.index()].clone()));
            }
            if mark[i] {
                let stop = format!("{}#stop", self.names[i]);
                if self.by_name.contains_key(&stop) {
                    return Err(Error::InvalidParam(format!("name `{stop}` already exists")));
                }
                edges.push((self.names[i].clone(), stop));
            }
        }
        Hierarchy::build_from_edges(&edges)
    }

    /// All internal nodes, in pre-order.
    pub fn internal_nodes(&self) -> Vec<NodeId> {
        self.nodes().filter(|&n| !self.is_leaf(n)).collect()
    }

    #[inline]
    pub fn node_count(&self) -> usize {
        self.names.len()
    }

    #[inline]
    pub fn leaf_count(&self) -> usize {
        self.leaves.len()
    }

    pub fn nodes(&self) -> impl DoubleEndedIterator<Item = NodeId> + ExactSizeIterator {
        (0..self.node_count() as u32).map(NodeId)
    }

    pub fn check_id(&self, n: NodeId) -> Result<()> {
        if n.index() < self.node_count() {
            Ok(())
        } else {
            Err(Error::InvalidNodeId(n.index()))
        }
    }

    #[inline]
    pub fn parent(&self, n: NodeId) -> Option<NodeId> {
        self.parent[n.index()]
    }

    #[inline]
    pub fn children(&self, n: NodeId) -> &[NodeId] {
        &self.children[n.index()]
    }

    #[inline]
    pub fn depth(&self, n: NodeId) -> u32 {
        self.depth[n.index()]
    }

    #[inline]
    pub fn is_leaf(&self, n: NodeId) -> bool {
        self.leaf_pos[n.index()] != NOT_A_LEAF
    }

    #[inline]
    pub fn is_root(&self, n: NodeId) -> bool {
        n.0 == 0
    }

    /// Position of a leaf in the leaf ordering.
    #[inline]
    pub fn leaf_index(&self, n: NodeId) -> Option<usize> {
        let p = self.leaf_pos[n.index()];
        (p != NOT_A_LEAF).then_some(p as usize)
    }

    /// Leaf node at a given position of the leaf ordering.
    #[inline]
    pub fn leaf(&self, i: usize) -> NodeId {
        self.leaves[i]
    }

    pub fn leaves(&self) -> &[NodeId] {
        &self.leaves
    }

    /// Half-open span of `n`'s leaf descendants in the leaf ordering.
    #[inline]
    pub fn leaf_span(&self, n: NodeId) -> Range<usize> {
        let (lo, hi) = self.leaf_span[n.index()];
        lo as usize..hi as usize
    }

    /// Leaf descendants of `n` (itself when `n` is a leaf).
    #[inline]
    pub fn leaves_of(&self, n: NodeId) -> &[NodeId] {
        &self.leaves[self.leaf_span(n)]
    }

    /// Pre-order id range of the subtree rooted at `n`.
    #[inline]
    pub fn subtree(&self, n: NodeId) -> Range<usize> {
        n.index()..self.subtree_end[n.index()] as usize
    }

    /// `a` is an ancestor of `d` (inclusive).
    #[inline]
    pub fn is_ancestor(&self, a: NodeId, d: NodeId) -> bool {
        a.0 <= d.0 && d.0 < self.subtree_end[a.index()]
    }

    /// Whether leaf position `leaf` lies in the span of `n`.
    #[inline]
    pub fn covers_leaf(&self, n: NodeId, leaf: usize) -> bool {
        let (lo, hi) = self.leaf_span[n.index()];
        (lo as usize) <= leaf && leaf < hi as usize
    }

    /// Ancestors of `n`, starting with `n` and ending with the root.
    pub fn ancestors(&self, n: NodeId) -> Ancestors<'_> {
        Ancestors {
            h: self,
            next: Some(n),
        }
    }

    /// Deepest leaf depth among the leaf descendants of `n`.
    #[inline]
    pub fn subtree_max_leaf_depth(&self, n: NodeId) -> u32 {
        self.max_leaf_depth[n.index()]
    }

    /// Shallowest leaf depth among the leaf descendants of `n`.
    #[inline]
    pub fn subtree_min_leaf_depth(&self, n: NodeId) -> u32 {
        self.min_leaf_depth[n.index()]
    }

    /// Maximum leaf depth of the whole tree.
    pub fn max_depth(&self) -> u32 {
        self.max_leaf_depth[0]
    }

    /// Minimum leaf depth of the whole tree.
    pub fn min_depth(&self) -> u32 {
        self.min_leaf_depth[0]
    }

    /// Height of `n`: distance down to its deepest leaf descendant.
    #[inline]
    pub fn height(&self, n: NodeId) -> u32 {
        self.max_leaf_depth[n.index()] - self.depth[n.index()]
    }

    /// Node information `ln(|L| / |L(n)|)`.
    #[inline]
    pub fn info(&self, n: NodeId) -> f64 {
        self.info[n.index()]
    }

    #[inline]
    pub fn name(&self, n: NodeId) -> &str {
        &self.names[n.index()]
    }

    pub fn node_by_name(&self, name: &str) -> Option<NodeId> {
        self.by_name.get(name).copied()
    }

    pub fn leaf_names(&self) -> Vec<&str> {
        self.leaves.iter().map(|&l| self.name(l)).collect()
    }

    /// Shallowest non-root ancestor of `n` (the child of the root above `n`).
    pub fn top_ancestor(&self, n: NodeId) -> Option<NodeId> {
        if self.is_root(n) {
            return None;
        }
        let mut cur = n;
        while let Some(p) = self.parent(cur) {
            if self.is_root(p) {
                return Some(cur);
            }
            cur = p;
        }
        None
    }

    /// Lowest common ancestor (inclusive: `lca(a, a) == a`).
    pub fn lca(&self, a: NodeId, b: NodeId) -> NodeId {
        let (u, v) = if a.0 <= b.0 { (a.0, b.0) } else { (b.0, a.0) };
        if v < self.subtree_end[u as usize] {
            return NodeId(u);
        }
        // The shallowest node in the pre-order range (u, v] is a child of the LCA.
        let lo = u as usize + 1;
        let hi = v as usize + 1;
        let k = (usize::BITS - 1 - (hi - lo).leading_zeros()) as usize;
        let x = self.sparse[k][lo];
        let y = self.sparse[k][hi - (1 << k)];
        let m = if self.depth[x as usize] <= self.depth[y as usize] {
            x
        } else {
            y
        };
        self.parent[m as usize].expect("range minimum is never the root")
    }

    /// Checked variant of [`Hierarchy::lca`].
    pub fn try_lca(&self, a: NodeId, b: NodeId) -> Result<NodeId> {
        self.check_id(a)?;
        self.check_id(b)?;
        Ok(self.lca(a, b))
    }

    /// Bottom-up aggregation: `p(n) = sum of p(l) over the leaf descendants of n`.
    pub fn aggregate(&self, p: &LeafDistribution) -> Result<NodeScores> {
        let mut out = vec![0.0; self.node_count()];
        self.aggregate_into(p.probs(), &mut out)?;
        Ok(NodeScores(out))
    }

    /// Aggregates a raw leaf vector into a caller-provided buffer.
    pub fn aggregate_into(&self, leaf_probs: &[f64], out: &mut [f64]) -> Result<()> {
        if leaf_probs.len() != self.leaf_count() {
            return Err(Error::LengthMismatch {
                expected: self.leaf_count(),
                got: leaf_probs.len(),
            });
        }
        if out.len() != self.node_count() {
            return Err(Error::LengthMismatch {
                expected: self.node_count(),
                got: out.len(),
            });
        }
        for i in (0..self.node_count()).rev() {
            let pos = self.leaf_pos[i];
            out[i] = if pos != NOT_A_LEAF {
                leaf_probs[pos as usize]
            } else {
                self.children[i].iter().map(|c| out[c.index()]).sum()
            };
        }
        Ok(())
    }
}

pub struct Ancestors<'a> {
    h: &'a Hierarchy,
    next: Option<NodeId>,
}

impl Iterator for Ancestors<'_> {
    type Item = NodeId;

    fn next(&mut self) -> Option<NodeId> {
        let cur = self.next?;
        self.next = self.h.parent(cur);
        Some(cur)
    }
}

fn build_sparse(depth: &[u32]) -> Vec<Vec<u32>> {
    let n = depth.len();
    let mut table = vec![(0..n as u32).collect::<Vec<u32>>()];
    let mut k = 1;
    while (1 << k) <= n {
        let prev = &table[k - 1];
        let half = 1 << (k - 1);
        let row: Vec<u32> = (0..=n - (1 << k))
            .map(|i| {
                let (a, b) = (prev[i], prev[i + half]);
                if depth[a as usize] <= depth[b as usize] {
                    a
                } else {
                    b
                }
            })
            .collect();
        table.push(row);
        k += 1;
    }
    table
}

fn find_cycle(parent: &[Option<usize>], start: usize, names: &[String]) -> Vec<String> {
    let mut pos = vec![usize::MAX; parent.len()];
    let mut path = Vec::new();
    let mut cur = start;
    loop {
        if pos[cur] != usize::MAX {
            return path[pos[cur]..].iter().map(|&i: &usize| names[i].clone()).collect();
        }
        pos[cur] = path.len();
        path.push(cur);
        match parent[cur] {
            Some(p) => cur = p,
            None => return vec![],
        }
    }
}

/// Probability vector over the leaves of a hierarchy, in leaf order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LeafDistribution(Vec<f64>);

impl LeafDistribution {
    /// Validates a probability vector. Entries in `[-1e-12, 0)` are clamped to
    /// zero and the vector is renormalized when its mass is within `1e-6` of 1.
    pub fn new(mut probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidDistribution("empty vector".into()));
        }
        for (i, v) in probs.iter_mut().enumerate() {
            if !v.is_finite() {
                return Err(Error::InvalidDistribution(format!("entry {i} is not finite")));
            }
            if *v < -NEGATIVE_TOLERANCE {
                return Err(Error::InvalidDistribution(format!("entry {i} is negative ({v})")));
            }
            if *v < 0.0 {
                *v = 0.0;
            }
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::InvalidDistribution(format!("entries sum to {sum}")));
        }
        if sum != 1.0 {
            probs.iter_mut().for_each(|v| *v /= sum);
        }
        Ok(LeafDistribution(probs))
    }

    /// Validates and checks the length against `h`.
    pub fn for_hierarchy(h: &Hierarchy, probs: Vec<f64>) -> Result<Self> {
        if probs.len() != h.leaf_count() {
            return Err(Error::LengthMismatch {
                expected: h.leaf_count(),
                got: probs.len(),
            });
        }
        Self::new(probs)
    }

    pub fn uniform(n: usize) -> Self {
        LeafDistribution(vec![1.0 / n as f64; n])
    }

    /// Point mass on the leaf at position `leaf` of the leaf ordering.
    pub fn point_mass(n: usize, leaf: usize) -> Self {
        let mut v = vec![0.0; n];
        v[leaf] = 1.0;
        LeafDistribution(v)
    }

    #[inline]
    pub fn probs(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Position of the most likely leaf (smallest index on ties).
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (i, &v) in self.0.iter().enumerate() {
            if v > self.0[best] {
                best = i;
            }
        }
        best
    }
}

/// Per-node probabilities produced by [`Hierarchy::aggregate`].
#[derive(Clone, Debug, PartialEq)]
pub struct NodeScores(pub Vec<f64>);

impl NodeScores {
    #[inline]
    pub fn get(&self, n: NodeId) -> f64 {
        self.0[n.index()]
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    /// r -> {A -> {a1, a2}, b}
    pub fn five() -> Hierarchy {
        Hierarchy::build_from_edges(&[("r", "A"), ("A", "a1"), ("A", "a2"), ("r", "b")]).unwrap()
    }

    pub fn id(h: &Hierarchy, name: &str) -> NodeId {
        h.node_by_name(name).unwrap()
    }
}
