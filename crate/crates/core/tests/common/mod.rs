#![allow(dead_code)]

use hierdecode::{Hierarchy, LeafDistribution, NodeId};
use proptest::prelude::*;

/// Random recursive tree from raw parent picks (`parent(i) = pick % i`).
pub fn tree(max_nodes: usize) -> impl Strategy<Value = Hierarchy> {
    prop::collection::vec(any::<u32>(), 1..max_nodes).prop_map(|picks| {
        let parents: Vec<Option<usize>> = std::iter::once(None)
            .chain(picks.iter().enumerate().map(|(i, &x)| Some(x as usize % (i + 1))))
            .collect();
        Hierarchy::from_parent_list(&parents).unwrap()
    })
}

/// Tree plus a leaf distribution with occasional exact zeros.
pub fn tree_and_dist(max_nodes: usize) -> impl Strategy<Value = (Hierarchy, LeafDistribution)> {
    tree(max_nodes).prop_flat_map(|h| {
        let n = h.leaf_count();
        let weights = prop::collection::vec(prop_oneof![1 => Just(0.0), 4 => 0.0f64..1.0], n);
        (Just(h), weights).prop_map(|(h, mut w)| {
            if w.iter().sum::<f64>() <= 0.0 {
                w[0] = 1.0;
            }
            let s: f64 = w.iter().sum();
            let p = LeafDistribution::new(w.iter().map(|x| x / s).collect()).unwrap();
            (h, p)
        })
    })
}

/// Parent pointers recovered by walking `children`, independent of the
/// hierarchy's own indexes.
pub struct Naive {
    pub parent: Vec<Option<usize>>,
    pub children: Vec<Vec<usize>>,
}

impl Naive {
    pub fn new(h: &Hierarchy) -> Self {
        let n = h.node_count();
        let mut parent = vec![None; n];
        let mut children = vec![Vec::new(); n];
        for i in 0..n {
            for c in h.children(NodeId(i as u32)) {
                parent[c.index()] = Some(i);
                children[i].push(c.index());
            }
        }
        Naive { parent, children }
    }

    pub fn depth(&self, mut n: usize) -> u32 {
        let mut d = 0;
        while let Some(p) = self.parent[n] {
            n = p;
            d += 1;
        }
        d
    }

    pub fn path(&self, mut n: usize) -> Vec<usize> {
        let mut out = vec![n];
        while let Some(p) = self.parent[n] {
            out.push(p);
            n = p;
        }
        out
    }

    pub fn lca(&self, a: usize, b: usize) -> usize {
        let pa = self.path(a);
        *self.path(b).iter().find(|x| pa.contains(x)).unwrap()
    }

    /// Leaves below `n`, by DFS.
    pub fn leaves(&self, n: usize) -> Vec<usize> {
        if self.children[n].is_empty() {
            return vec![n];
        }
        self.children[n].iter().flat_map(|&c| self.leaves(c)).collect()
    }
}
