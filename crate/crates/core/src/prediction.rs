use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hierarchy::{Hierarchy, NodeId};

/// Output of a decoder.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Prediction {
    Leaf(NodeId),
    Node(NodeId),
    /// Mutually exclusive node set, and the union of its members' ancestors
    /// (root-inclusive). Both lists are sorted by id.
    NodeSet {
        antichain: Vec<NodeId>,
        augmented: Vec<NodeId>,
    },
}

impl Prediction {
    /// Builds a set prediction from an antichain. Rejects empty sets and sets
    /// containing an ancestor/descendant pair.
    pub fn node_set(h: &Hierarchy, nodes: &[NodeId]) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::SpaceMismatch("empty node set".into()));
        }
        let mut antichain = nodes.to_vec();
        antichain.sort_unstable();
        antichain.dedup();
        for &n in &antichain {
            h.check_id(n)?;
        }
        for w in antichain.windows(2) {
            // Sorted pre-order: an ancestor pair is always adjacent to some
            // descendant of the first element, so checking neighbours suffices.
            if h.is_ancestor(w[0], w[1]) {
                return Err(Error::SpaceMismatch(format!(
                    "`{}` is an ancestor of `{}`",
                    h.name(w[0]),
                    h.name(w[1])
                )));
            }
        }
        let augmented = augment(h, &antichain);
        Ok(Prediction::NodeSet {
            antichain,
            augmented,
        })
    }

    /// Inverse of augmentation: given an ancestor-closed, root-containing set,
    /// returns the set prediction whose antichain is the set's leaves.
    pub fn from_augmented(h: &Hierarchy, augmented: &[NodeId]) -> Self {
        let mut augmented = augmented.to_vec();
        augmented.sort_unstable();
        augmented.dedup();
        let antichain = subtree_leaves(h, &augmented);
        Prediction::NodeSet {
            antichain,
            augmented,
        }
    }

    /// The single node of a leaf/node prediction, or of a singleton set.
    pub fn single(&self) -> Option<NodeId> {
        match self {
            Prediction::Leaf(n) | Prediction::Node(n) => Some(*n),
            Prediction::NodeSet { antichain, .. } if antichain.len() == 1 => Some(antichain[0]),
            Prediction::NodeSet { .. } => None,
        }
    }

    pub fn is_set(&self) -> bool {
        matches!(self, Prediction::NodeSet { .. })
    }

    /// Ancestor-augmented form, sorted by id.
    pub fn augmented(&self, h: &Hierarchy) -> Vec<NodeId> {
        match self {
            Prediction::Leaf(n) | Prediction::Node(n) => {
                let mut v: Vec<NodeId> = h.ancestors(*n).collect();
                v.reverse();
                v
            }
            Prediction::NodeSet { augmented, .. } => augmented.clone(),
        }
    }

    /// Antichain form: a single node for leaf/node predictions.
    pub fn antichain(&self) -> Vec<NodeId> {
        match self {
            Prediction::Leaf(n) | Prediction::Node(n) => vec![*n],
            Prediction::NodeSet { antichain, .. } => antichain.clone(),
        }
    }

    /// Node names, space separated.
    pub fn display(&self, h: &Hierarchy) -> String {
        self.antichain()
            .iter()
            .map(|&n| h.name(n))
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Two predictions agree when their augmented sets coincide.
    pub fn agrees_with(&self, other: &Prediction, h: &Hierarchy) -> bool {
        match (self.single(), other.single()) {
            (Some(a), Some(b)) => a == b,
            _ => self.augmented(h) == other.augmented(h),
        }
    }
}

/// Union of the ancestor chains of `nodes`, root-inclusive, sorted by id.
pub fn augment(h: &Hierarchy, nodes: &[NodeId]) -> Vec<NodeId> {
    let mut out: Vec<NodeId> = Vec::new();
    for &n in nodes {
        out.extend(h.ancestors(n));
    }
    out.sort_unstable();
    out.dedup();
    out
}

/// Members of a sorted, ancestor-closed set that have no child in the set.
pub fn subtree_leaves(h: &Hierarchy, sorted_closed: &[NodeId]) -> Vec<NodeId> {
    let mut out = Vec::new();
    for (i, &n) in sorted_closed.iter().enumerate() {
        // In pre-order, any descendant of n in the set would be n's successor.
        let has_desc = sorted_closed
            .get(i + 1)
            .is_some_and(|&next| h.is_ancestor(n, next));
        if !has_desc {
            out.push(n);
        }
    }
    out
}
