//! Hierarchical evaluation metrics.
//!
//! A [`CostModel`] is either one of the built-in metrics, evaluated in closed
//! form from depths, LCAs and node information, or an explicit dense matrix
//! indexed by (candidate, leaf). Every model carries an orientation: costs are
//! minimized, gains maximized.
//!
//! `EtaLca` measures the height of the lowest common ancestor, where the
//! height of `v` is the depth of its deepest leaf descendant minus the depth
//! of `v` (leaves have height 0).

use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hierarchy::{Hierarchy, NodeId};
use crate::prediction::Prediction;

/// Differences smaller than this are treated as zero when checking
/// reasonableness.
pub const STRICT_EPS: f64 = 1e-12;
/// Tolerance for the equality required on root-level mismatches.
pub const EQUALITY_EPS: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum MetricKind {
    Top1,
    EtaLca,
    Dl,
    Dlc(f64),
    WuPalmer,
    Zhao,
    HfBeta(f64),
    Hamming,
    Jaccard,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Orientation {
    /// Lower is better.
    Cost,
    /// Higher is better.
    Gain,
}

impl Orientation {
    /// Sign that maps a value of this orientation into cost form.
    pub fn cost_sign(self) -> f64 {
        match self {
            Orientation::Cost => 1.0,
            Orientation::Gain => -1.0,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Orientation::Cost => Orientation::Gain,
            Orientation::Gain => Orientation::Cost,
        }
    }

    /// Whether `a` is strictly better than `b`.
    pub fn better(self, a: f64, b: f64) -> bool {
        match self {
            Orientation::Cost => a < b,
            Orientation::Gain => a > b,
        }
    }
}

impl FromStr for Orientation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cost" => Ok(Orientation::Cost),
            "gain" => Ok(Orientation::Gain),
            _ => Err(Error::InvalidParam(format!("orientation `{s}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CandidateSpace {
    Leaves,
    Nodes,
    NodeSets,
}

impl MetricKind {
    pub fn dlc(c: f64) -> Result<Self> {
        if c >= 0.0 && c.is_finite() {
            Ok(MetricKind::Dlc(c))
        } else {
            Err(Error::InvalidParam(format!("DL_c requires c >= 0, got {c}")))
        }
    }

    pub fn hf_beta(beta: f64) -> Result<Self> {
        if beta > 0.0 && beta.is_finite() {
            Ok(MetricKind::HfBeta(beta))
        } else {
            Err(Error::InvalidParam(format!("hF_beta requires beta > 0, got {beta}")))
        }
    }

    pub fn orientation(self) -> Orientation {
        match self {
            MetricKind::Top1
            | MetricKind::EtaLca
            | MetricKind::Dl
            | MetricKind::Dlc(_)
            | MetricKind::Hamming => Orientation::Cost,
            MetricKind::WuPalmer | MetricKind::Zhao | MetricKind::HfBeta(_) | MetricKind::Jaccard => {
                Orientation::Gain
            }
        }
    }

    /// The candidate space the metric is natively defined on.
    pub fn native_space(self) -> CandidateSpace {
        match self {
            MetricKind::Top1 | MetricKind::EtaLca => CandidateSpace::Leaves,
            MetricKind::Dl | MetricKind::Dlc(_) | MetricKind::WuPalmer | MetricKind::Zhao => {
                CandidateSpace::Nodes
            }
            MetricKind::HfBeta(_) | MetricKind::Hamming | MetricKind::Jaccard => {
                CandidateSpace::NodeSets
            }
        }
    }

    pub fn is_set_metric(self) -> bool {
        self.native_space() == CandidateSpace::NodeSets
    }

    /// Score of a single node `n` against leaf `y`.
    ///
    /// Set metrics treat `n` as the singleton `{n}`.
    pub fn node_score(self, h: &Hierarchy, n: NodeId, y: NodeId) -> f64 {
        let lca = h.lca(n, y);
        let (dn, dy, da) = (
            f64::from(h.depth(n)),
            f64::from(h.depth(y)),
            f64::from(h.depth(lca)),
        );
        match self {
            MetricKind::Top1 => f64::from(u8::from(n != y)),
            MetricKind::EtaLca => f64::from(h.height(lca)),
            MetricKind::Dl => dn + dy - 2.0 * da,
            MetricKind::Dlc(c) => dn + dy - 2.0 * da + c * dn,
            MetricKind::WuPalmer => ratio_or_one(2.0 * da, dn + dy),
            MetricKind::Zhao => ratio_or_one(2.0 * h.info(lca), h.info(n) + h.info(y)),
            MetricKind::HfBeta(_) | MetricKind::Hamming | MetricKind::Jaccard => {
                self.set_score_counts(da + 1.0, dn + 1.0, dy + 1.0)
            }
        }
    }

    /// Score of an augmented set against leaf `y`.
    pub fn augmented_score(self, h: &Hierarchy, augmented: &[NodeId], y: NodeId) -> f64 {
        let inter = augmented.iter().filter(|&&a| h.is_ancestor(a, y)).count() as f64;
        self.set_score_counts(inter, augmented.len() as f64, f64::from(h.depth(y)) + 1.0)
    }

    /// Set metric from `|h ∩ y|`, `|h|`, `|y|` of the augmented sets.
    fn set_score_counts(self, inter: f64, size_h: f64, size_y: f64) -> f64 {
        match self {
            MetricKind::HfBeta(beta) => {
                let b2 = beta * beta;
                (1.0 + b2) * inter / (size_h + b2 * size_y)
            }
            MetricKind::Hamming => (size_h + size_y - 2.0 * inter) / size_y,
            MetricKind::Jaccard => inter / (size_h + size_y - inter),
            _ => unreachable!("not a set metric"),
        }
    }

    pub fn name(self) -> String {
        self.to_string()
    }
}

fn ratio_or_one(num: f64, den: f64) -> f64 {
    if den == 0.0 {
        1.0
    } else {
        num / den
    }
}

impl fmt::Display for MetricKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MetricKind::Top1 => write!(f, "top1"),
            MetricKind::EtaLca => write!(f, "lca"),
            MetricKind::Dl => write!(f, "dl"),
            MetricKind::Dlc(c) => write!(f, "dlc:{c}"),
            MetricKind::WuPalmer => write!(f, "wp"),
            MetricKind::Zhao => write!(f, "zhao"),
            MetricKind::HfBeta(b) => write!(f, "hf:{b}"),
            MetricKind::Hamming => write!(f, "hamming"),
            MetricKind::Jaccard => write!(f, "jaccard"),
        }
    }
}

impl FromStr for MetricKind {
    type Err = Error;

    /// Parses `name[:param]`, e.g. `dl`, `dlc:0.5`, `hf:2`.
    fn from_str(s: &str) -> Result<Self> {
        let (name, param) = match s.split_once(':') {
            Some((n, p)) => (n, Some(p)),
            None => (s, None),
        };
        let num = |p: Option<&str>| -> Result<f64> {
            p.ok_or_else(|| Error::UnknownMetric(s.to_string()))?
                .parse::<f64>()
                .map_err(|_| Error::UnknownMetric(s.to_string()))
        };
        let kind = match (name.to_ascii_lowercase().as_str(), param) {
            ("top1", None) => MetricKind::Top1,
            ("lca" | "eta-lca" | "etalca", None) => MetricKind::EtaLca,
            ("dl", None) => MetricKind::Dl,
            ("dlc", p) => MetricKind::dlc(num(p)?)?,
            ("wp" | "wu-palmer", None) => MetricKind::WuPalmer,
            ("zhao" | "zs", None) => MetricKind::Zhao,
            ("hf", p) => MetricKind::hf_beta(num(p)?)?,
            ("hamming", None) => MetricKind::Hamming,
            ("jaccard", None) => MetricKind::Jaccard,
            _ => return Err(Error::UnknownMetric(s.to_string())),
        };
        Ok(kind)
    }
}

/// Dense row-major matrix of shape (candidates, leaves).
#[derive(Clone, Debug, PartialEq)]
pub struct CostMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl CostMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(CostMatrix { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        CostMatrix { rows, cols, data }
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn negated(&self) -> Self {
        CostMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| -v).collect(),
        }
    }

    /// Parses the text grid format: `rows cols` then row-major reals,
    /// separated by any whitespace.
    pub fn parse_text(text: &str) -> Result<Self> {
        let mut tokens = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim_start().starts_with('#'))
            .flat_map(|(i, l)| l.split_whitespace().map(move |t| (i + 1, t)));
        let mut dim = |what: &str| -> Result<usize> {
            let (line, t) = tokens.next().ok_or_else(|| Error::FormatError {
                line: 1,
                msg: format!("missing {what}"),
            })?;
            t.parse().map_err(|_| Error::FormatError {
                line,
                msg: format!("bad {what} `{t}`"),
            })
        };
        let rows = dim("row count")?;
        let cols = dim("column count")?;
        let mut data = Vec::with_capacity(rows * cols);
        for (line, t) in tokens {
            data.push(t.parse::<f64>().map_err(|_| Error::FormatError {
                line,
                msg: format!("bad number `{t}`"),
            })?);
        }
        CostMatrix::new(rows, cols, data)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.rows, self.cols);
        for r in 0..self.rows {
            let line: Vec<String> = self.row(r).iter().map(|v| format!("{v}")).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }

    const MAGIC: &'static [u8; 8] = b"HDMAT\0\0\x01";

    /// Binary variant: 8-byte magic, `rows` and `cols` as u64 LE, then f64 LE.
    pub fn to_binary(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(24 + 8 * self.data.len());
        out.extend_from_slice(Self::MAGIC);
        out.extend_from_slice(&(self.rows as u64).to_le_bytes());
        out.extend_from_slice(&(self.cols as u64).to_le_bytes());
        for v in &self.data {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }

    pub fn parse_binary(bytes: &[u8]) -> Result<Self> {
        let bad = |msg: &str| Error::FormatError {
            line: 0,
            msg: msg.to_string(),
        };
        if bytes.len() < 24 || &bytes[..8] != Self::MAGIC {
            return Err(bad("not a binary matrix file"));
        }
        let rows = u64::from_le_bytes(bytes[8..16].try_into().unwrap()) as usize;
        let cols = u64::from_le_bytes(bytes[16..24].try_into().unwrap()) as usize;
        let body = &bytes[24..];
        if body.len() != rows * cols * 8 {
            return Err(bad("truncated binary matrix"));
        }
        let data = body
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        CostMatrix::new(rows, cols, data)
    }

    /// Reads either format, detected by the binary magic.
    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let bytes = crate::error::read_file(path.as_ref())?;
        if bytes.starts_with(Self::MAGIC) {
            Self::parse_binary(&bytes)
        } else {
            let text = String::from_utf8(bytes).map_err(|_| Error::FormatError {
                line: 0,
                msg: "matrix file is neither text nor binary".into(),
            })?;
            Self::parse_text(&text)
        }
    }

    pub fn write_text(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut f = std::fs::File::create(path)?;
        f.write_all(self.to_text().as_bytes())?;
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum CostSource {
    Builtin(MetricKind),
    Matrix(CostMatrix),
}

/// A metric together with its orientation and candidate space.
#[derive(Clone, Debug, PartialEq)]
pub struct CostModel {
    pub source: CostSource,
    pub orientation: Orientation,
    pub space: CandidateSpace,
}

impl CostModel {
    /// Built-in metric on its native candidate space.
    pub fn builtin(kind: MetricKind) -> Self {
        CostModel {
            source: CostSource::Builtin(kind),
            orientation: kind.orientation(),
            space: kind.native_space(),
        }
    }

    /// Built-in metric evaluated on another candidate space. Leaf and node
    /// metrics can be evaluated on nodes and leaves; set metrics on anything.
    pub fn builtin_on(kind: MetricKind, space: CandidateSpace) -> Result<Self> {
        if space == CandidateSpace::NodeSets && !kind.is_set_metric() {
            return Err(Error::SpaceMismatch(format!("{kind} is not a set metric")));
        }
        Ok(CostModel {
            source: CostSource::Builtin(kind),
            orientation: kind.orientation(),
            space,
        })
    }

    /// Explicit matrix. Rows are nodes (`Nodes`) or leaf positions (`Leaves`).
    pub fn explicit(
        h: &Hierarchy,
        matrix: CostMatrix,
        orientation: Orientation,
        space: CandidateSpace,
    ) -> Result<Self> {
        let rows = match space {
            CandidateSpace::Leaves => h.leaf_count(),
            CandidateSpace::Nodes => h.node_count(),
            CandidateSpace::NodeSets => {
                return Err(Error::SpaceMismatch("explicit matrices cannot index node sets".into()))
            }
        };
        if matrix.rows() != rows || matrix.cols() != h.leaf_count() {
            return Err(Error::DimensionMismatch(format!(
                "expected {rows}x{} matrix, got {}x{}",
                h.leaf_count(),
                matrix.rows(),
                matrix.cols()
            )));
        }
        Ok(CostModel {
            source: CostSource::Matrix(matrix),
            orientation,
            space,
        })
    }

    pub fn matrix(&self) -> Option<&CostMatrix> {
        match &self.source {
            CostSource::Matrix(m) => Some(m),
            CostSource::Builtin(_) => None,
        }
    }

    pub fn kind(&self) -> Option<MetricKind> {
        match &self.source {
            CostSource::Builtin(k) => Some(*k),
            CostSource::Matrix(_) => None,
        }
    }

    pub fn name(&self) -> String {
        match &self.source {
            CostSource::Builtin(k) => k.to_string(),
            CostSource::Matrix(m) => format!("matrix[{}x{}]", m.rows(), m.cols()),
        }
    }

    /// Value with flipped sign and orientation; decodes to the same candidate.
    /// Built-in metrics are materialized first.
    pub fn negated(&self, h: &Hierarchy) -> Result<CostModel> {
        let base = match &self.source {
            CostSource::Matrix(_) => self.clone(),
            CostSource::Builtin(k) => build_cost_matrix(*k, h, self.space)?,
        };
        let CostSource::Matrix(m) = base.source else {
            unreachable!()
        };
        Ok(CostModel {
            source: CostSource::Matrix(m.negated()),
            orientation: self.orientation.flipped(),
            space: base.space,
        })
    }

    /// Raw value for a single candidate node (or leaf) against leaf position
    /// `leaf`, in the model's own orientation.
    #[inline]
    pub fn value(&self, h: &Hierarchy, cand: NodeId, leaf: usize) -> f64 {
        match &self.source {
            CostSource::Builtin(k) => k.node_score(h, cand, h.leaf(leaf)),
            CostSource::Matrix(m) => {
                let row = match self.space {
                    CandidateSpace::Leaves => h
                        .leaf_index(cand)
                        .expect("leaf-space matrix indexed by a leaf"),
                    _ => cand.index(),
                };
                m.get(row, leaf)
            }
        }
    }

    /// Value in cost orientation (gains negated).
    #[inline]
    pub fn cost(&self, h: &Hierarchy, cand: NodeId, leaf: usize) -> f64 {
        self.orientation.cost_sign() * self.value(h, cand, leaf)
    }

    /// Expected value `sum_l p(l) * value(cand, l)` in the model's orientation.
    pub fn expected(&self, h: &Hierarchy, cand: NodeId, probs: &[f64]) -> f64 {
        match &self.source {
            CostSource::Matrix(m) => {
                let row = match self.space {
                    CandidateSpace::Leaves => h.leaf_index(cand).expect("leaf candidate"),
                    _ => cand.index(),
                };
                m.row(row).iter().zip(probs).map(|(c, p)| c * p).sum()
            }
            CostSource::Builtin(_) => probs
                .iter()
                .enumerate()
                .filter(|(_, &p)| p != 0.0)
                .map(|(l, &p)| p * self.value(h, cand, l))
                .sum(),
        }
    }
}

/// Scores a prediction against ground-truth leaf `y`.
pub fn score(model: &CostModel, h: &Hierarchy, cand: &Prediction, y: NodeId) -> Result<f64> {
    h.check_id(y)?;
    let leaf = h
        .leaf_index(y)
        .ok_or_else(|| Error::SpaceMismatch(format!("ground truth `{}` is not a leaf", h.name(y))))?;
    match (&model.source, cand) {
        (CostSource::Builtin(k), _) if k.is_set_metric() => {
            Ok(k.augmented_score(h, &cand.augmented(h), y))
        }
        (_, Prediction::NodeSet { .. }) => Err(Error::SpaceMismatch(format!(
            "{} cannot score node sets",
            model.name()
        ))),
        (_, Prediction::Leaf(n) | Prediction::Node(n)) => {
            h.check_id(*n)?;
            if model.space == CandidateSpace::Leaves
                && matches!(model.source, CostSource::Matrix(_))
                && !h.is_leaf(*n)
            {
                return Err(Error::SpaceMismatch(format!(
                    "leaf-space matrix cannot score internal node `{}`",
                    h.name(*n)
                )));
            }
            Ok(model.value(h, *n, leaf))
        }
    }
}

/// Materializes a built-in metric as a dense (candidate x leaf) matrix.
pub fn build_cost_matrix(kind: MetricKind, h: &Hierarchy, space: CandidateSpace) -> Result<CostModel> {
    if space == CandidateSpace::NodeSets {
        return Err(Error::SpaceMismatch(
            "node-set candidates cannot be materialized".into(),
        ));
    }
    let rows = match space {
        CandidateSpace::Leaves => h.leaf_count(),
        _ => h.node_count(),
    };
    let m = CostMatrix::from_fn(rows, h.leaf_count(), |r, c| {
        let cand = match space {
            CandidateSpace::Leaves => h.leaf(r),
            _ => NodeId(r as u32),
        };
        kind.node_score(h, cand, h.leaf(c))
    });
    Ok(CostModel {
        source: CostSource::Matrix(m),
        orientation: kind.orientation(),
        space,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Reasonableness {
    StrictReasonable,
    RootedReasonable,
    NotReasonable,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReasonablenessVerdict {
    pub tag: Reasonableness,
    /// Violating (node, leaf) pair; present iff `NotReasonable`.
    pub witness: Option<(NodeId, NodeId)>,
}

impl fmt::Display for ReasonablenessVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.tag, self.witness) {
            (Reasonableness::NotReasonable, Some((n, l))) => {
                write!(f, "NotReasonable (node {}, leaf {})", n.0, l.0)
            }
            (tag, _) => write!(f, "{tag:?}"),
        }
    }
}

/// Checks whether a node-space model is hierarchically reasonable.
///
/// With `delta = C(n, l) - C(parent(n), l)` in cost orientation, the strict
/// form requires `delta < 0` for every leaf under `n` and `delta > 0` for
/// every other leaf. The rooted form keeps the first condition but only asks
/// `delta > 0` for outside leaves whose LCA with `n` is not the root, and
/// `delta == 0` (within 1e-9) for the rest.
pub fn check_reasonable(model: &CostModel, h: &Hierarchy) -> ReasonablenessVerdict {
    let mut strict_witness: Option<(NodeId, NodeId)> = None;
    let mut rooted_witness: Option<(NodeId, NodeId)> = None;
    for n in h.nodes().skip(1) {
        let parent = h.parent(n).unwrap();
        let span = h.leaf_span(n);
        let top_span = h.leaf_span(h.top_ancestor(n).unwrap());
        for l in 0..h.leaf_count() {
            let raw = model.cost(h, n, l) - model.cost(h, parent, l);
            let delta = if raw.abs() < STRICT_EPS { 0.0 } else { raw };
            let pair = (n, h.leaf(l));
            if span.contains(&l) {
                if delta >= 0.0 {
                    let w = Some(pair);
                    return ReasonablenessVerdict {
                        tag: Reasonableness::NotReasonable,
                        witness: w,
                    };
                }
                continue;
            }
            if delta <= 0.0 && strict_witness.is_none() {
                strict_witness = Some(pair);
            }
            let rooted_ok = if top_span.contains(&l) {
                delta > 0.0
            } else {
                raw.abs() <= EQUALITY_EPS
            };
            if !rooted_ok && rooted_witness.is_none() {
                rooted_witness = Some(pair);
            }
            if strict_witness.is_some() && rooted_witness.is_some() {
                return ReasonablenessVerdict {
                    tag: Reasonableness::NotReasonable,
                    witness: rooted_witness,
                };
            }
        }
    }
    if strict_witness.is_none() {
        ReasonablenessVerdict {
            tag: Reasonableness::StrictReasonable,
            witness: None,
        }
    } else {
        ReasonablenessVerdict {
            tag: Reasonableness::RootedReasonable,
            witness: None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hierarchy::fixtures::*;

    #[test]
    fn pair_metric_examples() {
        let h = five();
        let (a, a1, a2, b) = (id(&h, "A"), id(&h, "a1"), id(&h, "a2"), id(&h, "b"));
        assert_eq!(MetricKind::Dl.node_score(&h, a, a1), 1.0);
        assert_eq!(MetricKind::Dl.node_score(&h, a1, b), 3.0);
        assert!((MetricKind::WuPalmer.node_score(&h, a, a1) - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(MetricKind::WuPalmer.node_score(&h, b, b), 1.0);
        assert_eq!(MetricKind::Top1.node_score(&h, a1, a1), 0.0);
        assert_eq!(MetricKind::Top1.node_score(&h, a1, a2), 1.0);
        assert_eq!(MetricKind::Dlc(0.5).node_score(&h, a, a1), 1.5);
        assert_eq!(MetricKind::Zhao.node_score(&h, a1, a1), 1.0);
        assert_eq!(MetricKind::Zhao.node_score(&h, a1, b), 0.0);
    }

    #[test]
    fn hf_beta_examples() {
        let h = five();
        let (a1, b) = (id(&h, "a1"), id(&h, "b"));
        let hf1 = CostModel::builtin(MetricKind::HfBeta(1.0));
        let pred = Prediction::node_set(&h, &[a1]).unwrap();
        assert!((score(&hf1, &h, &pred, b).unwrap() - 0.4).abs() < 1e-15);
        for beta in [0.3, 1.0, 2.5] {
            let m = CostModel::builtin(MetricKind::HfBeta(beta));
            for &y in h.leaves() {
                let p = Prediction::node_set(&h, &[y]).unwrap();
                assert!((score(&m, &h, &p, y).unwrap() - 1.0).abs() < 1e-15);
            }
        }
        // A single node is scored as the singleton set.
        assert_eq!(
            score(&hf1, &h, &Prediction::Node(a1), b).unwrap(),
            score(&hf1, &h, &pred, b).unwrap()
        );
    }

    #[test]
    fn score_space_errors() {
        let h = five();
        let dl = CostModel::builtin(MetricKind::Dl);
        let set = Prediction::node_set(&h, &[id(&h, "a1"), id(&h, "b")]).unwrap();
        assert!(matches!(score(&dl, &h, &set, id(&h, "b")), Err(Error::SpaceMismatch(_))));
        assert!(matches!(
            score(&dl, &h, &Prediction::Node(id(&h, "b")), id(&h, "A")),
            Err(Error::SpaceMismatch(_))
        ));
    }

    #[test]
    fn matrix_examples() {
        let h = five();
        let dl = build_cost_matrix(MetricKind::Dl, &h, CandidateSpace::Nodes).unwrap();
        let CostSource::Matrix(m) = &dl.source else { panic!() };
        assert_eq!((m.rows(), m.cols()), (5, 3));
        assert_eq!(m.row(0), &[2.0, 2.0, 1.0]);

        let top1 = build_cost_matrix(MetricKind::Top1, &h, CandidateSpace::Leaves).unwrap();
        let CostSource::Matrix(m) = &top1.source else { panic!() };
        for r in 0..3 {
            for c in 0..3 {
                assert_eq!(m.get(r, c), if r == c { 0.0 } else { 1.0 });
            }
        }

        let lca = build_cost_matrix(MetricKind::EtaLca, &h, CandidateSpace::Leaves).unwrap();
        let CostSource::Matrix(m) = &lca.source else { panic!() };
        assert_eq!(m.row(0), &[0.0, 1.0, 2.0]);

        assert!(build_cost_matrix(MetricKind::Dl, &h, CandidateSpace::NodeSets).is_err());
    }

    #[test]
    fn reasonableness_examples() {
        let h = five();
        let dl = build_cost_matrix(MetricKind::Dl, &h, CandidateSpace::Nodes).unwrap();
        assert_eq!(check_reasonable(&dl, &h).tag, Reasonableness::StrictReasonable);

        let wp = build_cost_matrix(MetricKind::WuPalmer, &h, CandidateSpace::Nodes).unwrap();
        let v = check_reasonable(&wp, &h);
        assert_eq!(v.tag, Reasonableness::RootedReasonable);
        assert_eq!(v.witness, None);
        // Negating into cost form explicitly gives the same verdict.
        let neg = wp.negated(&h).unwrap();
        assert_eq!(neg.orientation, Orientation::Cost);
        assert_eq!(check_reasonable(&neg, &h).tag, Reasonableness::RootedReasonable);

        let flat = CostModel::explicit(
            &h,
            CostMatrix::new(5, 3, vec![1.0; 15]).unwrap(),
            Orientation::Cost,
            CandidateSpace::Nodes,
        )
        .unwrap();
        let v = check_reasonable(&flat, &h);
        assert_eq!(v.tag, Reasonableness::NotReasonable);
        assert!(v.witness.is_some());
    }

    #[test]
    fn matrix_file_formats() {
        let m = CostMatrix::new(2, 3, vec![1.0, -2.5, 3.0, 0.0, 1e-3, 7.0]).unwrap();
        assert_eq!(CostMatrix::parse_text(&m.to_text()).unwrap(), m);
        assert_eq!(CostMatrix::parse_binary(&m.to_binary()).unwrap(), m);
        assert!(matches!(
            CostMatrix::parse_text("2 2\n1 2\n3 x\n"),
            Err(Error::FormatError { line: 3, .. })
        ));
        assert!(CostMatrix::parse_text("2 2\n1 2 3\n").is_err());
    }

    #[test]
    fn metric_names_round_trip() {
        for s in ["top1", "lca", "dl", "dlc:0.5", "wp", "zhao", "hf:2", "hamming", "jaccard"] {
            let k: MetricKind = s.parse().unwrap();
            assert_eq!(k.to_string(), s);
        }
        assert!("dlc:-1".parse::<MetricKind>().is_err());
        assert!("hf:0".parse::<MetricKind>().is_err());
        assert!("nope".parse::<MetricKind>().is_err());
    }
}
