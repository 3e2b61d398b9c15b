//! One entry point for every decoding strategy.

use std::fmt;

use crate::decode_hfbeta::HfBetaContext;
use crate::decode_node::{decode_leaf_bayes, deepest_above, NodeDecoder, DEFAULT_MATRIX_BUDGET};
use crate::error::{Error, Result};
use crate::heuristics::{decode_heuristic, HeuristicKind};
use crate::hierarchy::{Hierarchy, LeafDistribution};
use crate::metrics::{CandidateSpace, CostModel, MetricKind};
use crate::oracle::{brute_force_leaf, brute_force_node, brute_force_set};
use crate::prediction::Prediction;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DecoderSpec {
    /// Bayes-optimal decoder for a metric.
    Optimal(MetricKind),
    Heuristic(HeuristicKind),
    /// Exhaustive search (small trees only for set metrics).
    BruteForce(MetricKind),
}

impl DecoderSpec {
    /// Parses `optimal[:metric]`, `oracle[:metric]` or a heuristic name. A
    /// missing metric falls back to `metric`.
    pub fn parse(s: &str, metric: MetricKind) -> Result<Self> {
        let with_metric = |rest: Option<&str>| -> Result<MetricKind> {
            rest.map_or(Ok(metric), str::parse)
        };
        let (head, rest) = match s.split_once(':') {
            Some((h, r)) => (h, Some(r)),
            None => (s, None),
        };
        match head {
            "optimal" => Ok(DecoderSpec::Optimal(with_metric(rest)?)),
            "oracle" | "brute" => Ok(DecoderSpec::BruteForce(with_metric(rest)?)),
            _ => Ok(DecoderSpec::Heuristic(s.parse()?)),
        }
    }

    pub fn parse_list(s: &str, metric: MetricKind) -> Result<Vec<Self>> {
        s.split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(|t| Self::parse(t, metric))
            .collect()
    }
}

impl fmt::Display for DecoderSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DecoderSpec::Optimal(m) => write!(f, "optimal:{m}"),
            DecoderSpec::Heuristic(k) => write!(f, "{k}"),
            DecoderSpec::BruteForce(m) => write!(f, "oracle:{m}"),
        }
    }
}

#[derive(Clone, Debug)]
enum Inner {
    Leaf(CostModel),
    Node(Box<NodeDecoder>),
    Threshold(f64),
    HfBeta(HfBetaContext),
    Heuristic(HeuristicKind),
    OracleLeaf(CostModel),
    OracleNode(CostModel),
    OracleSet(MetricKind),
}

/// A decoder with all per-hierarchy precomputation done.
#[derive(Clone, Debug)]
pub struct Decoder {
    spec: DecoderSpec,
    inner: Inner,
}

impl Decoder {
    pub fn prepare(spec: DecoderSpec, h: &Hierarchy) -> Result<Self> {
        Self::prepare_with_budget(spec, h, DEFAULT_MATRIX_BUDGET)
    }

    /// `budget` caps the size of dense cost matrices (see [`NodeDecoder::with_budget`]).
    pub fn prepare_with_budget(spec: DecoderSpec, h: &Hierarchy, budget: usize) -> Result<Self> {
        let inner = match spec {
            DecoderSpec::Heuristic(k) => Inner::Heuristic(k.validate()?),
            DecoderSpec::Optimal(m) => match m {
                MetricKind::Top1 | MetricKind::EtaLca => Inner::Leaf(CostModel::builtin(m)),
                // Past c = 1 every step away from the root costs on every leaf.
                MetricKind::Dlc(c) if c > 1.0 => Inner::Threshold((1.0 + c) / 2.0),
                MetricKind::Dl | MetricKind::Dlc(_) | MetricKind::WuPalmer | MetricKind::Zhao => {
                    Inner::Node(Box::new(NodeDecoder::with_budget(
                        h,
                        CostModel::builtin_on(m, CandidateSpace::Nodes)?,
                        budget,
                    )?))
                }
                MetricKind::HfBeta(b) => Inner::HfBeta(HfBetaContext::new(h, b)?),
                MetricKind::Hamming | MetricKind::Jaccard => oracle_set(m, h)?,
            },
            DecoderSpec::BruteForce(m) => match m.native_space() {
                CandidateSpace::Leaves => Inner::OracleLeaf(CostModel::builtin(m)),
                CandidateSpace::Nodes => Inner::OracleNode(CostModel::builtin(m)),
                CandidateSpace::NodeSets => oracle_set(m, h)?,
            },
        };
        Ok(Decoder { spec, inner })
    }

    pub fn spec(&self) -> DecoderSpec {
        self.spec
    }

    pub fn name(&self) -> String {
        self.spec.to_string()
    }

    pub fn decode(&self, h: &Hierarchy, p: &LeafDistribution) -> Result<Prediction> {
        match &self.inner {
            Inner::Leaf(m) => decode_leaf_bayes(m, h, p),
            Inner::Node(d) => d.decode(h, p),
            Inner::Threshold(tau) => Ok(Prediction::Node(deepest_above(h, &h.aggregate(p)?, *tau))),
            Inner::HfBeta(c) => c.decode(h, p),
            Inner::Heuristic(k) => decode_heuristic(*k, h, p),
            Inner::OracleLeaf(m) => Ok(Prediction::Leaf(brute_force_leaf(m, h, checked(h, p)?).0)),
            Inner::OracleNode(m) => Ok(Prediction::Node(brute_force_node(m, h, checked(h, p)?).0)),
            Inner::OracleSet(m) => {
                let (ac, _) = brute_force_set(*m, h, checked(h, p)?)?;
                Prediction::node_set(h, &ac)
            }
        }
    }

    /// Candidate count examined by the last stage (|S| for node decoders,
    /// the hF search-set size for hF), when meaningful.
    pub fn decode_with_size(&self, h: &Hierarchy, p: &LeafDistribution) -> Result<(Prediction, Option<usize>)> {
        match &self.inner {
            Inner::Node(d) => {
                let r = d.decode_detailed(h, p)?;
                Ok((Prediction::Node(r.node), Some(r.candidates)))
            }
            Inner::HfBeta(c) => {
                let r = c.decode_detailed(h, p)?;
                Ok((r.prediction, Some(r.search_size)))
            }
            _ => Ok((self.decode(h, p)?, None)),
        }
    }

    pub fn node_decoder(&self) -> Option<&NodeDecoder> {
        match &self.inner {
            Inner::Node(d) => Some(d),
            _ => None,
        }
    }
}

fn oracle_set(m: MetricKind, h: &Hierarchy) -> Result<Inner> {
    crate::oracle::enumerate_antichains(h)?;
    Ok(Inner::OracleSet(m))
}

fn checked<'a>(h: &Hierarchy, p: &'a LeafDistribution) -> Result<&'a LeafDistribution> {
    if p.len() != h.leaf_count() {
        return Err(Error::LengthMismatch {
            expected: h.leaf_count(),
            got: p.len(),
        });
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hierarchy::fixtures::*;

    #[test]
    fn parse_and_decode() {
        let h = five();
        let p = LeafDistribution::new(vec![0.4, 0.3, 0.3]).unwrap();
        let hf = MetricKind::HfBeta(1.0);
        for (s, expect) in [("optimal", "a1"), ("oracle", "a1"), ("majority", "A"), ("optimal:dl", "A")] {
            let spec = DecoderSpec::parse(s, hf).unwrap();
            let d = Decoder::prepare(spec, &h).unwrap();
            assert_eq!(d.decode(&h, &p).unwrap().display(&h), expect, "{s}");
        }
        assert!(DecoderSpec::parse("optimal:nope", hf).is_err());
        assert!(DecoderSpec::parse("nope", hf).is_err());
        assert_eq!(DecoderSpec::parse_list("argmax, optimal", hf).unwrap().len(), 2);
    }
}
