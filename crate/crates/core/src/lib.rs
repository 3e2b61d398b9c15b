//! Bayes-optimal decoding for probabilistic hierarchical classifiers.

pub mod cli;
pub mod decode_hfbeta;
pub mod decode_node;
pub mod decoder;
pub mod error;
pub mod evalharness;
pub mod heuristics;
pub mod hierarchy;
pub mod metrics;
pub mod oracle;
pub mod prediction;
pub mod verify;

pub use error::{Error, Result};
pub use hierarchy::{Hierarchy, LeafDistribution, NodeId, NodeScores};
pub use metrics::{CandidateSpace, CostMatrix, CostModel, MetricKind, Orientation};
pub use prediction::Prediction;
pub use decoder::{Decoder, DecoderSpec};
pub use heuristics::HeuristicKind;
