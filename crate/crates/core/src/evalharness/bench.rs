use std::time::Instant;

use serde::Serialize;

use super::synth::{dirichlet, rng};
use crate::decoder::Decoder;
use crate::decode_node::Variant;
use crate::error::Result;
use crate::hierarchy::Hierarchy;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchReport {
    pub decoder: String,
    pub samples: usize,
    pub mean_us: f64,
    pub median_us: f64,
    pub p95_us: f64,
    /// Mean size of the candidate set (node decoders) or search set (hF).
    pub mean_candidates: Option<f64>,
    pub max_candidates: Option<usize>,
    /// `(d_max + 1) / q_min_floor` for strict node decoders.
    pub candidate_bound: Option<f64>,
}

impl BenchReport {
    /// Whether every sample respected the candidate bound (when one applies).
    pub fn bound_holds(&self) -> Option<bool> {
        match (self.max_candidates, self.candidate_bound) {
            (Some(m), Some(b)) => Some(m as f64 <= b),
            _ => None,
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = format!(
            "{}: {} samples, mean {:.2} us, median {:.2} us, p95 {:.2} us",
            self.decoder, self.samples, self.mean_us, self.median_us, self.p95_us
        );
        if let Some(m) = self.mean_candidates {
            out.push_str(&format!(", mean candidates {m:.2}"));
        }
        if let Some(b) = self.candidate_bound {
            out.push_str(&format!(" (bound {b:.2})"));
        }
        out.push('\n');
        out
    }
}

/// Times `decoder` on `samples` Dirichlet(`alpha`) rows, one at a time.
pub fn bench(h: &Hierarchy, decoder: &Decoder, samples: usize, alpha: f64, seed: u64) -> Result<BenchReport> {
    let mut rng = rng(seed);
    let rows = (0..samples.max(1))
        .map(|_| dirichlet(&mut rng, h.leaf_count(), alpha))
        .collect::<Result<Vec<_>>>()?;
    let mut times = Vec::with_capacity(rows.len());
    let mut sizes = Vec::new();
    for p in &rows {
        let t = Instant::now();
        let (_, size) = decoder.decode_with_size(h, p)?;
        times.push(t.elapsed().as_secs_f64() * 1e6);
        sizes.extend(size);
    }
    let mean_us = times.iter().sum::<f64>() / times.len() as f64;
    times.sort_by(f64::total_cmp);
    let pick = |q: f64| times[((times.len() - 1) as f64 * q).round() as usize];
    let candidate_bound = decoder
        .node_decoder()
        .map(|d| d.thresholds())
        .filter(|t| t.variant() == Variant::Strict)
        .map(|t| t.candidate_bound(h));
    Ok(BenchReport {
        decoder: decoder.name(),
        samples: rows.len(),
        mean_us,
        median_us: pick(0.5),
        p95_us: pick(0.95),
        mean_candidates: (!sizes.is_empty())
            .then(|| sizes.iter().sum::<usize>() as f64 / sizes.len() as f64),
        max_candidates: sizes.iter().copied().max(),
        candidate_bound,
    })
}
