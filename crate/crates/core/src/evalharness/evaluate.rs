use std::fmt::Write as _;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use super::synth::{resample_labels, rng, smooth};
use super::Dataset;
use crate::decoder::{Decoder, DecoderSpec};
use crate::error::{Error, Result};
use crate::hierarchy::{LeafDistribution, NodeId};
use crate::metrics::{score, CostModel, MetricKind, Orientation};
use crate::prediction::Prediction;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecoderResult {
    pub decoder: String,
    pub mean: f64,
    /// Sample standard deviation over `sqrt(N)`; 0 when `N = 1`.
    pub se: f64,
    /// False when `N = 1` and the standard error is undefined.
    pub se_defined: bool,
    pub mean_decode_us: f64,
    #[serde(skip)]
    pub scores: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EvalReport {
    pub metric: String,
    pub orientation: Orientation,
    pub samples: usize,
    pub results: Vec<DecoderResult>,
}

impl EvalReport {
    pub fn get(&self, decoder: &str) -> Option<&DecoderResult> {
        self.results.iter().find(|r| r.decoder == decoder)
    }

    pub fn to_text(&self) -> String {
        let width = self.results.iter().map(|r| r.decoder.len()).max().unwrap_or(7).max(7);
        let mut out = format!(
            "metric {} ({:?}), {} samples\n{:<width$}  {:>12}  {:>12}  {:>10}\n",
            self.metric, self.orientation, self.samples, "decoder", "mean", "se", "us/sample"
        );
        for r in &self.results {
            let se = if r.se_defined {
                format!("{:.6}", r.se)
            } else {
                "n/a".to_string()
            };
            let _ = writeln!(
                out,
                "{:<width$}  {:>12.6}  {:>12}  {:>10.2}",
                r.decoder, r.mean, se, r.mean_decode_us
            );
        }
        out
    }
}

/// Mean and standard error of a sample.
fn mean_se(xs: &[f64]) -> (f64, f64, bool) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0, false);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt(), true)
}

/// Mean and standard error of `a - b` over paired samples.
pub fn paired_difference(a: &[f64], b: &[f64]) -> (f64, f64) {
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let (m, se, _) = mean_se(&d);
    (m, se)
}

fn run_decoder(
    d: &Decoder,
    model: &CostModel,
    ds: &Dataset,
    rows: &[LeafDistribution],
    labels: &[NodeId],
) -> Result<DecoderResult> {
    let h = &ds.hierarchy;
    let per: Vec<(f64, f64)> = rows
        .par_iter()
        .zip(labels.par_iter())
        .map(|(p, &y)| {
            let t = Instant::now();
            let pred: Prediction = d.decode(h, p)?;
            let us = t.elapsed().as_secs_f64() * 1e6;
            Ok((score(model, h, &pred, y)?, us))
        })
        .collect::<Result<_>>()?;
    let scores: Vec<f64> = per.iter().map(|x| x.0).collect();
    let (mean, se, se_defined) = mean_se(&scores);
    let mean_decode_us = per.iter().map(|x| x.1).sum::<f64>() / per.len() as f64;
    Ok(DecoderResult {
        decoder: d.name(),
        mean,
        se,
        se_defined,
        mean_decode_us,
        scores,
    })
}

/// Empirical mean score of each decoder against the dataset labels.
pub fn evaluate(ds: &Dataset, metric: MetricKind, decoders: &[Decoder]) -> Result<EvalReport> {
    let labels = ds.labels()?;
    evaluate_rows(ds, metric, decoders, &ds.distributions, labels)
}

fn evaluate_rows(
    ds: &Dataset,
    metric: MetricKind,
    decoders: &[Decoder],
    rows: &[LeafDistribution],
    labels: &[NodeId],
) -> Result<EvalReport> {
    if rows.is_empty() {
        return Err(Error::InvalidParam("dataset is empty".into()));
    }
    let model = CostModel::builtin(metric);
    let results = decoders
        .iter()
        .map(|d| run_decoder(d, &model, ds, rows, labels))
        .collect::<Result<_>>()?;
    Ok(EvalReport {
        metric: metric.to_string(),
        orientation: metric.orientation(),
        samples: rows.len(),
        results,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepOptions {
    pub seed: u64,
    /// Draw fresh labels from the smoothed rows (keeps the rows the true
    /// posteriors). When false the original labels are kept.
    pub resample_labels: bool,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            seed: 0,
            resample_labels: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepPoint {
    pub lambda: f64,
    pub decoder: String,
    pub mean: f64,
    pub se: f64,
    /// Relative loss versus the optimal decoder, in percent (positive means
    /// worse). Absent when the optimal mean is 0.
    pub gap_pct: Option<f64>,
    /// Paired standard error of the gap, in percent.
    pub gap_se_pct: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepReport {
    pub metric: String,
    pub reference: String,
    pub points: Vec<SweepPoint>,
}

impl SweepReport {
    pub fn point(&self, lambda: f64, decoder: &str) -> Option<&SweepPoint> {
        self.points
            .iter()
            .find(|p| p.lambda == lambda && p.decoder == decoder)
    }

    pub fn to_text(&self) -> String {
        let width = self.points.iter().map(|p| p.decoder.len()).max().unwrap_or(7).max(7);
        let mut out = format!(
            "metric {}, reference {}\n{:>6}  {:<width$}  {:>12}  {:>10}  {:>10}\n",
            self.metric, self.reference, "lambda", "decoder", "mean", "gap %", "gap se %"
        );
        let fmt = |v: Option<f64>| v.map_or("n/a".to_string(), |x| format!("{x:.3}"));
        for p in &self.points {
            let _ = writeln!(
                out,
                "{:>6.3}  {:<width$}  {:>12.6}  {:>10}  {:>10}",
                p.lambda,
                p.decoder,
                p.mean,
                fmt(p.gap_pct),
                fmt(p.gap_se_pct)
            );
        }
        out
    }
}

/// Evaluates decoders on rows mixed toward uniform, `(1 - lambda) p + lambda u`,
/// and reports gaps relative to the metric's optimal decoder. At `lambda = 0`
/// the rows and labels are left untouched.
pub fn smooth_sweep(
    ds: &Dataset,
    metric: MetricKind,
    decoders: &[Decoder],
    lambdas: &[f64],
    opts: SweepOptions,
) -> Result<SweepReport> {
    let base_labels = ds.labels()?;
    if let Some(&bad) = lambdas.iter().find(|l| !(0.0..=1.0).contains(*l)) {
        return Err(Error::InvalidLambda(bad));
    }
    let h = &ds.hierarchy;
    let opt_spec = DecoderSpec::Optimal(metric);
    let mut all: Vec<Decoder> = Vec::with_capacity(decoders.len() + 1);
    if !decoders.iter().any(|d| d.spec() == opt_spec) {
        all.push(Decoder::prepare(opt_spec, h)?);
    }
    all.extend(decoders.iter().cloned());
    let reference = opt_spec.to_string();
    let sign = metric.orientation().cost_sign();

    let mut points = Vec::new();
    for (li, &lambda) in lambdas.iter().enumerate() {
        let report = if lambda == 0.0 {
            evaluate_rows(ds, metric, &all, &ds.distributions, base_labels)?
        } else {
            let rows: Vec<LeafDistribution> = ds.distributions.iter().map(|p| smooth(p, lambda)).collect();
            let labels = if opts.resample_labels {
                let mut r = rng(opts.seed ^ (li as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
                resample_labels(&mut r, h, &rows)
            } else {
                base_labels.to_vec()
            };
            evaluate_rows(ds, metric, &all, &rows, &labels)?
        };
        let opt = report.get(&reference).expect("reference decoder evaluated");
        for r in &report.results {
            let (gap_pct, gap_se_pct) = if opt.mean == 0.0 {
                (None, None)
            } else {
                let (diff, se) = paired_difference(&r.scores, &opt.scores);
                let scale = 100.0 / opt.mean.abs();
                (Some(sign * diff * scale + 0.0), Some(se * scale))
            };
            points.push(SweepPoint {
                lambda,
                decoder: r.decoder.clone(),
                mean: r.mean,
                se: r.se,
                gap_pct,
                gap_se_pct,
            });
        }
    }
    Ok(SweepReport {
        metric: metric.to_string(),
        reference,
        points,
    })
}
