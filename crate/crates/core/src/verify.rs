//! Randomized cross-checks of the fast decoders against the brute-force
//! oracles, plus the structural bounds they rely on.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use crate::decode_hfbeta::{q_set, search_set, utility_lower_bound, HfBetaContext};
use crate::decode_node::{decode_threshold_closed_form, find_candidate_set, NodeDecoder, Variant};
use crate::evalharness::synth::{dirichlet, random_reasonable_matrix, random_tree, rng};
use crate::error::Result;
use crate::hierarchy::{Hierarchy, LeafDistribution};
use crate::metrics::{CandidateSpace, CostModel, MetricKind, Orientation};
use crate::oracle::{brute_force_node, brute_force_set, count_antichains, phi_roundtrip_check};

/// Absolute tolerance on risk and utility comparisons.
pub const TOLERANCE: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteResult {
    pub name: String,
    pub trials: usize,
    pub failures: usize,
    pub first_failure: Option<String>,
}

impl SuiteResult {
    fn new(name: &str) -> Self {
        SuiteResult {
            name: name.to_string(),
            trials: 0,
            failures: 0,
            first_failure: None,
        }
    }

    fn record(&mut self, ok: bool, detail: impl FnOnce() -> String) {
        self.trials += 1;
        if !ok {
            self.failures += 1;
            if self.first_failure.is_none() {
                self.first_failure = Some(detail());
            }
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub suites: Vec<SuiteResult>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.suites.iter().all(SuiteResult::passed)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for s in &self.suites {
            out.push_str(&format!(
                "{:<6} {:<28} {:>6} trials, {} failures\n",
                if s.passed() { "PASS" } else { "FAIL" },
                s.name,
                s.trials,
                s.failures
            ));
            if let Some(f) = &s.first_failure {
                out.push_str(&format!("       first failure: {f}\n"));
            }
        }
        out
    }
}

const ALPHAS: [f64; 4] = [0.1, 0.5, 1.0, 5.0];

/// Random tree with at most `max_nodes` nodes and a Dirichlet row for it.
pub fn random_instance<R: Rng>(rng: &mut R, max_nodes: usize) -> Result<(Hierarchy, LeafDistribution)> {
    let size = rng.gen_range(2..=max_nodes);
    let h = random_tree(rng, size);
    let alpha = *ALPHAS.choose(rng).unwrap();
    let p = dirichlet(rng, h.leaf_count(), alpha)?;
    Ok((h, p))
}

/// Node-space models exercised by the node suite.
fn node_models<R: Rng>(rng: &mut R, h: &Hierarchy) -> Result<Vec<(String, CostModel)>> {
    let mut out = Vec::new();
    for kind in [
        MetricKind::Dl,
        MetricKind::Dlc(0.25),
        MetricKind::Dlc(0.5),
        MetricKind::Dlc(1.0),
        MetricKind::WuPalmer,
        MetricKind::Zhao,
    ] {
        out.push((kind.to_string(), CostModel::builtin_on(kind, CandidateSpace::Nodes)?));
    }
    let m = random_reasonable_matrix(rng, h);
    out.push((
        "random-matrix".into(),
        CostModel::explicit(h, m, Orientation::Cost, CandidateSpace::Nodes)?,
    ));
    Ok(out)
}

pub fn run_verification(trials: usize, seed: u64) -> Result<VerifyReport> {
    let mut rng = rng(seed);
    let mut node = SuiteResult::new("node decoder vs oracle");
    let mut bound_s = SuiteResult::new("candidate-set bound");
    let mut closed = SuiteResult::new("closed form vs decoder");
    let mut hf = SuiteResult::new("hF decoder vs oracle");
    let mut q_bound = SuiteResult::new("Q(p) size bound");
    let mut u_bound = SuiteResult::new("hF utility floor");
    let mut search = SuiteResult::new("hF optimum in search set");
    let mut phi = SuiteResult::new("augmentation bijection");

    for t in 0..trials {
        let (h, p) = random_instance(&mut rng, 40)?;
        let scores = h.aggregate(&p)?;
        for (name, model) in node_models(&mut rng, &h)? {
            let dec = NodeDecoder::new(&h, model.clone())?;
            let got = dec.decode_detailed(&h, &p)?;
            let (best, risk) = brute_force_node(&model, &h, &p);
            node.record((got.risk - risk).abs() <= TOLERANCE, || {
                format!("trial {t}, {name}: decoder {} ({}) vs oracle {} ({})", got.node, got.risk, best, risk)
            });
            let th = dec.thresholds();
            if th.variant() == Variant::Strict {
                let s = find_candidate_set(&h, &scores, th);
                let ok = s.len() as f64 <= th.candidate_bound(&h)
                    && s.iter().any(|&n| (dec.model().orientation.cost_sign() * dec.model().expected(&h, n, p.probs()) - risk).abs() <= TOLERANCE)
                    && h.nodes().skip(1).all(|n| th.q_min(n) <= th.q_max(n));
                bound_s.record(ok, || format!("trial {t}, {name}: |S| = {}", s.len()));
            }
            if let Some(MetricKind::Dlc(c)) = model.kind() {
                let cf = decode_threshold_closed_form(&h, &p, (1.0 + c) / 2.0)?
                    .single()
                    .unwrap();
                let cf_risk = dec.model().expected(&h, cf, p.probs());
                closed.record((cf_risk - got.risk).abs() <= TOLERANCE, || {
                    format!("trial {t}, {name}: closed form {cf} ({cf_risk}) vs {} ({})", got.node, got.risk)
                });
            }
        }

        let (h, p) = random_instance(&mut rng, 20)?;
        let scores = h.aggregate(&p)?;
        let beta = *[0.5, 1.0, 2.0].choose(&mut rng).unwrap();
        let ctx = HfBetaContext::new(&h, beta)?;
        let got = ctx.decode_detailed(&h, &p)?;
        let (ac, best) = brute_force_set(MetricKind::HfBeta(beta), &h, &p)?;
        hf.record((got.utility - best).abs() <= TOLERANCE, || {
            format!("trial {t}, beta {beta}: decoder {} vs oracle {best}", got.utility)
        });
        q_bound.record(q_set(&h, &scores, beta).len() <= ctx.n_max(), || format!("trial {t}"));
        u_bound.record(best >= utility_lower_bound(&h, beta) - TOLERANCE, || {
            format!("trial {t}: optimum {best}")
        });
        let wide = search_set(&h, &scores, &ctx);
        let aug = crate::prediction::augment(&h, &ac);
        search.record(aug.iter().all(|n| wide.contains(n)), || format!("trial {t}"));
        phi.record(
            phi_roundtrip_check(&h)? && count_antichains(&h)? >= 1,
            || format!("trial {t}"),
        );
    }
    Ok(VerifyReport {
        seed,
        suites: vec![node, bound_s, closed, hf, q_bound, u_bound, search, phi],
    })
}
