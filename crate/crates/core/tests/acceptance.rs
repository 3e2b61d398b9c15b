//! Acceptance criteria, one PASS/FAIL line each. Exits non-zero when any fails.

use std::time::{Duration, Instant};

use rand::Rng;

use hierdecode::decode_hfbeta::{q_set, utility_lower_bound, HfBetaContext};
use hierdecode::decode_node::{
    decode_exhaustive, decode_reasonable, decode_threshold_closed_form, find_candidate_set, NodeDecoder, Variant,
};
use hierdecode::evalharness::synth::{
    balanced_tree, dirichlet, random_reasonable_matrix, random_tree, random_tree_with_leaves, rng,
    synth_generate, table1_shaped_tree,
};
use hierdecode::evalharness::{
    agreement_map, evaluate, load_dataset, paired_difference, smooth_sweep, SweepOptions,
};
use hierdecode::oracle::{brute_force_node, brute_force_set, count_antichains, phi_roundtrip_check};
use hierdecode::{
    CandidateSpace, CostModel, Decoder, DecoderSpec, HeuristicKind, Hierarchy, LeafDistribution, MetricKind,
    Orientation,
};

const RISK_TOL: f64 = 1e-12;
const ALPHAS: [f64; 4] = [0.1, 0.5, 1.0, 5.0];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

/// Violations of the structural bounds, collected across the randomized criteria.
#[derive(Default)]
struct Bounds {
    checks: usize,
    violations: Vec<String>,
}

impl Bounds {
    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok && self.violations.len() < 5 {
            self.violations.push(what());
        }
    }
}

fn instance<R: Rng>(r: &mut R, max_nodes: usize) -> (Hierarchy, LeafDistribution) {
    let size = r.gen_range(2..=max_nodes);
    let h = random_tree(r, size);
    let alpha = ALPHAS[r.gen_range(0..ALPHAS.len())];
    let p = dirichlet(r, h.leaf_count(), alpha).unwrap();
    (h, p)
}

fn node_equivalence(bounds: &mut Bounds) -> Outcome {
    let start = Instant::now();
    let mut r = rng(1001);
    let (mut runs, mut matrices, mut worst) = (0usize, 0usize, 0.0f64);
    let mut failure = None;
    for i in 0..200 {
        let (h, p) = instance(&mut r, 40);
        let scores = h.aggregate(&p).unwrap();
        let mut models: Vec<(String, CostModel)> = [
            MetricKind::Dl,
            MetricKind::Dlc(0.25),
            MetricKind::Dlc(0.5),
            MetricKind::Dlc(1.0),
        ]
        .iter()
        .map(|&k| (k.to_string(), CostModel::builtin_on(k, CandidateSpace::Nodes).unwrap()))
        .collect();
        for k in [MetricKind::WuPalmer, MetricKind::Zhao] {
            let gain = CostModel::builtin_on(k, CandidateSpace::Nodes).unwrap();
            let neg = gain.negated(&h).unwrap();
            assert_eq!(neg.orientation, Orientation::Cost);
            models.push((format!("-{k}"), neg));
        }
        let m = random_reasonable_matrix(&mut r, &h);
        models.push((
            "matrix".into(),
            CostModel::explicit(&h, m, Orientation::Cost, CandidateSpace::Nodes).unwrap(),
        ));
        matrices += 1;
        for (name, model) in models {
            let dec = NodeDecoder::new(&h, model.clone()).unwrap();
            let t = dec.thresholds();
            let got = decode_reasonable(&model, &h, &p, t).unwrap().single().unwrap();
            let got_risk = model.orientation.cost_sign() * model.expected(&h, got, p.probs());
            let (_, best) = brute_force_node(&model, &h, &p);
            let err = (got_risk - best).abs();
            worst = worst.max(err);
            runs += 1;
            if err > RISK_TOL && failure.is_none() {
                failure = Some(format!("instance {i} {name}: {got_risk} vs {best}"));
            }
            for n in h.nodes() {
                bounds.check(t.q_min(n) <= t.q_max(n), || format!("q_min > q_max at node {n:?} ({name})"));
            }
            if t.variant() == Variant::Strict {
                let s = find_candidate_set(&h, &scores, t);
                let bound = t.candidate_bound(&h);
                bounds.check(s.len() as f64 <= bound, || {
                    format!("|S| = {} > {bound} ({name})", s.len())
                });
            }
        }
    }
    let elapsed = start.elapsed();
    let pass = failure.is_none() && elapsed < Duration::from_secs(30);
    outcome(
        pass,
        format!(
            "{runs} decodes on 200 trees ({matrices} random matrices), max |risk - oracle| = {worst:.1e}, {:.1}s{}",
            elapsed.as_secs_f64(),
            failure.map(|f| format!("; first mismatch: {f}")).unwrap_or_default()
        ),
    )
}

fn hf_equivalence(bounds: &mut Bounds) -> Outcome {
    let start = Instant::now();
    let mut r = rng(2002);
    let mut worst = 0.0f64;
    let mut failure = None;
    for i in 0..240 {
        let (h, p) = instance(&mut r, 20);
        let beta = [0.5, 1.0, 2.0][i % 3];
        let ctx = HfBetaContext::new(&h, beta).unwrap();
        let got = ctx.decode_detailed(&h, &p).unwrap();
        let (_, best) = brute_force_set(MetricKind::HfBeta(beta), &h, &p).unwrap();
        let err = (got.utility - best).abs();
        worst = worst.max(err);
        if err > RISK_TOL && failure.is_none() {
            failure = Some(format!("instance {i} beta {beta}: {} vs {best}", got.utility));
        }
        let d = f64::from(h.max_depth());
        let q = q_set(&h, &h.aggregate(&p).unwrap(), beta).len();
        let q_bound = (1.0 + beta * beta * (d + 1.0)) * (d + 1.0);
        bounds.check(q as f64 <= q_bound, || format!("|Q(p)| = {q} > {q_bound}"));
        let floor = utility_lower_bound(&h, beta);
        bounds.check(best >= floor - RISK_TOL, || format!("optimum {best} < {floor}"));
        if h.node_count() <= 20 {
            bounds.check(phi_roundtrip_check(&h).unwrap(), || "augmentation is not a bijection".into());
        }
    }
    let elapsed = start.elapsed();
    outcome(
        failure.is_none() && elapsed < Duration::from_secs(60),
        format!(
            "240 trees, beta in {{0.5, 1, 2}}, max |utility - oracle| = {worst:.1e}, {:.1}s{}",
            elapsed.as_secs_f64(),
            failure.map(|f| format!("; first mismatch: {f}")).unwrap_or_default()
        ),
    )
}

fn closed_form() -> Outcome {
    let mut r = rng(3003);
    let (mut exact, mut ties) = (0, 0);
    let mut failure = None;
    for i in 0..1000 {
        let (h, p) = instance(&mut r, 40);
        let c = [0.0, 0.25, 0.5, 1.0, r.gen_range(0.0..1.0)][i % 5];
        let model = CostModel::builtin_on(MetricKind::Dlc(c), CandidateSpace::Nodes).unwrap();
        let dec = NodeDecoder::new(&h, model.clone()).unwrap();
        let a = decode_reasonable(&model, &h, &p, dec.thresholds()).unwrap().single().unwrap();
        let b = decode_threshold_closed_form(&h, &p, (1.0 + c) / 2.0).unwrap().single().unwrap();
        if a == b {
            exact += 1;
        } else if (model.expected(&h, a, p.probs()) - model.expected(&h, b, p.probs())).abs() <= RISK_TOL {
            ties += 1;
        } else if failure.is_none() {
            failure = Some(format!("instance {i}, c = {c}: {} vs {}", h.name(a), h.name(b)));
        }
    }
    outcome(
        failure.is_none(),
        format!(
            "1000 instances: {exact} identical, {ties} equal-risk ties{}",
            failure.map(|f| format!("; mismatch: {f}")).unwrap_or_default()
        ),
    )
}

fn structural_bounds(mut bounds: Bounds) -> Outcome {
    let mut r = rng(4004);
    let mut trees = 0;
    for _ in 0..300 {
        let leaves = r.gen_range(2..=10);
        let h = random_tree_with_leaves(&mut r, leaves, 4);
        if h.node_count() > 20 {
            continue;
        }
        trees += 1;
        let count = count_antichains(&h).unwrap() as f64;
        let floor = 2f64.powf(h.node_count() as f64 / 2.0) - 1.0;
        bounds.check(count >= floor, || format!("{count} antichains < {floor} on {} nodes", h.node_count()));
        bounds.check(phi_roundtrip_check(&h).unwrap(), || "augmentation is not a bijection".into());
    }
    let pass = bounds.violations.is_empty();
    outcome(
        pass,
        format!(
            "{} checks (thresholds, |S|, |Q(p)|, hF floor, antichain count on {trees} branching trees, bijection){}",
            bounds.checks,
            if pass { String::new() } else { format!("; violations: {:?}", bounds.violations) }
        ),
    )
}

fn dominance_setup(alpha: f64, seed: u64) -> hierdecode::evalharness::Dataset {
    let h = random_tree_with_leaves(&mut rng(seed), 50, 4);
    synth_generate(&h, 20_000, alpha, seed + 1).unwrap()
}

const SIX: [MetricKind; 6] = [
    MetricKind::Dl,
    MetricKind::WuPalmer,
    MetricKind::Zhao,
    MetricKind::HfBeta(0.5),
    MetricKind::HfBeta(1.0),
    MetricKind::HfBeta(2.0),
];

fn bayes_dominance() -> Outcome {
    let mut worst = f64::NEG_INFINITY;
    let mut failures = Vec::new();
    let mut comparisons = 0;
    for (alpha, seed) in [(0.1, 50), (1.0, 60)] {
        let ds = dominance_setup(alpha, seed);
        let h = &ds.hierarchy;
        for metric in SIX {
            let mut decs = vec![Decoder::prepare(DecoderSpec::Optimal(metric), h).unwrap()];
            decs.extend(
                HeuristicKind::ALL_DEFAULT
                    .iter()
                    .map(|&k| Decoder::prepare(DecoderSpec::Heuristic(k), h).unwrap()),
            );
            let rep = evaluate(&ds, metric, &decs).unwrap();
            let opt = &rep.results[0];
            let sign = metric.orientation().cost_sign();
            for heur in &rep.results[1..] {
                comparisons += 1;
                let (diff, se) = paired_difference(&opt.scores, &heur.scores);
                // Positive excess means the optimal decoder looks worse.
                let excess = sign * diff - 3.0 * se;
                let z = if se > 0.0 { sign * diff / se } else { 0.0 };
                worst = worst.max(z);
                if excess > 0.0 {
                    failures.push(format!("alpha {alpha} {metric}: {} beats optimal", heur.decoder));
                }
            }
        }
    }
    outcome(
        failures.is_empty(),
        format!(
            "{comparisons} optimal-vs-heuristic comparisons at N = 20000, worst (optimal - heuristic)/se = {worst:.2} (limit 3){}",
            if failures.is_empty() { String::new() } else { format!("; {failures:?}") }
        ),
    )
}

fn sweep_trend() -> Outcome {
    let metric = MetricKind::HfBeta(1.0);
    let mut lines = Vec::new();
    let mut pass = true;
    for (alpha, seed) in [(0.1, 50), (1.0, 60)] {
        let ds = dominance_setup(alpha, seed);
        let argmax = Decoder::prepare(DecoderSpec::Heuristic(HeuristicKind::ArgmaxLeaf), &ds.hierarchy).unwrap();
        let rep = smooth_sweep(&ds, metric, &[argmax], &[0.0, 0.75], SweepOptions { seed: 7, ..Default::default() })
            .unwrap();
        let g0 = rep.point(0.0, "argmax").unwrap();
        let g1 = rep.point(0.75, "argmax").unwrap();
        let (a, sa) = (g0.gap_pct.unwrap(), g0.gap_se_pct.unwrap());
        let (b, sb) = (g1.gap_pct.unwrap(), g1.gap_se_pct.unwrap());
        let se = (sa * sa + sb * sb).sqrt();
        let ok = b - a >= 3.0 * se;
        pass &= ok;
        lines.push(format!("alpha {alpha}: gap {a:.2}% -> {b:.2}% (se of change {se:.2}%)"));
    }
    outcome(pass, lines.join(", "))
}

fn agreement() -> Outcome {
    let h = Hierarchy::parse_tsv("r\tA\nA\ta1\nA\ta2\nr\tb\n").unwrap();
    let hf = Decoder::prepare(DecoderSpec::Optimal(MetricKind::HfBeta(1.0)), &h).unwrap();
    let maj = Decoder::prepare(DecoderSpec::Heuristic(HeuristicKind::Majority), &h).unwrap();
    let g1 = agreement_map(&h, &hf, &maj, 200).unwrap();
    let g2 = agreement_map(&h, &hf, &maj, 200).unwrap();
    let frac = g1.agreement_fraction();
    let corners: Vec<bool> = g1
        .points
        .iter()
        .filter(|p| [p.ijk.0, p.ijk.1, p.ijk.2].contains(&200))
        .map(|p| p.agree)
        .collect();
    let stable = g1.to_csv() == g2.to_csv() && g1.to_ppm() == g2.to_ppm();
    let pass = frac > 0.0 && frac < 1.0 && corners.len() == 3 && corners.iter().all(|&c| c) && stable;
    outcome(
        pass,
        format!(
            "{} points, agreement {:.4}, vertices agree {:?}, byte-stable {stable}",
            g1.points.len(),
            frac,
            corners
        ),
    )
}

fn per_sample<F: FnMut(&LeafDistribution)>(rows: &[LeafDistribution], mut f: F) -> f64 {
    let t = Instant::now();
    for p in rows {
        f(p);
    }
    t.elapsed().as_secs_f64() / rows.len() as f64
}

fn performance() -> Outcome {
    let h = balanced_tree(3, 8);
    let mut r = rng(8008);
    let rows: Vec<LeafDistribution> = (0..20).map(|_| dirichlet(&mut r, h.leaf_count(), 1.0).unwrap()).collect();
    let mut lines = vec![format!("{} nodes", h.node_count())];
    let mut pass = true;
    for kind in [MetricKind::Dl, MetricKind::WuPalmer] {
        let model = CostModel::builtin_on(kind, CandidateSpace::Nodes).unwrap();
        let dec = NodeDecoder::with_budget(&h, model.clone(), 0).unwrap();
        let t = dec.thresholds().clone();
        let fast = per_sample(&rows, |p| {
            decode_reasonable(&model, &h, p, &t).unwrap();
        });
        let exhaustive = per_sample(&rows[..3], |p| {
            decode_exhaustive(&model, &h, p).unwrap();
        });
        let oracle = per_sample(&rows[..2], |p| {
            brute_force_node(&model, &h, p);
        });
        let (s1, s2) = (exhaustive / fast, oracle / fast);
        pass &= s1 >= 5.0 && s2 >= 5.0;
        lines.push(format!(
            "{kind} {:.2} ms vs exhaustive {:.0} ms ({s1:.0}x), oracle {:.0} ms ({s2:.0}x)",
            fast * 1e3,
            exhaustive * 1e3,
            oracle * 1e3
        ));
    }
    let ctx = HfBetaContext::new(&h, 1.0).unwrap();
    let hf = per_sample(&rows, |p| {
        ctx.decode(&h, p).unwrap();
    });
    pass &= hf < 0.1;
    lines.push(format!("hF_1 {:.2} ms/sample", hf * 1e3));
    outcome(pass, lines.join("; "))
}

fn ingestion() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let gen = table1_shaped_tree(0);
    let hier = dir.path().join("tiered.tsv");
    std::fs::write(&hier, gen.to_tsv()).unwrap();
    let h = Hierarchy::read_tsv(&hier).unwrap();
    let shape = (h.node_count(), h.leaf_count(), h.max_depth());
    let round_trip = h.to_tsv() == gen.to_tsv();
    let ds = synth_generate(&h, 100, 0.5, 9).unwrap();
    let (probs, labels) = (dir.path().join("p.csv"), dir.path().join("y.txt"));
    ds.write(&probs, Some(&labels)).unwrap();
    let loaded = load_dataset(&hier, &probs, Some(&labels)).unwrap();
    let same_rows = loaded
        .distributions
        .iter()
        .zip(&ds.distributions)
        .all(|(a, b)| a.probs().iter().zip(b.probs()).all(|(x, y)| (x - y).abs() < 1e-12));
    let mut ok = shape == (843, 608, 12) && round_trip && same_rows && loaded.labels == ds.labels;
    let mut means = Vec::new();
    for metric in [MetricKind::Dl, MetricKind::HfBeta(1.0)] {
        let decs = vec![
            Decoder::prepare(DecoderSpec::Optimal(metric), &loaded.hierarchy).unwrap(),
            Decoder::prepare(DecoderSpec::Heuristic(HeuristicKind::ArgmaxLeaf), &loaded.hierarchy).unwrap(),
        ];
        for p in &loaded.distributions {
            ok &= decs[0].decode(&loaded.hierarchy, p).is_ok();
        }
        let rep = evaluate(&loaded, metric, &decs).unwrap();
        ok &= rep.samples == 100 && rep.results.iter().all(|r| r.mean.is_finite());
        means.push(format!("{metric} {:.3}/{:.3}", rep.results[0].mean, rep.results[1].mean));
    }
    outcome(
        ok,
        format!(
            "shape {shape:?}, tsv round trip {round_trip}, 100 rows reloaded, optimal/argmax means: {}",
            means.join(", ")
        ),
    )
}

fn main() {
    let mut bounds = Bounds::default();
    let criteria: Vec<(&str, Box<dyn FnOnce(&mut Bounds) -> Outcome>)> = vec![
        ("1 node decoder matches oracle", Box::new(node_equivalence)),
        ("2 hF decoder matches oracle", Box::new(hf_equivalence)),
        ("3 closed form matches decoder", Box::new(|_| closed_form())),
    ];
    let mut results = Vec::new();
    for (name, f) in criteria {
        results.push((name, f(&mut bounds)));
    }
    results.push(("4 structural bounds", structural_bounds(bounds)));
    results.push(("5 optimal decoders dominate", bayes_dominance()));
    results.push(("6 gap grows with smoothing", sweep_trend()));
    results.push(("7 agreement map", agreement()));
    results.push(("8 decoding speed", performance()));
    results.push(("9 large hierarchy ingestion", ingestion()));

    let mut failed = 0;
    for (name, o) in &results {
        println!("{} criterion {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        failed += usize::from(!o.pass);
    }
    println!("{} of {} criteria passed", results.len() - failed, results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
