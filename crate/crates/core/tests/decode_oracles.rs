mod common;

use common::{tree, tree_and_dist, Naive};
use hierdecode::decode_hfbeta::{decode_hfbeta, HfBetaContext};
use hierdecode::decode_node::{decode_exhaustive, decode_threshold_closed_form, NodeDecoder};
use hierdecode::heuristics::decode_heuristic;
use hierdecode::oracle::{brute_force_leaf, brute_force_node, brute_force_set, expected_set_value};
use hierdecode::{
    CandidateSpace, CostModel, Decoder, DecoderSpec, Error, HeuristicKind, Hierarchy, LeafDistribution, MetricKind,
    NodeId, Prediction,
};
use proptest::prelude::*;

fn five() -> Hierarchy {
    Hierarchy::parse_tsv("r\tA\nA\ta1\nA\ta2\nr\tb\n").unwrap()
}

fn node_metric() -> impl Strategy<Value = MetricKind> {
    prop_oneof![
        Just(MetricKind::Dl),
        (0.0f64..=1.0).prop_map(MetricKind::Dlc),
        Just(MetricKind::WuPalmer),
        Just(MetricKind::Zhao),
    ]
}

/// hF_beta from precision and recall on ancestor sets, built from scratch.
fn naive_hf(naive: &Naive, antichain: &[NodeId], y: usize, beta: f64) -> f64 {
    let mut pred: Vec<usize> = antichain.iter().flat_map(|n| naive.path(n.index())).collect();
    pred.sort_unstable();
    pred.dedup();
    let truth = naive.path(y);
    let inter = pred.iter().filter(|n| truth.contains(n)).count() as f64;
    let (prec, rec) = (inter / pred.len() as f64, inter / truth.len() as f64);
    if prec + rec == 0.0 {
        return 0.0;
    }
    (1.0 + beta * beta) * prec * rec / (beta * beta * prec + rec)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn node_decoder_matches_brute_force((h, p) in tree_and_dist(30), kind in node_metric()) {
        let model = CostModel::builtin_on(kind, CandidateSpace::Nodes).unwrap();
        let d = NodeDecoder::new(&h, model.clone()).unwrap();
        let got = d.decode_detailed(&h, &p).unwrap();
        let (_, best) = brute_force_node(&model, &h, &p);
        prop_assert!((got.risk - best).abs() <= 1e-12, "{} vs {}", got.risk, best);
        let all = decode_exhaustive(&model, &h, &p).unwrap();
        prop_assert!((all.risk - best).abs() <= 1e-12);
        prop_assert!(got.candidates <= h.node_count());
    }

    #[test]
    fn steep_dlc_predicts_the_root((h, p) in tree_and_dist(30), c in 1.0f64..5.0) {
        let d = Decoder::prepare(DecoderSpec::Optimal(MetricKind::Dlc(c)), &h).unwrap();
        let got = d.decode(&h, &p).unwrap().single().unwrap();
        let model = CostModel::builtin(MetricKind::Dlc(c));
        let (_, best) = brute_force_node(&model, &h, &p);
        prop_assert!((model.expected(&h, got, p.probs()) - best).abs() <= 1e-12);
    }

    #[test]
    fn negation_leaves_the_decision_unchanged((h, p) in tree_and_dist(25)) {
        let wp = CostModel::builtin_on(MetricKind::WuPalmer, CandidateSpace::Nodes).unwrap();
        let a = NodeDecoder::new(&h, wp.clone()).unwrap().decode_detailed(&h, &p).unwrap();
        let b = NodeDecoder::new(&h, wp.negated(&h).unwrap()).unwrap().decode_detailed(&h, &p).unwrap();
        prop_assert!((a.risk - b.risk).abs() <= 1e-12);
    }

    #[test]
    fn closed_form_matches_dlc((h, p) in tree_and_dist(30), c in 0.0f64..1.0) {
        let model = CostModel::builtin_on(MetricKind::Dlc(c), CandidateSpace::Nodes).unwrap();
        let got = NodeDecoder::new(&h, model.clone()).unwrap().decode_detailed(&h, &p).unwrap();
        let cf = decode_threshold_closed_form(&h, &p, (1.0 + c) / 2.0).unwrap().single().unwrap();
        prop_assert!((model.expected(&h, cf, p.probs()) - got.risk).abs() <= 1e-12);
    }

    #[test]
    fn hf_matches_brute_force((h, p) in tree_and_dist(14), beta in prop::sample::select(vec![0.5, 1.0, 2.0, 0.3, 3.0])) {
        let ctx = HfBetaContext::new(&h, beta).unwrap();
        let got = ctx.decode_detailed(&h, &p).unwrap();
        let (_, best) = brute_force_set(MetricKind::HfBeta(beta), &h, &p).unwrap();
        prop_assert!((got.utility - best).abs() <= 1e-12, "{} vs {}", got.utility, best);

        // The reported utility agrees with precision/recall computed by hand.
        let naive = Naive::new(&h);
        let ac = got.prediction.antichain();
        let by_hand: f64 = (0..h.leaf_count())
            .map(|l| p.probs()[l] * naive_hf(&naive, &ac, h.leaf(l).index(), beta))
            .sum();
        prop_assert!((by_hand - got.utility).abs() <= 1e-12);
        prop_assert!((expected_set_value(MetricKind::HfBeta(beta), &h, &ac, &p) - by_hand).abs() <= 1e-12);
        prop_assert_eq!(got.k, got.prediction.augmented(&h).len());
    }

    #[test]
    fn heuristics_return_valid_predictions((h, p) in tree_and_dist(40), tau in 0.05f64..1.0, lambda in 0.0f64..3.0) {
        let mut kinds = HeuristicKind::ALL_DEFAULT.to_vec();
        kinds.push(HeuristicKind::threshold(tau).unwrap());
        kinds.push(HeuristicKind::darts(lambda).unwrap());
        let scores = h.aggregate(&p).unwrap();
        for k in kinds {
            let pred = decode_heuristic(k, &h, &p).unwrap();
            let n = pred.single().unwrap();
            prop_assert!(n.index() < h.node_count());
            if k.predicts_leaves() {
                prop_assert!(h.is_leaf(n), "{} gave internal node", k);
            }
            if let HeuristicKind::ConfidenceThreshold(t) = k {
                prop_assert!(h.is_root(n) || scores.get(n) >= t - 1e-12);
            }
        }
        let argmax = decode_heuristic(HeuristicKind::ArgmaxLeaf, &h, &p).unwrap().single().unwrap();
        prop_assert_eq!(argmax, h.leaf(p.argmax()));
    }

    #[test]
    fn top1_and_lca_decoders_match_oracle((h, p) in tree_and_dist(30)) {
        for kind in [MetricKind::Top1, MetricKind::EtaLca] {
            let d = Decoder::prepare(DecoderSpec::Optimal(kind), &h).unwrap();
            let got = d.decode(&h, &p).unwrap().single().unwrap();
            let model = CostModel::builtin(kind);
            let (_, best) = brute_force_leaf(&model, &h, &p);
            prop_assert!((model.expected(&h, got, p.probs()) - best).abs() <= 1e-12);
        }
    }

    #[test]
    fn threshold_monotone_in_tau(h in tree(30), seed in any::<u64>()) {
        let p = hierdecode::evalharness::synth::dirichlet(&mut hierdecode::evalharness::synth::rng(seed), h.leaf_count(), 0.5).unwrap();
        let lo = decode_threshold_closed_form(&h, &p, 0.55).unwrap().single().unwrap();
        let hi = decode_threshold_closed_form(&h, &p, 0.9).unwrap().single().unwrap();
        prop_assert!(h.is_ancestor(hi, lo));
    }
}

#[test]
fn worked_examples() {
    let h = five();
    let id = |s: &str| h.node_by_name(s).unwrap();
    let p = LeafDistribution::new(vec![0.4, 0.3, 0.3]).unwrap();
    assert_eq!(decode_hfbeta(&h, &p, 1.0).unwrap().display(&h), "a1");
    let dl = NodeDecoder::for_metric(&h, MetricKind::Dl).unwrap();
    assert_eq!(dl.decode(&h, &p).unwrap(), Prediction::Node(id("A")));
    let flat = LeafDistribution::new(vec![0.25, 0.25, 0.5]).unwrap();
    assert_eq!(dl.decode(&h, &flat).unwrap(), Prediction::Node(id("r")));
    assert!(matches!(decode_threshold_closed_form(&h, &p, 0.4), Err(Error::InvalidTau(_))));
    assert!(matches!(HfBetaContext::new(&h, 0.0), Err(Error::InvalidParam(_))));
    assert!(matches!(dl.decode(&h, &LeafDistribution::uniform(4)), Err(_)));
}

#[test]
fn uneven_depths_need_the_wider_search() {
    // A shallow leaf next to a deeper one; the best set includes the deep
    // leaf even though it fails the narrower threshold.
    let h = Hierarchy::parse_tsv("r\tx\nr\tm\nm\ty\n").unwrap();
    let p = LeafDistribution::new(vec![0.6442, 0.3558]).unwrap();
    let got = decode_hfbeta(&h, &p, 0.5).unwrap();
    let (_, best) = brute_force_set(MetricKind::HfBeta(0.5), &h, &p).unwrap();
    let value = expected_set_value(MetricKind::HfBeta(0.5), &h, &got.antichain(), &p);
    assert!((value - best).abs() < 1e-12);
}

#[test]
fn distributions_are_validated() {
    assert!(LeafDistribution::new(vec![0.5, 0.6]).is_err());
    assert!(LeafDistribution::new(vec![1.1, -0.1]).is_err());
    assert!(LeafDistribution::new(vec![f64::NAN, 1.0]).is_err());
    let d = LeafDistribution::new(vec![1.0 + 1e-13, -1e-13]).unwrap();
    assert_eq!(d.probs()[1], 0.0);
    assert!((d.probs().iter().sum::<f64>() - 1.0).abs() < 1e-15);
    let d = LeafDistribution::new(vec![0.5, 0.5 + 5e-7]).unwrap();
    assert!((d.probs().iter().sum::<f64>() - 1.0).abs() < 1e-15);
}
