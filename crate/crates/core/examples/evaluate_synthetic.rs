//! Compare decoders on oracle-labeled synthetic data, where each optimal
//! decoder should win on its own metric.

use hierdecode::evalharness::synth::{random_tree_with_leaves, rng, synth_generate};
use hierdecode::evalharness::{evaluate, paired_difference};
use hierdecode::{Decoder, DecoderSpec, HeuristicKind, MetricKind};

fn main() -> hierdecode::Result<()> {
    let h = random_tree_with_leaves(&mut rng(1), 30, 4);
    let ds = synth_generate(&h, 3000, 0.3, 2)?;
    for m in ["dl", "wp", "zhao", "hf:1"] {
        let metric: MetricKind = m.parse()?;
        let mut specs = vec![DecoderSpec::Optimal(metric)];
        specs.extend(HeuristicKind::ALL_DEFAULT.iter().map(|&k| DecoderSpec::Heuristic(k)));
        let decoders: Vec<Decoder> = specs
            .into_iter()
            .map(|s| Decoder::prepare(s, &h))
            .collect::<hierdecode::Result<_>>()?;
        let report = evaluate(&ds, metric, &decoders)?;
        print!("{}", report.to_text());
        let opt = &report.results[0];
        let sign = metric.orientation().cost_sign();
        let runner_up = report.results[1..]
            .iter()
            .min_by(|a, b| (sign * a.mean).total_cmp(&(sign * b.mean)))
            .unwrap();
        let (diff, se) = paired_difference(&runner_up.scores, &opt.scores);
        println!(
            "best heuristic {} trails by {:.4} (paired se {:.4})\n",
            runner_up.decoder,
            sign * diff,
            se
        );
    }
    Ok(())
}
