//! Every baseline decoding rule side by side with the optimal decoders.

use hierdecode::{Decoder, DecoderSpec, HeuristicKind, Hierarchy, LeafDistribution, MetricKind};

fn main() -> hierdecode::Result<()> {
    let h = Hierarchy::parse_tsv(
        "root\tvehicle\nvehicle\tcar\nvehicle\tbus\nvehicle\ttruck\n\
         root\tanimal\nanimal\tdog\nanimal\tcat\n",
    )?;
    let p = LeafDistribution::new(vec![0.22, 0.20, 0.18, 0.25, 0.15])?;
    println!("leaves {:?}\np      {:?}", h.leaf_names(), p.probs());

    let mut specs: Vec<DecoderSpec> = HeuristicKind::ALL_DEFAULT.iter().map(|&k| DecoderSpec::Heuristic(k)).collect();
    specs.push(DecoderSpec::Heuristic(HeuristicKind::threshold(0.7)?));
    specs.push(DecoderSpec::Heuristic(HeuristicKind::darts(2.0)?));
    for m in ["dl", "wp", "zhao", "hf:1"] {
        specs.push(DecoderSpec::Optimal(m.parse::<MetricKind>()?));
    }
    for spec in specs {
        let d = Decoder::prepare(spec, &h)?;
        println!("{:<16} {}", d.name(), d.decode(&h, &p)?.display(&h));
    }
    Ok(())
}
