//! Drive the command line in-process: generate data, then evaluate it.

fn main() {
    let dir = std::env::temp_dir().join("hierdecode-cli-example");
    let out = dir.to_str().unwrap();
    let run = |args: &[&str]| {
        println!("$ hierdecode {}", args.join(" "));
        let code = hierdecode::cli::run(std::iter::once("hierdecode").chain(args.iter().copied()));
        println!("(exit {code})\n");
    };
    run(&["synth", "--n", "500", "--alpha", "0.5", "--seed", "7", "--tree", "random:12:3", "--output", out]);
    let hier = format!("{out}/hierarchy.tsv");
    let probs = format!("{out}/probs.csv");
    let labels = format!("{out}/labels.txt");
    run(&["validate", "--hierarchy", &hier, "--metric", "zhao"]);
    run(&["eval", "--hierarchy", &hier, "--probs", &probs, "--labels", &labels, "--metric", "hf:2", "--decoders", "optimal,argmax,majority"]);
    run(&["decode", "--hierarchy", &hier, "--probs", &probs, "--metric", "no-such-metric"]);
}
