//! Where on the 3-leaf simplex do two decoders disagree? Writes a CSV and a
//! PPM image to the temp directory.

use hierdecode::evalharness::agreement_map;
use hierdecode::{Decoder, DecoderSpec, Hierarchy};

fn main() -> hierdecode::Result<()> {
    let h = Hierarchy::parse_tsv("r\tA\nA\ta1\nA\ta2\nr\tb\n")?;
    let optimal = Decoder::prepare(DecoderSpec::parse("optimal:hf:1", "dl".parse()?)?, &h)?;
    let dir = std::env::temp_dir().join("hierdecode-agreement-example");
    std::fs::create_dir_all(&dir)?;
    for other in ["argmax", "topdown", "majority", "optimal:dl"] {
        let d = Decoder::prepare(DecoderSpec::parse(other, "dl".parse()?)?, &h)?;
        let grid = agreement_map(&h, &optimal, &d, 60)?;
        let stem = other.replace(':', "_");
        std::fs::write(dir.join(format!("{stem}.csv")), grid.to_csv())?;
        std::fs::write(dir.join(format!("{stem}.ppm")), grid.to_ppm())?;
        println!(
            "{} vs {:<10} agree on {:5.1}% of {} points",
            grid.decoder_a,
            grid.decoder_b,
            100.0 * grid.agreement_fraction(),
            grid.points.len()
        );
    }
    println!("maps written to {}", dir.display());
    Ok(())
}
