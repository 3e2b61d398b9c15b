//! Randomized agreement checks between every fast decoder and its oracle.

fn main() -> hierdecode::Result<()> {
    let report = hierdecode::verify::run_verification(100, 2024)?;
    print!("{}", report.to_text());
    println!("{}", if report.passed() { "all suites passed" } else { "FAILURES" });
    Ok(())
}
