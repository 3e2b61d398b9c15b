fn main() {
    std::process::exit(hierdecode::cli::run(std::env::args_os()));
}
