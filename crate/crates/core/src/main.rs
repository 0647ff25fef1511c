fn main() {
    std::process::exit(tulving::cli::main_with_args(std::env::args().collect()));
}
