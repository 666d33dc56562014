fn main() {
    std::process::exit(zeroline::cli::run(std::env::args().collect()));
}
