fn main() {
    std::process::exit(cfmetric::cli::run(std::env::args_os()));
}
