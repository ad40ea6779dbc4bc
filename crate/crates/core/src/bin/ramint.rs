fn main() {
    std::process::exit(ramint::cli::run(std::env::args_os()));
}
