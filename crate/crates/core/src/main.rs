fn main() {
    std::process::exit(qbret::cli::run(std::env::args_os()));
}
