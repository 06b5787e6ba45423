fn main() {
    std::process::exit(ballzeros::cli::run(std::env::args_os()));
}
