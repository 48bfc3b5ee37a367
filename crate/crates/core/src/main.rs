fn main() {
    std::process::exit(xx0::cli::run(std::env::args_os().collect()));
}
