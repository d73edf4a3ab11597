fn main() {
    std::process::exit(pdtn::cli::run(std::env::args_os()));
}
