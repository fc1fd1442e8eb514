fn main() {
    std::process::exit(pairnet::cli::run(std::env::args_os()));
}
