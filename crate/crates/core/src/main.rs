fn main() {
    std::process::exit(bosonic_ep::experiments::cli::run(std::env::args_os()));
}
