fn main() {
    std::process::exit(persheaf::cli::run(std::env::args_os()));
}
