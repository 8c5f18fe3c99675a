fn main() {
    std::process::exit(lhsheaf::cli::run(std::env::args_os()));
}
