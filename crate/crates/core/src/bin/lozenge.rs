fn main() {
    std::process::exit(lozenge::cli::run(std::env::args_os()));
}
