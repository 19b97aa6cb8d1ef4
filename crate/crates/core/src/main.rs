fn main() {
    std::process::exit(rckit::cli::run(std::env::args_os()));
}
