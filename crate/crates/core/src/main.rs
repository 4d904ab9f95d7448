fn main() {
    std::process::exit(tvn::cli::run(std::env::args_os()));
}
