fn main() {
    std::process::exit(prgg::cli::run_cli(std::env::args_os()));
}
