fn main() {
    std::process::exit(gpcp::cli::run_cli(std::env::args_os()));
}
