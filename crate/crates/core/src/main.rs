fn main() { std::process::exit(tdcover::cli::run_cli(std::env::args())) }
