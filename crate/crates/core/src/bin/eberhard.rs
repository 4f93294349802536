fn main() {
    std::process::exit(eberhard::cli::run_subcommand(std::env::args_os()));
}
