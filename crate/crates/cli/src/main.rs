fn main() {
    std::process::exit(epiloss_cli::run_cli(std::env::args_os()));
}
