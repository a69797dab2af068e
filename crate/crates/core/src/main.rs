fn main() {
    std::process::exit(otsuki::cli::run_cli(std::env::args_os()));
}
