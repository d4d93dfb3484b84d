fn main() {
    std::process::exit(phoenix_cli::run(std::env::args_os()));
}
