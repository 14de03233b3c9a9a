fn main() {
    std::process::exit(fracsteer_cli::run(std::env::args_os()));
}
