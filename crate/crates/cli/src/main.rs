fn main() {
    std::process::exit(cavity_grover_cli::run(std::env::args_os()));
}
