fn main() {
    std::process::exit(qmotzkin_cli::run(std::env::args_os()));
}
