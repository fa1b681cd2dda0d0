fn main() {
    std::process::exit(cylwig_cli::run(std::env::args_os()));
}
