fn main() {
    std::process::exit(expanderlab_cli::main_with_args(std::env::args_os()));
}
