fn main() {
    std::process::exit(subwave_cli::main_with_args(std::env::args_os()));
}
