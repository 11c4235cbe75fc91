fn main() {
    std::process::exit(ttbc_cli::main_with_args(std::env::args_os()));
}
