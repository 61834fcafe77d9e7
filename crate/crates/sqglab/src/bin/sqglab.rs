fn main() {
    std::process::exit(sqglab::cli::main_cli(std::env::args_os()));
}
