fn main() {
    std::process::exit(nonsplit::cli::main_with_args(std::env::args_os()))
}
