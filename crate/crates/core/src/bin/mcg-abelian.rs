fn main() {
    std::process::exit(mcg_abelian::cli::main_with_args(std::env::args_os()));
}
