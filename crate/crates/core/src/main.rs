fn main() {
    std::process::exit(mmn_core::cli::main_with_args(std::env::args_os()));
}
