fn main() {
    env_logger::init();
    std::process::exit(cct_core::cli::main_with_args(std::env::args_os()));
}
