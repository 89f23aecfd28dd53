fn main() {
    std::process::exit(sonine_kit::cli::main_with_args(std::env::args_os()));
}
