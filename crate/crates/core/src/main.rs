fn main() {
    std::process::exit(geodiscord::cli::main_with_args(std::env::args_os()));
}
