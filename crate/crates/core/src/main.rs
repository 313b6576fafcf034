fn main() {
    std::process::exit(manproj::cli::main_with_args(std::env::args_os()));
}
