fn main() {
    std::process::exit(anonkit::cli::main_with_args(std::env::args_os()));
}
