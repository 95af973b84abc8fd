fn main() {
    std::process::exit(cutstokes::cli::main_with_args(std::env::args_os()));
}
