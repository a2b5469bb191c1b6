fn main() {
    std::process::exit(dalescope::cli::main_with_args(std::env::args_os()));
}
