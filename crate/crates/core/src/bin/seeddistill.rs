fn main() {
    std::process::exit(seeddistill::cli::main_with_args(std::env::args_os()));
}
