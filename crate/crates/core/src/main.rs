fn main() {
    std::process::exit(ncqm::cli::main_with_args(std::env::args_os()));
}
