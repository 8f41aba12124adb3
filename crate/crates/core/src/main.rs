fn main() {
    std::process::exit(nilharm::cli::main_with_args(std::env::args_os()));
}
