fn main() {
    std::process::exit(generic_integrators::cli::main_with_args(std::env::args_os()));
}
