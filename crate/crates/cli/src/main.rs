fn main() {
    std::process::exit(affsurf_cli::main_with(std::env::args_os()));
}
