fn main() {
    std::process::exit(firemem::cli::main_with_args(std::env::args_os()));
}
