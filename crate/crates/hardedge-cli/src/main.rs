fn main() {
    std::process::exit(hardedge_cli::cli::main_with(std::env::args_os()));
}
