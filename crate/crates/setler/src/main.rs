fn main() {
    std::process::exit(setler::cli::main_with(std::env::args_os()));
}
