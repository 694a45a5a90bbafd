fn main() {
    std::process::exit(swsec::cli::main_with(std::env::args_os()));
}
