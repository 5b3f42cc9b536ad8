fn main() {
    std::process::exit(delaytree::cli::run_command(std::env::args_os()));
}
