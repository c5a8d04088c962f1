fn main() {
    std::process::exit(local_product::cli::run_command(std::env::args_os()));
}
