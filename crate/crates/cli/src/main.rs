fn main() {
    std::process::exit(cyclic_thomae_cli::run(std::env::args_os()));
}
