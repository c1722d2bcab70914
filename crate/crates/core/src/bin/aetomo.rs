fn main() {
    std::process::exit(aetomo::cli::cli_main(std::env::args_os()));
}
