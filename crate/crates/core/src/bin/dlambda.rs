fn main() {
    std::process::exit(dlambda::cli::cli_main(std::env::args_os()));
}
