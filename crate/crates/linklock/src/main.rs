fn main() {
    std::process::exit(linklock::cli::cli(std::env::args_os()));
}
