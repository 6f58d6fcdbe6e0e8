fn main() {
    std::process::exit(remotesam::cli::run(std::env::args_os()));
}
