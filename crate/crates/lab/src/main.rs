fn main() {
    std::process::exit(fbschur::cli::run(std::env::args_os()));
}
