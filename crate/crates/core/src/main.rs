fn main() {
    std::process::exit(qalpha::cli::run(std::env::args_os()));
}
