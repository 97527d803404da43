fn main() {
    std::process::exit(fgs::cli::run(std::env::args_os()));
}
