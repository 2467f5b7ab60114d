fn main() {
    std::process::exit(periodpoly::cli::run(std::env::args_os()));
}
