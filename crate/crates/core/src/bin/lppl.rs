fn main() {
    std::process::exit(lppl::cli::run(std::env::args_os()));
}
