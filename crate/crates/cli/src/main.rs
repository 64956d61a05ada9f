fn main() {
    std::process::exit(tvg_cli::run(std::env::args_os()));
}
