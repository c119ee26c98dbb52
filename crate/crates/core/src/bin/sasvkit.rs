fn main() {
    std::process::exit(sasv_kit::cli::run(std::env::args_os()));
}
