fn main() {
    std::process::exit(ep2d_cli::run(std::env::args_os()));
}
