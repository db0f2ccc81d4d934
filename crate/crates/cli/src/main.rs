fn main() {
    std::process::exit(meancut_cli::app::run(std::env::args_os()));
}
