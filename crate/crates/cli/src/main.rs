fn main() {
    std::process::exit(gcenter_cli::run(std::env::args_os()));
}
