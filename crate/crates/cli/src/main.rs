fn main() {
    std::process::exit(rcsplit_cli::run(std::env::args_os()));
}
