fn main() {
    std::process::exit(seriesforge_cli::run(std::env::args_os()));
}
