fn main() {
    std::process::exit(eisbfd::cli::run(std::env::args_os()));
}
