fn main() {
    std::process::exit(amo_core::cli::run(std::env::args_os()));
}
