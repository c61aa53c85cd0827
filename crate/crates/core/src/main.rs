fn main() {
    std::process::exit(dpsketch::cli::run(std::env::args_os()));
}
