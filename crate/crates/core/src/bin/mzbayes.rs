fn main() {
    std::process::exit(mzbayes::cli::run(std::env::args_os()));
}
