fn main() {
    std::process::exit(entmono::cli::run());
}
