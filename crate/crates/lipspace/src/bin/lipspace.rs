fn main() {
    std::process::exit(lipspace::cli::run());
}
