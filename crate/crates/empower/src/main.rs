fn main() {
    std::process::exit(empower::cli::run());
}
