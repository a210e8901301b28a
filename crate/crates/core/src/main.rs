fn main() {
    std::process::exit(parabolicity::cli::run());
}
