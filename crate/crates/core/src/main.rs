fn main() {
    std::process::exit(algebragen::cli::run());
}
