fn main() {
    std::process::exit(impatience::cli::run());
}
