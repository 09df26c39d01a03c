fn main() {
    std::process::exit(dimerlab::cli::run());
}
