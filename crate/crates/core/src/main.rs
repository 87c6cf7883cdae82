fn main() {
    std::process::exit(benford_copula::cli::run());
}
