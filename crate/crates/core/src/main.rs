fn main() {
    std::process::exit(guidance::cli::main());
}
