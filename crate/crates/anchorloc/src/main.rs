fn main() {
    std::process::exit(anchorloc::cli::main());
}
