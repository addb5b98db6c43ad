fn main() {
    std::process::exit(tridac::cli::main());
}
