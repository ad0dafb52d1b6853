fn main() {
    std::process::exit(lorcone::cli::main());
}
