fn main() {
    std::process::exit(threadnet::cli::main());
}
