fn main() {
    std::process::exit(csaga::bench::cli::main());
}
