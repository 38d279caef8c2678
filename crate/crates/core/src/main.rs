fn main() {
    std::process::exit(varlp::cli::main())
}
