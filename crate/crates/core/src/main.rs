fn main() {
    std::process::exit(infill::cli::main());
}
