fn main() {
    std::process::exit(mubforge::cli::main());
}
