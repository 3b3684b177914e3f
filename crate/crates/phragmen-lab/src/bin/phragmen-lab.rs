fn main() {
    std::process::exit(phragmen_lab::cli::main());
}
