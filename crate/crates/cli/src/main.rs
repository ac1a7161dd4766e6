fn main() {
    std::process::exit(knapagg_cli::main_with_stdio());
}
