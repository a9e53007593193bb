fn main() {
    std::process::exit(hankel_core::cli::main_entry());
}
