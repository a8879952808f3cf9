fn main() {
    std::process::exit(kode::cli::main_from_env());
}
