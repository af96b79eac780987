fn main() {
    std::process::exit(ghz_phase::cli::main_exit_code());
}
