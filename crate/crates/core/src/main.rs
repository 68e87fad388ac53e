fn main() {
    std::process::exit(rsrm::cli::run_from_env());
}
