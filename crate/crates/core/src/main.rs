fn main() {
    std::process::exit(se2_ocp::cli::run(std::env::args_os()));
}
