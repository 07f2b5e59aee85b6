fn main() {
    std::process::exit(ris_sim::cli::main_with_args(std::env::args_os()));
}
