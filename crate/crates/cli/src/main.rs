fn main() {
    std::process::exit(moment_witness_cli::main_with_args(std::env::args_os()));
}
