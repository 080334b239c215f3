fn main() {
    std::process::exit(nodal_heat_cli::run_from_args(std::env::args_os()));
}
