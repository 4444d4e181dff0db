fn main() {
    std::process::exit(homecyber::scenario_io::cli_dispatch(std::env::args_os()));
}
