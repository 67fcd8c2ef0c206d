fn main() {
    std::process::exit(stopline_cli::dispatch(std::env::args_os()));
}
