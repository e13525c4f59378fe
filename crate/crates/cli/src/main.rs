fn main() {
    std::process::exit(coloc_cli::dispatch(std::env::args_os()));
}
