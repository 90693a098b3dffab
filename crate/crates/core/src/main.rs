fn main() {
    std::process::exit(farfield_imaging::cli::cli_main(std::env::args_os()));
}
