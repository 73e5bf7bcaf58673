fn main() {
    std::process::exit(odf_cli::run(std::env::args_os()));
}
