fn main() {
    std::process::exit(gpd::cli::run(std::env::args_os()));
}
