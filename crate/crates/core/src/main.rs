fn main() {
    std::process::exit(ghgeom::cli::run(std::env::args_os()));
}
