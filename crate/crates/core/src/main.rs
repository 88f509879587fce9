fn main() {
    std::process::exit(dirichlet_unique::cli::run(std::env::args_os()));
}
