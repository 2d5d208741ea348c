fn main() {
    std::process::exit(biocircuit::cli::run(std::env::args_os()));
}
