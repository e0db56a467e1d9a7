//! `arcsem expand|solve|bench` — see `arcsem --help`.

fn main() {
    std::process::exit(arcsem::cli::run(std::env::args_os()));
}
