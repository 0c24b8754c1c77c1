fn main() {
    std::process::exit(ctmg_nets::cli::run(std::env::args_os()));
}
