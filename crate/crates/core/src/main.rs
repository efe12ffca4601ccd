fn main() {
    std::process::exit(interinfo::cli::run(std::env::args_os()));
}
