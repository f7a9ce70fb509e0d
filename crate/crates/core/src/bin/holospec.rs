fn main() {
    std::process::exit(holospec::cli::run(std::env::args_os()));
}
