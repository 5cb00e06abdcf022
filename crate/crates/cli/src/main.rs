fn main() {
    std::process::exit(warpath_cli::run(std::env::args_os()));
}
