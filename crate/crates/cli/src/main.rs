fn main() {
    std::process::exit(tetra_cli::run(std::env::args_os()))
}
