fn main() {
    std::process::exit(qlsc::cli::run(std::env::args_os()));
}
