fn main() {
    std::process::exit(selfsim::run(std::env::args_os()));
}
