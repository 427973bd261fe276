fn main() {
    let args: Vec<String> = std::env::args().collect();
    std::process::exit(funk_lab::cli::run(args));
}
