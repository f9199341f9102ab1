fn main() {
    let args: Vec<String> = std::env::args().collect();
    std::process::exit(spinent_cli::run(&args));
}
