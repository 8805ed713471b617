fn main() {
    eprintln!("hsmc: command-line interface not yet wired up");
    std::process::exit(2);
}
