fn main() {
    std::process::exit(susy_morse_cli::run(std::env::args_os()));
}
