fn main() {
    std::process::exit(bbt::cli::main(std::env::args_os()));
}
