fn main() {
    std::process::exit(relage::run(std::env::args_os()));
}
