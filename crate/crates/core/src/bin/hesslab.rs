fn main() {
    std::process::exit(hesslab::cli::run());
}
