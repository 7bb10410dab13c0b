fn main() {
    std::process::exit(cpldpc::cli::run(std::env::args_os()));
}
