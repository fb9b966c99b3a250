fn main() {
    std::process::exit(unsharp::cli::main_with_args(std::env::args_os()));
}
