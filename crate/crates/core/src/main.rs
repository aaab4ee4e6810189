fn main() {
    std::process::exit(qformal::cli::dispatch(std::env::args_os()));
}
