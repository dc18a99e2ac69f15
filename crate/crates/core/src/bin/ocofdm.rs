fn main() {
    std::process::exit(overclocked_ofdm::cli::run(std::env::args_os()));
}
