fn main() {
    std::process::exit(gec_dataq_core::cli::run(std::env::args_os()));
}
