fn main() {
    std::process::exit(minimax_lp::cli::run());
}
