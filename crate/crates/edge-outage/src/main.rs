fn main() {
    std::process::exit(edge_outage::cli::run());
}
