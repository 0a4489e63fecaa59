fn main() {
    std::process::exit(position_auctions::cli::main());
}
