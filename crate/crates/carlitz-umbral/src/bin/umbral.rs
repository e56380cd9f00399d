use carlitz_umbral::cli;

fn main() {
    std::process::exit(cli::run());
}
