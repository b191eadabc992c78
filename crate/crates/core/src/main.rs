use clap::Parser;

fn main() {
    env_logger::init();
    let cli = micrograph_enhance::cli::Cli::parse();
    std::process::exit(micrograph_enhance::cli::run(cli));
}
