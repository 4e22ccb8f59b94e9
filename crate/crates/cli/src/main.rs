use clap::Parser;

fn main() {
    std::process::exit(voronoi_cli::run(voronoi_cli::Cli::parse()));
}
