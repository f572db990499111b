use clap::Parser;

use projmetric::cli::{run, Cli};

fn main() {
    std::process::exit(run(Cli::parse()));
}
