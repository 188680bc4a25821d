use clap::Parser;

use sgh_core::cli::{run, Cli};

fn main() {
    std::process::exit(run(Cli::parse()));
}
