use clap::Parser;
use dancecorpus::pipeline::{main_with, Cli};

fn main() {
    std::process::exit(main_with(Cli::parse()));
}
