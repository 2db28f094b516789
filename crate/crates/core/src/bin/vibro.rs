use clap::Parser;
use vibro::cli::{Cli, Command};

fn main() {
    let cli = Cli::parse();
    let code = match &cli.command {
        Command::Run(args) => vibro::cli::run(args),
    };
    std::process::exit(code);
}
