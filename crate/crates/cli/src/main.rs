use clap::Parser;
use steering_cli::commands::run;
use steering_cli::config::Cli;

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli.command) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
