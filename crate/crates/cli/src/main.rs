use clap::Parser;
use dispersive_cli::args::Cli;

fn main() {
    let cli = Cli::parse();
    if let Err(e) = dispersive_cli::run(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
