mod cli;
mod commands;
mod config;
mod error;

use clap::Parser;

fn main() {
    let cli = match cli::Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    let name = cli.command.name();
    if let Err(e) = commands::run(cli) {
        eprintln!("kgflow {name}: {e}");
        std::process::exit(e.exit_code());
    }
}
