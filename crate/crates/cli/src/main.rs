use std::process::ExitCode;

use clap::Parser;
use ppats_cli::{commands::EXIT_ERROR, run, Cli};

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(outcome) => {
            print!("{}", outcome.stdout);
            ExitCode::from(outcome.status as u8)
        }
        Err(err) => {
            let causes: Vec<String> = err.chain().map(ToString::to_string).collect();
            eprintln!("{}", serde_json::json!({ "error": format!("{err:#}"), "causes": causes }));
            ExitCode::from(EXIT_ERROR as u8)
        }
    }
}
