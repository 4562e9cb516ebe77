use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use niqb_core::cli::execute;
use niqb_core::config::{Cli, Invocation};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => e.exit(),
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    let result = Invocation::from_cli(cli).and_then(|inv| {
        if inv.dump_config {
            print!("{}", inv.config.to_json_string());
            return Ok(0);
        }
        let out = execute(&inv.config)?;
        print!("{}", out.message);
        Ok(out.exit_code)
    });
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
