use std::process::ExitCode;

use lhp_cli::{parse_config, run, CliError};

fn main() -> ExitCode {
    let result = parse_config(std::env::args_os()).and_then(|cfg| run(&cfg));
    match result {
        Ok(files) => {
            for f in files {
                println!("wrote {}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(CliError::Clap(e)) => {
            let _ = e.print();
            ExitCode::from(CliError::Clap(e).exit_code() as u8)
        }
        Err(e) => {
            eprintln!("lhp: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
