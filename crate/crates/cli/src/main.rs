use std::process::ExitCode;

use hetverify_cli::{parse_config, run_and_report, CliError};

fn main() -> ExitCode {
    let code = match parse_config(std::env::args_os()).and_then(|c| run_and_report(&c)) {
        Ok(bundle) => {
            print!("{}", bundle.summary());
            bundle.exit_code()
        }
        Err(CliError::Clap(e)) => {
            let _ = e.print();
            CliError::Clap(e).exit_code()
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}
