use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use mcdm_service::cli::{self, Cli, Command};
use mcdm_service::error::ServiceError;

fn report(err: &ServiceError) -> ExitCode {
    eprintln!("error: {}", err.body.message);
    eprintln!("code: {}", err.body.code);
    if !err.body.detail.is_null() {
        eprintln!("detail: {}", err.body.detail);
    }
    ExitCode::from(err.class.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // usage errors are input errors; help and version are not errors
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Serve { port, bind, store } => cli::serve(port, bind, store).map(|()| Vec::new()),
        command => cli::execute(command, cli.format),
    };
    match result {
        Ok(bytes) => {
            let mut out = std::io::stdout().lock();
            if out.write_all(&bytes).and_then(|()| out.flush()).is_err() {
                return ExitCode::from(2);
            }
            ExitCode::SUCCESS
        }
        Err(e) => report(&e),
    }
}
