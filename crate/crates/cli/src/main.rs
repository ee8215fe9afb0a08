use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use dmpfem::Execution;
use dmpfem_cli::args::{Cli, Command};
use dmpfem_cli::{commands, configure_threads, exit, CliError};

fn run(cli: &Cli) -> Result<(), CliError> {
    configure_threads(std::env::var("DMPFEM_THREADS").ok().as_deref())?;
    let exec = if cli.sequential { Execution::Sequential } else { Execution::Parallel };
    match &cli.command {
        Command::MeshGen(args) => commands::mesh_gen(args, exec),
        Command::Solve(args) => commands::solve(args, exec),
        Command::DmpCheck(args) => commands::dmp_check(args, exec),
        Command::Report(args) => commands::report(args),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            let ok = matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion);
            return ExitCode::from(if ok { exit::OK } else { exit::USAGE } as u8);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
