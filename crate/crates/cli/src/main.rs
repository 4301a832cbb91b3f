use std::io;
use std::process;

use cawgr::{commands, Cli, ExitCode};
use clap::error::ErrorKind;
use clap::Parser;

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::Success,
                _ => ExitCode::Usage,
            };
            process::exit(code as i32);
        }
    };
    let code = commands::run(&cli, &mut io::stdout().lock(), &mut io::stderr().lock());
    process::exit(code as i32);
}
