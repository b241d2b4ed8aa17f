use clap::error::ErrorKind;
use clap::Parser;

use dlcert::cli::{run, Cli, ExitStatus};

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => ExitStatus::Usage.code(),
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    let report = run(&cli);
    print!("{}", report.stdout);
    eprint!("{}", report.stderr);
    std::process::exit(report.status.code());
}
