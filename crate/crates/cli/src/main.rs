mod args;
mod commands;
mod report;
mod run;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use args::{Cli, Command};
use report::CmdResult;

fn dispatch(cli: &Cli) -> CmdResult<i32> {
    match &cli.command {
        Command::Generate(a) => commands::generate(a),
        Command::CheckRegular(a) => commands::check_regular(a),
        Command::ExtractBundle(a) => commands::extract(a),
        Command::EdgeDecompose(a) => commands::edge_decompose(a),
        Command::VertexPartition(a) => commands::vertex_partition(a),
        Command::Pack(a) => commands::pack(a),
        Command::Verify(a) => commands::verify(a),
        Command::Params(a) => commands::params(a),
        Command::Run(a) => run::run(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(threads) = std::env::var("BUNDLE_DECOMP_THREADS").ok().and_then(|t| t.parse().ok()) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
    match dispatch(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.exit_code() as u8)
        }
    }
}
