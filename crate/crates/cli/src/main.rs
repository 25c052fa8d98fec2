use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use sonet_cli::commands::{error_code, execute, limits_of, Cli, Command, Format, USAGE};
use sonet_cli::service;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { USAGE } else { 0 });
        }
    };
    if let Command::Serve { port, host, snapshot_dir } = &cli.command {
        let config = service::Config { limits: limits_of(&cli), snapshot_dir: snapshot_dir.clone(), ..Default::default() };
        let addr = format!("{host}:{port}");
        let rt = tokio::runtime::Runtime::new().expect("tokio runtime");
        return match rt.block_on(service::serve(&addr, config)) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("error: {e:#}");
                ExitCode::from(USAGE)
            }
        };
    }
    match execute(&cli) {
        Ok(out) => {
            let _ = std::io::stdout().write_all(out.render(cli.format).as_bytes());
            ExitCode::from(out.code)
        }
        Err(e) => {
            if cli.format == Format::Json {
                println!("{}", serde_json::json!({ "error": format!("{e:#}") }));
            }
            eprintln!("error: {e:#}");
            ExitCode::from(error_code(&e))
        }
    }
}
