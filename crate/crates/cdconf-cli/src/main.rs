use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use cdconf_cli::{CliError, Options};
use clap::Parser;
use serde_json::Value;

/// Pseudoconformal analysis over quaternions and octonions, driven by JSON.
#[derive(Parser)]
#[command(name = "cdconf", version)]
struct Args {
    /// eval, check-pc, factor, phrase, moebius, domain, contour, normal, suite, list-suites
    command: String,
    /// Payload file, or `-` for stdin. Defaults to `{}`.
    #[arg(long)]
    json: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    tol: Option<f64>,
}

fn read_payload(path: Option<&PathBuf>) -> Result<Value, CliError> {
    let text = match path {
        None => return Ok(Value::Object(Default::default())),
        Some(p) if p.as_os_str() == "-" => {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s).map_err(|e| CliError::Schema(format!("reading stdin: {e}")))?;
            s
        }
        Some(p) => std::fs::read_to_string(p).map_err(|e| CliError::Schema(format!("reading {}: {e}", p.display())))?,
    };
    serde_json::from_str(&text).map_err(|e| CliError::Schema(format!("invalid JSON: {e}")))
}

fn main() -> ExitCode {
    let args = Args::parse();
    let opts = Options { seed: args.seed, tol: args.tol };
    let result = read_payload(args.json.as_ref()).and_then(|p| cdconf_cli::run(&args.command, p, &opts));
    match result {
        Ok(v) => {
            println!("{v}");
            eprintln!("cdconf {}: ok", args.command);
            ExitCode::SUCCESS
        }
        Err(e) => {
            println!("{}", e.to_json());
            eprintln!("cdconf {}: {e}", args.command);
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
