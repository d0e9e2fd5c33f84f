use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use trapped_pair_cli::{run, CliError, Invocation};

/// Spectra, wavefunctions and Feshbach sweeps for two atoms in an axially symmetric harmonic trap.
#[derive(Parser, Debug)]
#[command(name = "trapped-pair", version)]
struct Args {
    /// spectrum | wavefunction | lowdim-compare | feshbach | specfun-check
    command: Option<String>,
    /// Flat TOML file of dotted keys.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Built-in figure configuration (fig1 ... fig12).
    #[arg(long)]
    preset: Option<String>,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv or json.
    #[arg(long)]
    format: Option<String>,
    /// Any setting as `--dotted.key value`.
    #[arg(trailing_var_arg = true, allow_hyphen_values = true, hide = true)]
    overrides: Vec<String>,
}

fn pairs(raw: &[String]) -> Result<Vec<(String, String)>, CliError> {
    let mut out = Vec::new();
    let mut it = raw.iter();
    while let Some(flag) = it.next() {
        let Some(key) = flag.strip_prefix("--") else {
            return Err(CliError::Config { key: flag.clone(), msg: "expected `--key value`".into() });
        };
        let (key, value) = match key.split_once('=') {
            Some((k, v)) => (k.to_string(), v.to_string()),
            None => {
                let v = it.next().ok_or_else(|| CliError::Config { key: key.to_string(), msg: "flag needs a value".into() })?;
                (key.to_string(), v.clone())
            }
        };
        out.push((key, value));
    }
    Ok(out)
}

fn init_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("TRAPPED_PAIR_THREADS") else { return Ok(()) };
    let n: usize = raw.trim().parse().map_err(|_| CliError::Config {
        key: "TRAPPED_PAIR_THREADS".into(),
        msg: format!("expected a nonnegative integer, got `{raw}`"),
    })?;
    if n > 0 {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| CliError::Config {
            key: "TRAPPED_PAIR_THREADS".into(),
            msg: e.to_string(),
        })?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let args = Args::parse();
    let result = init_threads().and_then(|()| {
        let mut inv = Invocation {
            command: args.command,
            config_file: args.config,
            preset: args.preset,
            out: args.out,
            format: args.format,
            overrides: Vec::new(),
        };
        // the flags clap knows may also appear among the dotted overrides
        for (k, v) in pairs(&args.overrides)? {
            match k.as_str() {
                "config" => inv.config_file = Some(v.into()),
                "preset" => inv.preset = Some(v),
                "out" => inv.out = Some(v.into()),
                "format" => inv.format = Some(v),
                _ => inv.overrides.push((k, v)),
            }
        }
        run(&inv)
    });
    match result {
        Ok(outcome) => {
            if outcome.gaps > 0 {
                eprintln!("trapped-pair: {} of {} rows are gaps from failed solves", outcome.gaps, outcome.rows);
            }
            ExitCode::from(outcome.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("trapped-pair: {e}");
            ExitCode::from(1)
        }
    }
}
