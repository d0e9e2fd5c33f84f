//! Front end for the trapped-pair solvers: configuration, orchestration, output.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod presets;

use std::io::Write;
use std::path::PathBuf;

pub use config::Config;
pub use error::CliError;
use output::{Format, Table};

/// Everything a single invocation asks for, before the configuration is resolved.
#[derive(Debug, Clone, Default)]
pub struct Invocation {
    pub command: Option<String>,
    pub config_file: Option<PathBuf>,
    pub preset: Option<String>,
    pub out: Option<PathBuf>,
    pub format: Option<String>,
    /// Dotted `--key value` overrides, in command-line order.
    pub overrides: Vec<(String, String)>,
}

/// Outcome of a run that produced output.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub command: String,
    pub rows: usize,
    pub gaps: usize,
}

impl Outcome {
    /// 0 on full success, 2 when some points failed.
    pub fn exit_code(&self) -> i32 {
        if self.gaps > 0 {
            2
        } else {
            0
        }
    }
}

/// Layering: preset, then config file, then command-line overrides.
pub fn resolve(inv: &Invocation) -> Result<(String, Config), CliError> {
    let mut cfg = Config::default();
    let mut preset_command = None;
    let file_cfg = inv.config_file.as_deref().map(Config::load_file).transpose()?;
    let preset_name = inv.preset.clone().or_else(|| file_cfg.as_ref().and_then(|c| c.entries().get("preset").cloned()));
    if let Some(name) = &preset_name {
        let (command, pairs) = presets::preset(name).ok_or_else(|| {
            config::bad("preset", format!("unknown preset `{name}`; expected one of {}", presets::PRESETS.join(", ")))
        })?;
        preset_command = Some(command.to_string());
        cfg.merge(pairs);
        cfg.merge([("preset", name.as_str())]);
    }
    if let Some(file) = file_cfg {
        cfg.merge(file.entries().clone());
    }
    cfg.merge(inv.overrides.iter().cloned());
    if let Some(out) = &inv.out {
        cfg.merge([("output.path", out.display().to_string())]);
    }
    if let Some(f) = &inv.format {
        cfg.merge([("output.format", f.as_str())]);
    }
    let command = inv
        .command
        .clone()
        .or_else(|| cfg.entries().get("command").cloned())
        .or(preset_command)
        .ok_or_else(|| config::bad("command", "no command given".into()))?;
    Ok((command, cfg))
}

/// Resolve, validate, solve, and write.
pub fn run(inv: &Invocation) -> Result<Outcome, CliError> {
    let (command, cfg) = resolve(inv)?;
    cfg.raw("command");
    cfg.raw("preset");
    let format = Format::parse(&cfg.string_or("output.format", "csv"))?;
    let path = cfg.raw("output.path").map(PathBuf::from);
    let job = commands::plan(&command, &cfg)?;
    if let Some(key) = cfg.unused().into_iter().next() {
        return Err(config::bad(&key, format!("not a setting of the `{command}` command")));
    }
    let table = job()?;
    emit(&table, &command, &cfg, format, path)?;
    Ok(Outcome { command, rows: table.rows.len(), gaps: table.gaps })
}

fn emit(table: &Table, command: &str, cfg: &Config, format: Format, path: Option<PathBuf>) -> Result<(), CliError> {
    let mut buf = Vec::new();
    match format {
        Format::Csv => output::write_csv(table, &mut buf).map_err(|e| CliError::Io { path: "csv".into(), source: e.into() })?,
        Format::Json => {
            serde_json::to_writer_pretty(&mut buf, &output::to_json(table, command, cfg))
                .map_err(|e| CliError::Io { path: "json".into(), source: e.into() })?;
            buf.push(b'\n');
        }
    }
    match path {
        Some(p) => std::fs::write(&p, &buf).map_err(|e| CliError::Io { path: p.display().to_string(), source: e }),
        None => std::io::stdout().lock().write_all(&buf).map_err(|e| CliError::Io { path: "stdout".into(), source: e }),
    }
}
