//! `rabi-otto`: sweeps, single cycles and figure presets for the Rabi Otto engine.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numerical failure
//! (including sweeps where any point failed; the table is still written).

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use otto_core::sweep::config::ENV_PREFIX;
use otto_core::sweep::presets::preset_document;
use otto_core::sweep::{
    parse_config_with_env, preset_names, run_sweep, single_cycle, Dataset, OutputFormat, SweepConfig,
};
use otto_core::Error;

#[derive(Parser, Debug)]
#[command(name = "rabi-otto", version, about = "Quantum Otto cycle with a Rabi working substance")]
struct Cli {
    /// TOML config document; every key may also be set through RABI_OTTO_<KEY>.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file (stdout when absent).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Worker threads (0 = all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Reference angular frequency: rad/s, or a string such as "10 GHz".
    #[arg(long, global = true)]
    omega_ref: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Lowest relative energy levels over the sweep.
    Spectrum,
    /// One cycle at the configured parameters.
    Cycle {
        /// Also write the per-level table here.
        #[arg(long)]
        levels_out: Option<PathBuf>,
    },
    /// Cycle sweep as configured.
    Sweep,
    /// Cycle sweep with discord columns.
    Discord,
    /// Numeric W_1 against the two-level approximation.
    Approx,
    /// Run a figure preset (fig2 … fig10).
    Preset {
        name: Option<String>,
        /// List preset names.
        #[arg(long)]
        list: bool,
        /// Print the preset's config document instead of running it.
        #[arg(long)]
        show: bool,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Csv,
    Json,
}

enum Failure {
    Config(String),
    Numerical(String),
    Io(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Self::Config(_) => 2,
            Self::Numerical(_) => 3,
            Self::Io(_) => 1,
        }
    }

    fn message(&self) -> &str {
        match self {
            Self::Config(m) | Self::Numerical(m) | Self::Io(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_config() {
            Self::Config(e.to_string())
        } else {
            Self::Numerical(e.to_string())
        }
    }
}

fn quoted(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Environment overrides, then command-line flags on top.
fn overrides(cli: &Cli, forced: &[(&str, String)]) -> Vec<(String, String)> {
    let mut vars: BTreeMap<String, String> = std::env::vars().filter(|(k, _)| k.starts_with(ENV_PREFIX)).collect();
    let mut set = |key: &str, value: String| {
        vars.insert(format!("{ENV_PREFIX}{key}"), value);
    };
    if let Some(w) = cli.omega_ref.as_deref() {
        set("OMEGA_REF", if w.trim().parse::<f64>().is_ok() { w.trim().to_string() } else { quoted(w) });
    }
    if let Some(n) = cli.workers {
        set("OUTPUT__WORKERS", n.to_string());
    }
    if let Some(f) = cli.format {
        set("OUTPUT__FORMAT", quoted(match f {
            Format::Csv => "csv",
            Format::Json => "json",
        }));
    }
    for (k, v) in forced {
        set(k, v.clone());
    }
    vars.into_iter().collect()
}

fn load(cli: &Cli, document: Option<&str>, forced: &[(&str, String)]) -> Result<SweepConfig, Failure> {
    let text = match (document, &cli.config) {
        (Some(_), Some(_)) => return Err(Failure::Config("--config cannot be combined with a preset".into())),
        (Some(doc), None) => doc.to_string(),
        (None, Some(path)) => fs::read_to_string(path)
            .map_err(|e| Failure::Config(format!("cannot read {}: {e}", path.display())))?,
        (None, None) => String::new(),
    };
    Ok(parse_config_with_env(&text, overrides(cli, forced))?)
}

fn render(data: &Dataset, format: OutputFormat) -> String {
    match format {
        OutputFormat::Csv => data.to_csv(),
        OutputFormat::Json => data.to_json(),
    }
}

fn emit(text: &str, path: Option<&Path>) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Io(format!("cannot write {}: {e}", p.display()))),
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Failure::Io(format!("cannot write to stdout: {e}"))),
    }
}

fn out_path(cli: &Cli, config: &SweepConfig) -> Option<PathBuf> {
    cli.out.clone().or_else(|| config.output.as_ref().map(PathBuf::from))
}

fn sweep(cli: &Cli, config: &SweepConfig) -> Result<(), Failure> {
    let data = run_sweep(config)?;
    emit(&render(&data, config.format), out_path(cli, config).as_deref())?;
    let failed = data.failed_rows();
    if failed > 0 {
        return Err(Failure::Numerical(format!("{failed} of {} rows failed; see the error column", data.rows.len())));
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let mode = |m: &str| ("MODE", quoted(m));
    match &cli.command {
        Command::Spectrum => sweep(cli, &load(cli, None, &[mode("spectrum")])?),
        Command::Approx => sweep(cli, &load(cli, None, &[mode("approx")])?),
        Command::Sweep => sweep(cli, &load(cli, None, &[])?),
        Command::Discord => sweep(cli, &load(cli, None, &[mode("cycle"), ("DISCORD", "true".into())])?),
        Command::Cycle { levels_out } => {
            let config = load(cli, None, &[mode("cycle")])?;
            let point = single_cycle(&config)?;
            emit(&render(&point.summary, config.format), out_path(cli, &config).as_deref())?;
            if let Some(p) = levels_out {
                emit(&render(&point.levels, config.format), Some(p))?;
            }
            Ok(())
        }
        Command::Preset { name, list, show } => {
            if *list {
                let names: Vec<&str> = preset_names().collect();
                return emit(&format!("{}\n", names.join("\n")), None);
            }
            let Some(name) = name else {
                return Err(Failure::Config(format!(
                    "preset name required; one of {}",
                    preset_names().collect::<Vec<_>>().join(", ")
                )));
            };
            let doc = preset_document(name).map_err(|e| {
                Failure::Config(format!("{e}; known presets: {}", preset_names().collect::<Vec<_>>().join(", ")))
            })?;
            if *show {
                return emit(doc.trim_start(), None);
            }
            sweep(cli, &load(cli, Some(doc), &[])?)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("rabi-otto: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
