use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use origami_kz::report::{self, Command, RunConfig, EXIT_MALFORMED};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Cmd {
    Stratum,
    Homology,
    Orbit,
    Lyapunov,
    Forni,
    Holonomy,
    Envelope,
    CheckTheorem,
}

impl From<Cmd> for Command {
    fn from(c: Cmd) -> Command {
        match c {
            Cmd::Stratum => Command::Stratum,
            Cmd::Homology => Command::Homology,
            Cmd::Orbit => Command::Orbit,
            Cmd::Lyapunov => Command::Lyapunov,
            Cmd::Forni => Command::Forni,
            Cmd::Holonomy => Command::Holonomy,
            Cmd::Envelope => Command::Envelope,
            Cmd::CheckTheorem => Command::CheckTheorem,
        }
    }
}

/// Origamis, their monodromy, Lyapunov spectra and bounded subspaces.
///
/// Exit codes: 0 pass, 1 a check failed, 2 inconclusive, 64 malformed input.
#[derive(Debug, Parser)]
#[command(name = "origami-kz", version)]
struct Cli {
    #[arg(value_enum)]
    command: Cmd,
    /// Origami JSON file, or corpus:NAME for a bundled example.
    #[arg(long, short)]
    input: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long)]
    blocks: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    word_len: Option<usize>,
    #[arg(long)]
    norm_cap: Option<f64>,
    #[arg(long)]
    max_nodes: Option<usize>,
    /// json, csv or text
    #[arg(long)]
    format: Option<String>,
    /// Write the report here instead of stdout.
    #[arg(long, short)]
    out: Option<PathBuf>,
    /// File of `key = value` lines applied before the flags.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override any configuration key, e.g. --set space=relative.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    sets: Vec<String>,
}

fn build_config(cli: &Cli) -> Result<RunConfig, String> {
    let mut cfg = RunConfig::new(cli.command.into());
    if let Some(path) = &cli.config {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        cfg.apply_file(&text)?;
        cfg.command = cli.command.into();
    }
    if let Some(v) = &cli.input {
        cfg.input = Some(v.clone());
    }
    if let Some(v) = cli.seed {
        cfg.seed = v;
    }
    if let Some(v) = cli.steps {
        cfg.steps = v;
    }
    if let Some(v) = cli.blocks {
        cfg.blocks = v;
    }
    if let Some(v) = cli.tol {
        cfg.tol = v;
    }
    if let Some(v) = cli.word_len {
        cfg.word_len = v;
    }
    if let Some(v) = cli.norm_cap {
        cfg.norm_cap = Some(v);
    }
    if let Some(v) = cli.max_nodes {
        cfg.max_nodes = v;
    }
    if let Some(v) = &cli.format {
        cfg.format = v.parse()?;
    }
    for kv in &cli.sets {
        let (k, v) = kv.split_once('=').ok_or_else(|| format!("--set expects KEY=VALUE, got `{kv}`"))?;
        cfg.set(k, v)?;
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            let code = if e.use_stderr() { EXIT_MALFORMED } else { 0 };
            return ExitCode::from(code as u8);
        }
    };
    let cfg = match build_config(&cli) {
        Ok(c) => c,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(EXIT_MALFORMED as u8);
        }
    };
    let outcome = report::run(&cfg);
    match &cli.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &outcome.output) {
                eprintln!("error: {}: {e}", path.display());
                return ExitCode::from(EXIT_MALFORMED as u8);
            }
        }
        None => print!("{}", outcome.output),
    }
    ExitCode::from(outcome.exit_code as u8)
}
