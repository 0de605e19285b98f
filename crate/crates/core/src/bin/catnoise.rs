//! `catnoise`: command-line front end.
//!
//! Settings are resolved as: command-line flag, then `--config` document, then
//! built-in default. Any channel flag (`--pi0..--pi3`, `--preset`, `--random`,
//! `--grid-*`) replaces every channel source of the config document.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};

use catnoise_core::sweep::config::{GridSpec, PresetSpec, ResolvedSweep};
use catnoise_core::sweep::{
    run_analyze, run_sweep, run_threshold, run_verify, write_csv, write_json, CutSelection,
    NValues, OutputFormat, SweepConfig,
};
use catnoise_core::ChannelFamily;

#[derive(Parser)]
#[command(name = "catnoise", version, about = "Entanglement of noisy GHZ states under Pauli channels")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Per-cut verdicts and partition report for each channel and N.
    Analyze(Common),
    /// Grid scan over channels, N and cuts.
    Sweep(Common),
    /// Compare analytic verdicts with dense simulation.
    Verify(Common),
    /// Asymptotic threshold and finite-N maximal M.
    Threshold(Common),
}

#[derive(Args, Debug)]
struct Common {
    /// JSON configuration document.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv or json (analyze also accepts text).
    #[arg(long)]
    format: Option<String>,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,

    #[arg(long, allow_negative_numbers = true)]
    pi0: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pi1: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pi2: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pi3: Option<f64>,
    /// depolarizing or dephasing.
    #[arg(long)]
    preset: Option<String>,
    #[arg(long, default_value_t = 1.0)]
    strength: f64,
    /// Number of channels drawn uniformly from the simplex.
    #[arg(long)]
    random: Option<usize>,
    #[arg(long)]
    grid_family: Option<ChannelFamily>,
    #[arg(long, default_value_t = 0.0)]
    grid_from: f64,
    #[arg(long, default_value_t = 1.0)]
    grid_to: f64,
    #[arg(long, default_value_t = 0.01)]
    grid_step: f64,

    /// N values: `8`, `2,4,6` or `2..6`.
    #[arg(long)]
    n: Option<String>,
    /// `all`, `min-only` or a k list such as `1,2`.
    #[arg(long)]
    cuts: Option<String>,
    /// Attach dense-simulation columns (sweep only).
    #[arg(long)]
    oracle: bool,
}

impl Common {
    fn pi(&self) -> anyhow::Result<Option<[f64; 4]>> {
        match (self.pi0, self.pi1, self.pi2, self.pi3) {
            (None, None, None, None) => Ok(None),
            (Some(a), Some(b), Some(c), Some(d)) => Ok(Some([a, b, c, d])),
            _ => bail!("--pi0, --pi1, --pi2 and --pi3 must be given together"),
        }
    }

    fn has_channel_flags(&self) -> bool {
        self.pi0.is_some()
            || self.pi1.is_some()
            || self.pi2.is_some()
            || self.pi3.is_some()
            || self.preset.is_some()
            || self.random.is_some()
            || self.grid_family.is_some()
    }

    /// Merges flags over the config document.
    fn merged(&self) -> anyhow::Result<SweepConfig> {
        let mut cfg = match &self.config {
            Some(path) => SweepConfig::load(path)?,
            None => SweepConfig::default(),
        };
        if self.has_channel_flags() {
            cfg.channels.clear();
            cfg.pi = self.pi()?;
            cfg.preset = self.preset.as_ref().map(|name| PresetSpec {
                name: name.clone(),
                strength: self.strength,
            });
            cfg.grid = self.grid_family.map(|family| GridSpec {
                family,
                from: self.grid_from,
                to: self.grid_to,
                step: self.grid_step,
            });
            cfg.random_channels = self.random;
        }
        if let Some(n) = &self.n {
            cfg.n_values = Some(NValues::parse(n)?);
        }
        if let Some(c) = &self.cuts {
            cfg.cuts = CutSelection::parse(c)?;
        }
        if self.oracle {
            cfg.oracle = true;
        }
        if let Some(out) = &self.out {
            cfg.out = Some(out.clone());
        }
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(w) = self.workers {
            cfg.workers = Some(w);
        }
        Ok(cfg)
    }
}

enum Format {
    Text,
    Csv,
    Json,
}

fn pick_format(flag: Option<&str>, cfg: &SweepConfig, default: Format) -> anyhow::Result<Format> {
    match flag {
        Some("text") => Ok(Format::Text),
        Some(other) => Ok(match other.parse::<OutputFormat>()? {
            OutputFormat::Csv => Format::Csv,
            OutputFormat::Json => Format::Json,
        }),
        None if cfg.format == OutputFormat::Json => Ok(Format::Json),
        None => Ok(default),
    }
}

fn sink(out: Option<&PathBuf>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match out {
        Some(path) => Box::new(BufWriter::new(
            File::create(path).with_context(|| format!("creating {}", path.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn analyze(args: &Common) -> anyhow::Result<ExitCode> {
    let cfg = args.merged()?;
    let fmt = pick_format(args.format.as_deref(), &cfg, Format::Text)?;
    let run = cfg.resolve()?;
    let mut reports = Vec::new();
    for ch in &run.channels {
        for &n in &run.n_values {
            reports.push(run_analyze(ch, n)?);
        }
    }
    let mut out = sink(cfg.out.as_ref())?;
    match fmt {
        Format::Text => {
            for (i, r) in reports.iter().enumerate() {
                if i > 0 {
                    writeln!(out)?;
                }
                out.write_all(r.render_text().as_bytes())?;
            }
        }
        Format::Json => write_json(&reports, &mut out)?,
        Format::Csv => {
            let rows: Vec<_> = reports.iter().flat_map(|r| r.rows()).collect();
            write_csv(&rows, &mut out)?;
        }
    }
    out.flush()?;
    Ok(ExitCode::SUCCESS)
}

fn sweep(args: &Common) -> anyhow::Result<ExitCode> {
    let cfg = args.merged()?;
    let fmt = pick_format(args.format.as_deref(), &cfg, Format::Csv)?;
    let run = cfg.resolve()?;
    let rows = run_sweep(&run)?;
    let mut out = sink(cfg.out.as_ref())?;
    match fmt {
        Format::Csv => write_csv(&rows, &mut out)?,
        Format::Json => write_json(&rows, &mut out)?,
        Format::Text => bail!("sweep writes csv or json"),
    }
    out.flush()?;
    Ok(ExitCode::SUCCESS)
}

fn verify(args: &Common) -> anyhow::Result<ExitCode> {
    let mut cfg = args.merged()?;
    if !cfg.has_channel_source() {
        cfg.random_channels = Some(200);
    }
    if cfg.n_values.is_none() {
        cfg.n_values = Some(NValues::Range { from: 2, to: 6 });
    }
    cfg.oracle = true;
    if let Some(f) = args.format.as_deref() {
        if f != "json" {
            bail!("verify writes json");
        }
    }
    let run: ResolvedSweep = cfg.resolve()?;
    let report = run_verify(&run)?;
    let mut out = sink(cfg.out.as_ref())?;
    write_json(&report, &mut out)?;
    out.flush()?;
    Ok(if report.has_forbidden() {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    })
}

fn threshold(args: &Common) -> anyhow::Result<ExitCode> {
    let cfg = args.merged()?;
    let fmt = pick_format(args.format.as_deref(), &cfg, Format::Csv)?;
    let run = cfg.resolve()?;
    let rows = run_threshold(&run.channels, &run.n_values, run.workers)?;
    let mut out = sink(cfg.out.as_ref())?;
    match fmt {
        Format::Csv => write_csv(&rows, &mut out)?,
        Format::Json => write_json(&rows, &mut out)?,
        Format::Text => bail!("threshold writes csv or json"),
    }
    out.flush()?;
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("CATNOISE_LOG", "warn"))
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Analyze(a) => analyze(a),
        Command::Sweep(a) => sweep(a),
        Command::Verify(a) => verify(a),
        Command::Threshold(a) => threshold(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
