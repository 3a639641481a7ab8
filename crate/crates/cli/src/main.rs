//! `eigenpath`: runs catalog experiments and writes JSON reports plus per-trial CSV.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use eigenpath::harness::{catalog, lookup, run, ExperimentConfig, PathSpec, RunReport};
use eigenpath::oracles::{NoiseMode, OracleConfig};

const THREADS_VAR: &str = "EIGENPATH_THREADS";

#[derive(Parser)]
#[command(name = "eigenpath", version, about = "Seeded eigenpath traversal experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one catalog experiment.
    VerifyLemma {
        name: String,
        #[command(flatten)]
        common: Common,
    },
    /// Traverse the Grover path in one of the four regimes.
    Grover {
        #[arg(long, default_value_t = 16)]
        items: usize,
        #[arg(long, value_enum, default_value_t = Regime::KnownOverlaps)]
        regime: Regime,
        #[command(flatten)]
        common: Common,
    },
    /// Traverse a custom path in one of the four regimes.
    Path {
        #[arg(long, value_enum)]
        kind: PathKind,
        #[arg(long, default_value_t = 3)]
        dim: usize,
        /// Great-circle length.
        #[arg(long, default_value_t = 1.0)]
        length: f64,
        /// Piecewise-speed breakpoints, comma separated.
        #[arg(long, value_delimiter = ',')]
        breaks: Vec<f64>,
        /// Piecewise-speed speeds, comma separated.
        #[arg(long, value_delimiter = ',')]
        speeds: Vec<f64>,
        /// Random-smooth generator seed.
        #[arg(long, default_value_t = 0)]
        path_seed: u64,
        #[arg(long, default_value_t = 16)]
        items: usize,
        #[arg(long, value_enum)]
        regime: Regime,
        #[command(flatten)]
        common: Common,
    },
    /// Run one experiment over a list of values of a parameter.
    Sweep {
        name: String,
        #[arg(long)]
        over: String,
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// List the experiment catalog.
    List {
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args, Clone)]
struct Common {
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    trials: Option<usize>,
    /// Output directory for the JSON report and CSV samples.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t = Mode::Ideal)]
    mode: Mode,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    cost_constant: Option<f64>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    p0: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long, short = 'r')]
    copies: Option<f64>,
    /// Any catalog parameter as name=value; repeatable.
    #[arg(long = "param", value_parser = parse_kv)]
    params: Vec<(String, f64)>,
    /// Suppress the per-verdict listing.
    #[arg(long)]
    quiet: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Ideal,
    Noisy,
}

#[derive(Clone, Copy, ValueEnum)]
enum Regime {
    KnownOverlaps,
    Parallel,
    Dominant,
    OverlapFree,
}

impl Regime {
    fn experiment(self) -> &'static str {
        match self {
            Self::KnownOverlaps => "known-overlaps",
            Self::Parallel => "parallel",
            Self::Dominant => "dominant",
            Self::OverlapFree => "overlap-free",
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum PathKind {
    Grover,
    GreatCircle,
    PiecewiseSpeed,
    RandomSmooth,
}

fn parse_kv(s: &str) -> std::result::Result<(String, f64), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected name=value, got '{s}'"))?;
    let v: f64 = v.trim().parse().map_err(|e| format!("{k}: {e}"))?;
    Ok((k.trim().to_string(), v))
}

impl Common {
    fn config(&self, experiment: &str) -> ExperimentConfig {
        let mut oracle = OracleConfig {
            mode: match self.mode {
                Mode::Ideal => NoiseMode::Ideal,
                Mode::Noisy => NoiseMode::Noisy,
            },
            ..OracleConfig::default()
        };
        if let Some(e) = self.epsilon {
            oracle.epsilon = e;
        }
        if let Some(c) = self.cost_constant {
            oracle.cost_constant = c;
        }
        let mut cfg = ExperimentConfig::new(experiment, self.seed);
        cfg.trials = self.trials;
        cfg.oracle = oracle;
        let named = [("p", self.p), ("p0", self.p0), ("gamma", self.gamma), ("copies", self.copies)];
        for (k, v) in named {
            if let Some(v) = v {
                cfg.params.insert(k.to_string(), v);
            }
        }
        for (k, v) in &self.params {
            cfg.params.insert(k.clone(), *v);
        }
        cfg
    }
}

fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var(THREADS_VAR) {
        let n: usize = v.parse().with_context(|| format!("{THREADS_VAR} must be a positive integer"))?;
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn write_outputs(report: &RunReport, dir: &Path, stem: &str) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let json = dir.join(format!("{stem}.json"));
    fs::write(&json, report.to_json()? + "\n").with_context(|| format!("writing {}", json.display()))?;
    let csv = dir.join(format!("{stem}.csv"));
    let f = fs::File::create(&csv).with_context(|| format!("writing {}", csv.display()))?;
    report.write_csv(std::io::BufWriter::new(f))?;
    Ok(())
}

fn summarize(report: &RunReport, quiet: bool) {
    println!(
        "{} seed={} trials={} errors={} -> {}",
        report.config.experiment,
        report.config.seed,
        report.trials,
        report.errors.len(),
        if report.pass { "PASS" } else { "FAIL" }
    );
    if quiet {
        return;
    }
    for v in &report.verdicts {
        println!("  [{}] {}: observed {:.6} vs {:.6}", if v.pass { "pass" } else { "FAIL" }, v.name, v.observed, v.bound);
    }
    for e in report.errors.iter().take(5) {
        println!("  trial {}: {}", e.trial_id, e.message);
    }
}

fn execute(cfg: &ExperimentConfig, common: &Common, stem: &str) -> Result<bool> {
    let report = run(cfg).with_context(|| format!("invalid configuration for '{}'", cfg.experiment))?;
    write_outputs(&report, &common.out, stem)?;
    summarize(&report, common.quiet);
    Ok(report.pass)
}

fn list(json: bool) -> Result<()> {
    if json {
        println!("{}", serde_json::to_string_pretty(catalog())?);
        return Ok(());
    }
    for e in catalog() {
        println!("{:<18} {}", e.name, e.description);
        println!("{:<18} checks: {}", "", e.anchor);
        for p in e.params {
            let d = p.default.map_or("derived".to_string(), |d| format!("{d}"));
            println!("{:<18}   --param {}={} in [{}, {}]  {}", "", p.name, d, p.min, p.max, p.description);
        }
        println!("{:<18}   default trials {}", "", e.default_trials);
    }
    Ok(())
}

fn main() -> ExitCode {
    match real_main() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn real_main() -> Result<bool> {
    let cli = Cli::parse();
    configure_threads()?;
    match cli.command {
        Command::List { json } => list(json).map(|_| true),
        Command::VerifyLemma { name, common } => {
            if lookup(&name).is_none() {
                bail!("unknown experiment '{name}'; see `eigenpath list`");
            }
            execute(&common.config(&name), &common, &name)
        }
        Command::Grover { items, regime, common } => {
            let cfg = common.config(regime.experiment()).with_path(PathSpec::Grover { items });
            execute(&cfg, &common, &format!("grover-{}", regime.experiment()))
        }
        Command::Path { kind, dim, length, breaks, speeds, path_seed, items, regime, common } => {
            let spec = match kind {
                PathKind::Grover => PathSpec::Grover { items },
                PathKind::GreatCircle => PathSpec::GreatCircle { dim, length },
                PathKind::PiecewiseSpeed => PathSpec::PiecewiseSpeed { dim, breaks, speeds },
                PathKind::RandomSmooth => PathSpec::RandomSmooth { dim, seed: path_seed },
            };
            let cfg = common.config(regime.experiment()).with_path(spec);
            execute(&cfg, &common, &format!("path-{}", regime.experiment()))
        }
        Command::Sweep { name, over, values, common } => {
            let spec = lookup(&name).with_context(|| format!("unknown experiment '{name}'"))?;
            if !spec.params.iter().any(|p| p.name == over) {
                bail!("experiment '{name}' has no parameter '{over}'");
            }
            let mut all = true;
            for v in values {
                let cfg = common.config(&name).with_param(&over, v);
                all &= execute(&cfg, &common, &format!("{name}-{over}-{v}"))?;
            }
            Ok(all)
        }
    }
}
