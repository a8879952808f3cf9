//! The `kode` command line.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{CommandFactory, FromArgMatches, Parser, Subcommand};

use crate::bounds;
use crate::env::{generate_instance, LgdsParams};
use crate::error::Result;
use crate::experiments::{run_episode, run_suite, seed_schedule, seeds, EpisodeOptions, ExperimentConfig, CONFIG_KEYS};
use crate::matops;
use crate::policies::{build_policy, PolicyHyperparams, PolicyKind, RewardScale};

#[derive(Debug, Parser)]
#[command(name = "kode", version, about = "Kalman-filter bandit simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Draw a random stable instance and write it as JSON.
    Generate {
        #[arg(long, default_value_t = 10)]
        d: usize,
        #[arg(long, default_value_t = 10)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also print the spectral radius and tr(Z) to stderr.
        #[arg(long)]
        info: bool,
    },
    /// Compute the regret and angle bounds of an instance.
    Bounds {
        instance: PathBuf,
        #[arg(long, default_value_t = 0.95)]
        alpha: f64,
        /// Horizon for the total regret bound.
        #[arg(long, default_value_t = 1000)]
        n: usize,
        #[arg(long, default_value_t = 100_000)]
        nu_samples: usize,
        /// Seed of the Monte Carlo estimate of nu.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also write the CSV row to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run an instance sweep.
    Run {
        /// JSON config document; omitted keys take their defaults.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Overrides base_seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads. Outputs do not depend on it.
        #[arg(long, default_value_t = 1)]
        workers: usize,
        /// Overrides output_dir.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Print the resolved config and seed schedule, write nothing.
        #[arg(long)]
        dry_run: bool,
        /// Overrides alpha.
        #[arg(long)]
        alpha: Option<f64>,
    },
    /// Trace a single episode as CSV.
    Episode {
        instance: PathBuf,
        #[arg(long, default_value = "kode")]
        policy: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        n: usize,
        #[arg(long, default_value_t = 10_000)]
        burn_in: usize,
        /// Config document supplying baseline hyperparameters.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn config_help() -> String {
    let mut s = String::from("Config keys (JSON document, unknown keys rejected):\n");
    for (key, default, meaning) in CONFIG_KEYS {
        s.push_str(&format!("  {key:<32} default {default:<10} {meaning}\n"));
    }
    s
}

/// Clap command with the config key table attached to `run --help`.
pub fn command() -> clap::Command {
    let help = config_help();
    Cli::command().mut_subcommand("run", |c| c.after_help(help))
}

pub fn parse_from<I, T>(args: I) -> std::result::Result<Cli, clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let matches = command().try_get_matches_from(args)?;
    Cli::from_arg_matches(&matches)
}

fn read_instance(path: &Path) -> Result<LgdsParams> {
    LgdsParams::from_json(&fs::read_to_string(path)?)
}

fn read_config(path: Option<&Path>) -> Result<ExperimentConfig> {
    match path {
        Some(p) => ExperimentConfig::from_json(&fs::read_to_string(p)?),
        None => Ok(ExperimentConfig::default()),
    }
}

fn emit(out: Option<&Path>, bytes: &[u8], stdout: &mut dyn Write) -> Result<()> {
    match out {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir)?;
            }
            fs::write(p, bytes)?;
        }
        None => stdout.write_all(bytes)?,
    }
    Ok(())
}

/// Executes a parsed command and returns the process exit code.
pub fn execute(cli: Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32> {
    match cli.command {
        Command::Generate { d, k, seed, out, info } => {
            let params = generate_instance(d, k, seed)?;
            if info {
                let z = params.steady_state_covariance()?;
                writeln!(stderr, "spectral radius {}", matops::spectral_radius(&params.gamma)?)?;
                writeln!(stderr, "tr(Z) {}", z.trace())?;
            }
            emit(out.as_deref(), params.to_json().as_bytes(), stdout)?;
            Ok(0)
        }
        Command::Bounds {
            instance,
            alpha,
            n,
            nu_samples,
            seed,
            out,
        } => {
            let params = read_instance(&instance)?;
            let r = bounds::bound_report(&params, n, alpha, nu_samples, seed)?;
            writeln!(stdout, "dominance_ok {}", r.dominance_ok)?;
            writeln!(stdout, "inflated {} (mu = {})", r.inflated, r.inflation)?;
            writeln!(stdout, "regret bound per round {}", r.regret_bound_per_round)?;
            writeln!(stdout, "regret bound over {} rounds {}", n, r.regret_bound_n)?;
            writeln!(stdout, "nu {} (alpha = {alpha})", r.nu)?;
            writeln!(stdout, "theta_s {}", bounds::fmt_opt(r.theta_s.value()))?;
            writeln!(stdout, "u_tilde {}", bounds::fmt_opt(r.u_tilde))?;
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(bounds::BoundReport::CSV_HEADER)?;
            w.write_record(r.csv_record())?;
            let csv_bytes = w.into_inner().map_err(|e| e.into_error())?;
            match out {
                Some(p) => emit(Some(&p), &csv_bytes, stdout)?,
                None => stdout.write_all(&csv_bytes)?,
            }
            Ok(0)
        }
        Command::Run {
            config,
            seed,
            workers,
            out,
            dry_run,
            alpha,
        } => {
            let mut cfg = read_config(config.as_deref())?;
            if let Some(s) = seed {
                cfg.base_seed = s;
            }
            if let Some(o) = out {
                cfg.output_dir = o;
            }
            if let Some(a) = alpha {
                cfg.alpha = a;
            }
            cfg.validate()?;
            if dry_run {
                stdout.write_all(cfg.to_json().as_bytes())?;
                writeln!(stdout, "instance,seed")?;
                for (i, s) in seed_schedule(&cfg) {
                    writeln!(stdout, "{i},{s}")?;
                }
                return Ok(0);
            }
            let report = run_suite(&cfg, workers)?;
            report.write(&cfg.output_dir)?;
            writeln!(
                stdout,
                "{} of {} instances completed, {} failed; results in {}",
                report.results.len(),
                cfg.num_instances,
                report.failures.len(),
                cfg.output_dir.display()
            )?;
            for b in &report.baselines {
                if let Some(s) = &b.boxplot {
                    writeln!(stdout, "median regret decrease vs {}: {:.2}%", b.baseline.label(), s.median)?;
                }
            }
            for f in &report.failures {
                writeln!(stderr, "instance {} (seed {}) failed: {}", f.index, f.seed, f.error)?;
            }
            Ok(if report.failures.is_empty() { 0 } else { 1 })
        }
        Command::Episode {
            instance,
            policy,
            seed,
            n,
            burn_in,
            config,
            out,
        } => {
            let kind: PolicyKind = policy.parse()?;
            let hyper: PolicyHyperparams = read_config(config.as_deref())?.hyperparams;
            let params = read_instance(&instance)?;
            let scale = RewardScale::from_params(&params)?;
            let mut pol = build_policy(kind, &params, &scale, &hyper, n, seeds::policy_seed(seed, kind, 0))?;
            let options = EpisodeOptions {
                burn_in,
                diagnostics: true,
            };
            let trace = run_episode(&params, pol.as_mut(), n, seeds::env_seed(seed, 0), options)?;
            let mut buf = Vec::new();
            trace.write_csv(&mut buf)?;
            emit(out.as_deref(), &buf, stdout)?;
            Ok(0)
        }
    }
}

/// Entry point of the `kode` binary.
pub fn main_from_env() -> i32 {
    let cli = match parse_from(std::env::args_os()) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    match execute(cli, &mut stdout.lock(), &mut stderr.lock()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}
