//! Instance sweeps: generate, bound, run every policy, aggregate.

use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::{self, fmt_f64, fmt_opt, BoundReport};
use crate::env::generate_instance;
use crate::error::{Error, Result};
use crate::policies::{build_policy, PolicyKind, RewardScale};

use super::config::{ExperimentConfig, PValueMethod};
use super::episode::{run_episode, EpisodeOptions};
use super::seeds;
use super::stats::{self, BoxplotStats, Correlation};

#[derive(Debug, Clone)]
pub struct InstanceResult {
    pub index: usize,
    pub seed: u64,
    pub bounds: BoundReport,
    /// Mean cumulative regret over repeats, in roster order.
    pub mean_regret: Vec<(PolicyKind, f64)>,
    /// KODE against each baseline; `None` when the baseline's regret is 0.
    pub percent_decrease: Vec<(PolicyKind, Option<f64>)>,
}

impl InstanceResult {
    pub fn regret_of(&self, kind: PolicyKind) -> Option<f64> {
        self.mean_regret.iter().find(|(k, _)| *k == kind).map(|(_, r)| *r)
    }

    pub fn decrease_vs(&self, kind: PolicyKind) -> Option<f64> {
        self.percent_decrease.iter().find(|(k, _)| *k == kind).and_then(|(_, d)| *d)
    }

    pub fn log10_u_tilde(&self) -> Option<f64> {
        self.bounds.u_tilde.filter(|&u| u > 0.0).map(f64::log10)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct InstanceFailure {
    pub index: usize,
    pub seed: u64,
    pub error: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct BaselineSummary {
    pub baseline: PolicyKind,
    /// Percent decreases in instance order, with the instance index.
    #[serde(skip)]
    pub samples: Vec<(usize, f64)>,
    /// Instances whose baseline regret was 0.
    pub undefined: usize,
    pub boxplot: Option<BoxplotStats>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CorrelationRow {
    /// A baseline key, or `aggregate` for all baselines pooled.
    pub label: String,
    pub correlation: Option<Correlation>,
    /// Instances left out because `ũ = 0` or the percent decrease is undefined.
    pub excluded: usize,
    pub error: Option<String>,
}

#[derive(Debug, Clone)]
pub struct SuiteReport {
    pub config: ExperimentConfig,
    pub results: Vec<InstanceResult>,
    pub failures: Vec<InstanceFailure>,
    pub baselines: Vec<BaselineSummary>,
    pub correlations: Vec<CorrelationRow>,
}

/// `(instance index, instance seed)` for every instance of the sweep.
pub fn seed_schedule(config: &ExperimentConfig) -> Vec<(usize, u64)> {
    (0..config.num_instances)
        .map(|i| (i, seeds::instance_seed(config.base_seed, i)))
        .collect()
}

/// Generates instance `index` and runs the full roster on it.
pub fn run_instance(config: &ExperimentConfig, index: usize) -> Result<InstanceResult> {
    let seed = seeds::instance_seed(config.base_seed, index);
    let params = generate_instance(config.d, config.k, seed)?;
    let bounds = bounds::bound_report(&params, config.n, config.alpha, config.nu_samples, seeds::nu_seed(seed))?;
    let scale = RewardScale::from_params(&params)?;
    let options = EpisodeOptions {
        burn_in: config.burn_in,
        diagnostics: false,
    };

    let mut mean_regret = Vec::with_capacity(config.policies.len());
    for &kind in &config.policies {
        let mut total = 0.0;
        for rep in 0..config.repeats {
            let mut policy = build_policy(
                kind,
                &params,
                &scale,
                &config.hyperparams,
                config.n,
                seeds::policy_seed(seed, kind, rep),
            )?;
            total += run_episode(&params, policy.as_mut(), config.n, seeds::env_seed(seed, rep), options)?.cumulative_regret;
        }
        mean_regret.push((kind, total / config.repeats as f64));
    }

    let kode = mean_regret.iter().find(|(k, _)| *k == PolicyKind::Kode).map(|(_, r)| *r);
    let percent_decrease = match kode {
        Some(rk) => mean_regret
            .iter()
            .filter(|(k, _)| k.is_baseline())
            .map(|&(k, rb)| (k, stats::percent_regret_decrease(rb, rk)))
            .collect(),
        None => Vec::new(),
    };
    Ok(InstanceResult {
        index,
        seed,
        bounds,
        mean_regret,
        percent_decrease,
    })
}

/// Runs the sweep on `workers` threads. The report does not depend on
/// `workers`: results are gathered in instance order.
pub fn run_suite(config: &ExperimentConfig, workers: usize) -> Result<SuiteReport> {
    config.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Parameter(format!("cannot start worker pool: {e}")))?;
    let outcomes: Vec<Result<InstanceResult>> =
        pool.install(|| (0..config.num_instances).into_par_iter().map(|i| run_instance(config, i)).collect());

    let mut results = Vec::new();
    let mut failures = Vec::new();
    for (i, outcome) in outcomes.into_iter().enumerate() {
        match outcome {
            Ok(r) => results.push(r),
            Err(e) => failures.push(InstanceFailure {
                index: i,
                seed: seeds::instance_seed(config.base_seed, i),
                error: e.to_string(),
            }),
        }
    }
    let baselines = summarize_baselines(config, &results);
    let correlations = correlate(config, &results);
    Ok(SuiteReport {
        config: config.clone(),
        results,
        failures,
        baselines,
        correlations,
    })
}

fn summarize_baselines(config: &ExperimentConfig, results: &[InstanceResult]) -> Vec<BaselineSummary> {
    config
        .baselines()
        .into_iter()
        .map(|b| {
            let samples: Vec<(usize, f64)> = results
                .iter()
                .filter_map(|r| r.decrease_vs(b).map(|d| (r.index, d)))
                .collect();
            let values: Vec<f64> = samples.iter().map(|s| s.1).collect();
            BaselineSummary {
                baseline: b,
                undefined: results.len() - samples.len(),
                boxplot: stats::boxplot_stats(&values).ok(),
                samples,
            }
        })
        .collect()
}

fn correlation_row(config: &ExperimentConfig, label: String, pairs: &[(f64, f64)], excluded: usize) -> CorrelationRow {
    let (x, y): (Vec<f64>, Vec<f64>) = pairs.iter().copied().unzip();
    let outcome = match config.correlation_p {
        PValueMethod::T => stats::pearson_r(&x, &y),
        PValueMethod::Permutation => stats::pearson_r_permutation(&x, &y, config.permutations, config.base_seed),
    };
    match outcome {
        Ok(c) => CorrelationRow {
            label,
            correlation: Some(c),
            excluded,
            error: None,
        },
        Err(e) => CorrelationRow {
            label,
            correlation: None,
            excluded,
            error: Some(e.to_string()),
        },
    }
}

// Percent decrease (y) against log₁₀ ũ (x), per baseline and pooled.
fn correlate(config: &ExperimentConfig, results: &[InstanceResult]) -> Vec<CorrelationRow> {
    let baselines = config.baselines();
    let mut rows = Vec::new();
    let mut pooled = Vec::new();
    let mut pooled_excluded = 0;
    for &b in &baselines {
        let pairs: Vec<(f64, f64)> = results
            .iter()
            .filter_map(|r| Some((r.log10_u_tilde()?, r.decrease_vs(b)?)))
            .collect();
        let excluded = results.len() - pairs.len();
        pooled.extend_from_slice(&pairs);
        pooled_excluded += excluded;
        rows.push(correlation_row(config, b.key().to_string(), &pairs, excluded));
    }
    if !baselines.is_empty() {
        rows.push(correlation_row(config, "aggregate".to_string(), &pooled, pooled_excluded));
    }
    rows
}

impl SuiteReport {
    pub fn median_decrease(&self, baseline: PolicyKind) -> Option<f64> {
        self.baselines
            .iter()
            .find(|b| b.baseline == baseline)
            .and_then(|b| b.boxplot.as_ref())
            .map(|b| b.median)
    }

    pub fn correlation(&self, label: &str) -> Option<Correlation> {
        self.correlations.iter().find(|c| c.label == label).and_then(|c| c.correlation)
    }

    /// Writes `instances.csv`, `boxplot_<baseline>.csv`, `correlation.csv`
    /// and `summary.json` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        self.write_instances(&dir.join("instances.csv"))?;
        for b in &self.baselines {
            write_boxplot(b, &dir.join(format!("boxplot_{}.csv", b.baseline.key())))?;
        }
        self.write_correlations(&dir.join("correlation.csv"))?;
        fs::write(dir.join("summary.json"), self.summary_json())?;
        Ok(())
    }

    fn write_instances(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        let mut header: Vec<String> = vec!["instance".into(), "seed".into()];
        header.extend(BoundReport::CSV_HEADER.iter().map(|s| s.to_string()));
        header.push("log10_u_tilde".into());
        header.extend(self.config.policies.iter().map(|p| format!("regret_{}", p.key())));
        header.extend(self.config.baselines().iter().map(|b| format!("pct_decrease_{}", b.key())));
        w.write_record(&header)?;
        for r in &self.results {
            let mut row = vec![r.index.to_string(), r.seed.to_string()];
            row.extend(r.bounds.csv_record());
            row.push(fmt_opt(r.log10_u_tilde()));
            row.extend(r.mean_regret.iter().map(|(_, v)| fmt_f64(*v)));
            row.extend(r.percent_decrease.iter().map(|(_, d)| fmt_opt(*d)));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }

    fn write_correlations(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["baseline", "r", "p_value", "m", "excluded"])?;
        for c in &self.correlations {
            let (r, p, m) = match c.correlation {
                Some(c) => (fmt_f64(c.r), fmt_f64(c.p_value), c.m.to_string()),
                None => ("NA".into(), "NA".into(), "0".into()),
            };
            w.write_record([c.label.clone(), r, p, m, c.excluded.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn summary_json(&self) -> String {
        let doc = serde_json::json!({
            "version": env!("CARGO_PKG_VERSION"),
            "config": self.config,
            "instances_requested": self.config.num_instances,
            "instances_completed": self.results.len(),
            "instances_failed": self.failures.len(),
            "failures": self.failures,
            "instances_inflated": self.results.iter().filter(|r| r.bounds.inflated).count(),
            "instances_zero_u_tilde": self.results.iter().filter(|r| r.log10_u_tilde().is_none()).count(),
            "baselines": self.baselines,
            "correlations": self.correlations,
        });
        let mut s = serde_json::to_string_pretty(&doc).expect("summary serializes");
        s.push('\n');
        s
    }
}

fn write_boxplot(b: &BaselineSummary, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["kind", "instance", "value"])?;
    for (i, v) in &b.samples {
        w.write_record(["sample".to_string(), i.to_string(), fmt_f64(*v)])?;
    }
    if let Some(s) = &b.boxplot {
        for (name, v) in [
            ("median", s.median),
            ("q1", s.q1),
            ("q3", s.q3),
            ("whisker_low", s.whisker_low),
            ("whisker_high", s.whisker_high),
        ] {
            w.write_record([name.to_string(), String::new(), fmt_f64(v)])?;
        }
        w.write_record(["outliers".to_string(), String::new(), s.outliers.to_string()])?;
    }
    w.write_record(["undefined".to_string(), String::new(), b.undefined.to_string()])?;
    w.flush()?;
    Ok(())
}
