use std::collections::BTreeSet;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::policies::{PolicyHyperparams, PolicyKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PValueMethod {
    /// Student-t approximation.
    #[default]
    T,
    Permutation,
}

/// Everything a suite run depends on. Unknown keys are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub d: usize,
    pub k: usize,
    pub n: usize,
    pub num_instances: usize,
    pub repeats: usize,
    pub burn_in: usize,
    pub base_seed: u64,
    pub policies: Vec<PolicyKind>,
    pub alpha: f64,
    pub nu_samples: usize,
    pub output_dir: PathBuf,
    pub correlation_p: PValueMethod,
    pub permutations: usize,
    pub hyperparams: PolicyHyperparams,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            d: 10,
            k: 10,
            n: 1000,
            num_instances: 1000,
            repeats: 10,
            burn_in: 10_000,
            base_seed: 0,
            policies: PolicyKind::ALL.to_vec(),
            alpha: 0.95,
            nu_samples: 100_000,
            output_dir: PathBuf::from("results"),
            correlation_p: PValueMethod::T,
            permutations: 10_000,
            hyperparams: PolicyHyperparams::default(),
        }
    }
}

/// `(key, default, meaning)` for every config key, in document order.
pub const CONFIG_KEYS: &[(&str, &str, &str)] = &[
    ("d", "10", "state dimension"),
    ("k", "10", "number of actions"),
    ("n", "1000", "rounds per episode"),
    ("num_instances", "1000", "random instances in the sweep"),
    ("repeats", "10", "episodes per instance and policy"),
    ("burn_in", "10000", "state iterations discarded before each episode"),
    ("base_seed", "0", "root of every derived seed"),
    ("policies", "[kode, oracle, random, ucb, sw_ucb, rexp3, oful]", "policy roster"),
    ("alpha", "0.95", "confidence level for nu"),
    ("nu_samples", "100000", "Monte Carlo draws for nu"),
    ("output_dir", "results", "directory for report files"),
    ("correlation_p", "t", "p-value method: t or permutation"),
    ("permutations", "10000", "shuffles when correlation_p = permutation"),
    ("hyperparams.ucb.c", "null", "UCB width; null = sqrt(sigma^2 + tr(Z)/d)"),
    ("hyperparams.sw_ucb.window", "100", "SW-UCB per-arm window"),
    ("hyperparams.sw_ucb.c", "null", "SW-UCB width; null as for UCB"),
    ("hyperparams.rexp3.batch", "null", "restart period; null = ceil((k ln k)^(1/3) n^(2/3))"),
    ("hyperparams.rexp3.clip_sigmas", "3.0", "reward clip in units of sqrt(sigma^2 + tr Z)"),
    ("hyperparams.oful.lambda", "1.0", "ridge regularization"),
    ("hyperparams.oful.delta", "0.01", "confidence level"),
    ("hyperparams.oful.sigma_eff", "null", "noise scale; null = sqrt(sigma^2 + tr Z)"),
    ("hyperparams.oful.s_bound", "null", "parameter norm bound; null = sqrt(tr Z)"),
    ("hyperparams.oful.beta_scale", "1.0", "multiplier on the confidence radius"),
];

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)
            .map_err(|e| Error::Parse(format!("line {}, column {}: {e}", e.line(), e.column())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("config serializes");
        s.push('\n');
        s
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("d", self.d),
            ("k", self.k),
            ("n", self.n),
            ("num_instances", self.num_instances),
            ("repeats", self.repeats),
        ] {
            if v == 0 {
                return Err(Error::Parameter(format!("{name} must be at least 1")));
            }
        }
        if self.k < 2 {
            return Err(Error::Parameter("k must be at least 2".into()));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::Parameter(format!("alpha must lie in (0, 1), got {}", self.alpha)));
        }
        if self.nu_samples < 10_000 {
            return Err(Error::Parameter("nu_samples must be at least 10000".into()));
        }
        if self.policies.is_empty() {
            return Err(Error::Parameter("policy roster is empty".into()));
        }
        let unique: BTreeSet<_> = self.policies.iter().collect();
        if unique.len() != self.policies.len() {
            return Err(Error::Parameter("policy roster contains duplicates".into()));
        }
        if self.correlation_p == PValueMethod::Permutation && self.permutations == 0 {
            return Err(Error::Parameter("permutations must be at least 1".into()));
        }
        Ok(())
    }

    /// Baselines in the roster, in roster order. Empty unless KODE runs too.
    pub fn baselines(&self) -> Vec<PolicyKind> {
        if !self.policies.contains(&PolicyKind::Kode) {
            return Vec::new();
        }
        self.policies.iter().copied().filter(|p| p.is_baseline()).collect()
    }
}
