//! One policy, one environment, `n` rounds.

use std::io::Write;

use crate::bounds::{self, fmt_f64, fmt_opt, AngleBound};
use crate::env::{EnvState, LgdsParams};
use crate::error::Result;
use crate::kalman::KalmanState;
use crate::policies::{Policy, PolicyKind, RoundContext};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpisodeOptions {
    /// State iterations discarded before the first round.
    pub burn_in: usize,
    /// Track a Kalman filter alongside the policy and record the angle
    /// between `z_t` and `ẑ_{t|t−1}` and the online angle bound.
    pub diagnostics: bool,
}

impl Default for EpisodeOptions {
    fn default() -> Self {
        Self {
            burn_in: 10_000,
            diagnostics: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoundDiagnostics {
    /// `None` when either vector is zero.
    pub angle: Option<f64>,
    pub theta_bar: AngleBound,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeTrace {
    pub policy: PolicyKind,
    pub action_indices: Vec<usize>,
    pub rewards: Vec<f64>,
    /// `⟨a*, z_t⟩ − ⟨a_t, z_t⟩` per round.
    pub pseudo_regret: Vec<f64>,
    pub cumulative_regret: f64,
    pub diagnostics: Option<Vec<RoundDiagnostics>>,
}

impl EpisodeTrace {
    pub const CSV_HEADER: [&'static str; 6] = ["t", "action", "reward", "pseudo_regret", "angle", "theta_bar"];

    pub fn len(&self) -> usize {
        self.action_indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.action_indices.is_empty()
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(Self::CSV_HEADER)?;
        for t in 0..self.len() {
            let (angle, theta) = match &self.diagnostics {
                Some(d) => (fmt_opt(d[t].angle), fmt_opt(d[t].theta_bar.value())),
                None => ("NA".to_string(), "NA".to_string()),
            };
            w.write_record([
                t.to_string(),
                self.action_indices[t].to_string(),
                fmt_f64(self.rewards[t]),
                fmt_f64(self.pseudo_regret[t]),
                angle,
                theta,
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Burns in a fresh environment seeded by `env_seed`, then runs
/// select → step → observe for `n` rounds.
pub fn run_episode(
    params: &LgdsParams,
    policy: &mut dyn Policy,
    n: usize,
    env_seed: u64,
    options: EpisodeOptions,
) -> Result<EpisodeTrace> {
    let mut env = EnvState::init(params, env_seed)?;
    env.burn_in(params, options.burn_in);
    let mut shadow = options.diagnostics.then(|| KalmanState::new(params));

    let mut trace = EpisodeTrace {
        policy: policy.kind(),
        action_indices: Vec::with_capacity(n),
        rewards: Vec::with_capacity(n),
        pseudo_regret: Vec::with_capacity(n),
        cumulative_regret: 0.0,
        diagnostics: options.diagnostics.then(|| Vec::with_capacity(n)),
    };
    for t in 0..n {
        if let (Some(filter), Some(diag)) = (&shadow, &mut trace.diagnostics) {
            diag.push(RoundDiagnostics {
                angle: bounds::angle(&env.z, &filter.z_hat).ok(),
                theta_bar: bounds::online_angle_bound(&filter.z_hat, &filter.p).unwrap_or(AngleBound::NotApplicable),
            });
        }
        let ctx = RoundContext {
            t,
            horizon: n,
            true_state: &env.z,
        };
        let decision = policy.select(&ctx)?;
        let outcome = env.step(params, decision.action_index)?;
        policy.observe(&decision, outcome.reward)?;
        if let Some(filter) = &mut shadow {
            filter.update(&params.actions[decision.action_index], outcome.reward, params)?;
        }
        let regret = outcome.pseudo_regret();
        trace.action_indices.push(decision.action_index);
        trace.rewards.push(outcome.reward);
        trace.pseudo_regret.push(regret);
        trace.cumulative_regret += regret;
    }
    Ok(trace)
}
