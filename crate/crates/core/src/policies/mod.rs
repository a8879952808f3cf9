//! Policies behind one select/observe interface.
//!
//! KODE and the Oracle are the two policies the analysis is about; Random,
//! UCB, SW-UCB, Rexp3 and OFUL are the comparison baselines. Score-based
//! policies always pick the lowest-index maximizer of their score vector.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::env::LgdsParams;
use crate::error::{Error, Result};
use crate::kalman::KalmanState;
use crate::matops::{argmax_lowest, Vector};

mod kode;
mod oful;
mod random;
mod rexp3;
mod ucb;

pub use kode::{Kode, Oracle};
pub use oful::{Oful, OfulConfig};
pub use random::RandomPolicy;
pub use rexp3::{Rexp3, Rexp3Config};
pub use ucb::{SwUcb, SwUcbConfig, Ucb, UcbConfig};

/// What a policy decided for one round, with the per-action scores it used
/// (selection probabilities for the randomized policies).
#[derive(Debug, Clone, PartialEq)]
pub struct PolicyDecision {
    pub action_index: usize,
    pub scores: Vec<f64>,
}

impl PolicyDecision {
    pub(crate) fn from_scores(scores: Vec<f64>) -> Result<Self> {
        let action_index = argmax_lowest(&scores).ok_or_else(|| Error::Input("empty action set".into()))?;
        Ok(Self { action_index, scores })
    }
}

/// Per-round information handed to [`Policy::select`].
#[derive(Debug, Clone, Copy)]
pub struct RoundContext<'a> {
    /// Zero-based round index.
    pub t: usize,
    pub horizon: usize,
    /// The hidden state. Only the Oracle is allowed to look at it.
    pub true_state: &'a Vector,
}

pub trait Policy: Send {
    fn kind(&self) -> PolicyKind;
    fn select(&mut self, ctx: &RoundContext<'_>) -> Result<PolicyDecision>;
    fn observe(&mut self, decision: &PolicyDecision, reward: f64) -> Result<()>;
}

/// `argmax_a ⟨a, ẑ_{t|t−1}⟩`.
pub fn kode_select(kstate: &KalmanState, actions: &[Vector]) -> Result<PolicyDecision> {
    if actions.is_empty() {
        return Err(Error::Input("empty action set".into()));
    }
    let scores = actions
        .iter()
        .map(|a| kstate.predict_reward(a))
        .collect::<Result<Vec<_>>>()?;
    PolicyDecision::from_scores(scores)
}

/// `argmax_a ⟨a, z_t⟩` on the true state.
pub fn oracle_select(z: &Vector, actions: &[Vector]) -> Result<PolicyDecision> {
    if actions.iter().any(|a| a.len() != z.len()) {
        return Err(Error::Dimension("action and state dimensions differ".into()));
    }
    PolicyDecision::from_scores(actions.iter().map(|a| a.dot(z)).collect())
}

/// Uniform draw over `0..k`; the score vector holds the (uniform) probabilities.
pub fn random_select<R: Rng + ?Sized>(k: usize, rng: &mut R) -> Result<PolicyDecision> {
    if k == 0 {
        return Err(Error::Input("empty action set".into()));
    }
    Ok(PolicyDecision {
        action_index: rng.random_range(0..k),
        scores: vec![1.0 / k as f64; k],
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolicyKind {
    Kode,
    Oracle,
    Random,
    Ucb,
    SwUcb,
    Rexp3,
    Oful,
}

impl PolicyKind {
    pub const ALL: [PolicyKind; 7] = [
        PolicyKind::Kode,
        PolicyKind::Oracle,
        PolicyKind::Random,
        PolicyKind::Ucb,
        PolicyKind::SwUcb,
        PolicyKind::Rexp3,
        PolicyKind::Oful,
    ];

    /// Identifier used in config documents and file names.
    pub fn key(self) -> &'static str {
        match self {
            PolicyKind::Kode => "kode",
            PolicyKind::Oracle => "oracle",
            PolicyKind::Random => "random",
            PolicyKind::Ucb => "ucb",
            PolicyKind::SwUcb => "sw_ucb",
            PolicyKind::Rexp3 => "rexp3",
            PolicyKind::Oful => "oful",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            PolicyKind::Kode => "KODE",
            PolicyKind::Oracle => "Oracle",
            PolicyKind::Random => "Random",
            PolicyKind::Ucb => "UCB",
            PolicyKind::SwUcb => "SW-UCB",
            PolicyKind::Rexp3 => "Rexp3",
            PolicyKind::Oful => "OFUL",
        }
    }

    /// Stable small integer used when deriving per-policy seeds.
    pub fn stream_id(self) -> u64 {
        self as u64
    }

    /// Baselines are everything KODE is compared against.
    pub fn is_baseline(self) -> bool {
        !matches!(self, PolicyKind::Kode | PolicyKind::Oracle)
    }
}

impl fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

impl FromStr for PolicyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_lowercase().replace('-', "_");
        PolicyKind::ALL
            .into_iter()
            .find(|k| k.key() == norm)
            .ok_or_else(|| {
                let known: Vec<_> = PolicyKind::ALL.iter().map(|k| k.key()).collect();
                Error::Parameter(format!("unknown policy '{s}' (known: {})", known.join(", ")))
            })
    }
}

/// Hyperparameters of the baselines. `None` fields are resolved per instance
/// from the environment's known reward scale.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PolicyHyperparams {
    pub ucb: UcbConfig,
    pub sw_ucb: SwUcbConfig,
    pub rexp3: Rexp3Config,
    pub oful: OfulConfig,
}

/// Reward-scale statistics the learner can compute from the known model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RewardScale {
    pub dim: usize,
    pub sigma2: f64,
    /// `tr(Z)` of the steady-state covariance.
    pub trace_z: f64,
}

impl RewardScale {
    pub fn from_params(params: &LgdsParams) -> Result<Self> {
        let z = params.steady_state_covariance()?;
        Ok(Self {
            dim: params.dim(),
            sigma2: params.sigma2,
            trace_z: z.trace(),
        })
    }

    /// Upper bound on the standard deviation of any action's reward,
    /// `√(σ² + tr Z)`.
    pub fn reward_std_bound(&self) -> f64 {
        (self.sigma2 + self.trace_z).sqrt()
    }

    /// Default UCB width scale `√(σ² + tr(Z)/d)`.
    pub fn ucb_scale(&self) -> f64 {
        (self.sigma2 + self.trace_z / self.dim as f64).sqrt()
    }
}

/// Builds a fresh policy for one episode.
pub fn build_policy(
    kind: PolicyKind,
    params: &LgdsParams,
    scale: &RewardScale,
    hyper: &PolicyHyperparams,
    horizon: usize,
    seed: u64,
) -> Result<Box<dyn Policy>> {
    let k = params.num_actions();
    Ok(match kind {
        PolicyKind::Kode => Box::new(Kode::new(params.clone())),
        PolicyKind::Oracle => Box::new(Oracle::new(params.actions.clone())),
        PolicyKind::Random => Box::new(RandomPolicy::new(k, seed)),
        PolicyKind::Ucb => Box::new(Ucb::new(k, hyper.ucb.c.unwrap_or_else(|| scale.ucb_scale()))?),
        PolicyKind::SwUcb => Box::new(SwUcb::new(
            k,
            hyper.sw_ucb.window,
            hyper.sw_ucb.c.unwrap_or_else(|| scale.ucb_scale()),
        )?),
        PolicyKind::Rexp3 => Box::new(Rexp3::new(
            k,
            hyper.rexp3.batch.unwrap_or_else(|| Rexp3::default_batch(k, horizon)),
            hyper.rexp3.clip_sigmas * scale.reward_std_bound(),
            seed,
        )?),
        PolicyKind::Oful => Box::new(Oful::new(params.actions.clone(), &hyper.oful, scale)?),
    })
}
