use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::{Policy, PolicyDecision, PolicyKind, RoundContext};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Rexp3Config {
    /// Restart period Δ; `None` uses `⌈(k ln k)^{1/3} n^{2/3}⌉`.
    pub batch: Option<usize>,
    /// Rewards are clipped to `±clip_sigmas · √(σ² + tr Z)` and mapped to `[0, 1]`.
    pub clip_sigmas: f64,
}

impl Default for Rexp3Config {
    fn default() -> Self {
        Self {
            batch: None,
            clip_sigmas: 3.0,
        }
    }
}

/// Exp3 restarted every `batch` rounds.
#[derive(Debug, Clone)]
pub struct Rexp3 {
    k: usize,
    batch: usize,
    gamma: f64,
    clip: f64,
    log_weights: Vec<f64>,
    rounds: usize,
    rng: ChaCha8Rng,
}

impl Rexp3 {
    pub fn default_batch(k: usize, horizon: usize) -> usize {
        let k = k as f64;
        let b = ((k * k.ln()).cbrt() * (horizon as f64).powf(2.0 / 3.0)).ceil();
        if b.is_finite() && b >= 1.0 {
            b as usize
        } else {
            1
        }
    }

    /// `min{1, √(k ln k / ((e − 1) Δ))}`
    pub fn exploration_rate(k: usize, batch: usize) -> f64 {
        let kf = k as f64;
        (kf * kf.ln() / ((std::f64::consts::E - 1.0) * batch as f64)).sqrt().min(1.0)
    }

    pub fn new(k: usize, batch: usize, clip: f64, seed: u64) -> Result<Self> {
        if k == 0 {
            return Err(Error::Input("empty action set".into()));
        }
        if batch == 0 {
            return Err(Error::Parameter("batch must be at least 1".into()));
        }
        if !(clip > 0.0) || !clip.is_finite() {
            return Err(Error::Parameter(format!("clip bound must be positive, got {clip}")));
        }
        Ok(Self {
            k,
            batch,
            gamma: Self::exploration_rate(k, batch),
            clip,
            log_weights: vec![0.0; k],
            rounds: 0,
            rng: ChaCha8Rng::seed_from_u64(seed),
        })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn probabilities(&self) -> Vec<f64> {
        let max = self.log_weights.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let w: Vec<f64> = self.log_weights.iter().map(|l| (l - max).exp()).collect();
        let total: f64 = w.iter().sum();
        let uniform = self.gamma / self.k as f64;
        w.iter().map(|wi| (1.0 - self.gamma) * wi / total + uniform).collect()
    }

    fn normalize(&self, reward: f64) -> f64 {
        ((reward + self.clip) / (2.0 * self.clip)).clamp(0.0, 1.0)
    }
}

impl Policy for Rexp3 {
    fn kind(&self) -> PolicyKind {
        PolicyKind::Rexp3
    }

    fn select(&mut self, _ctx: &RoundContext<'_>) -> Result<PolicyDecision> {
        let probs = self.probabilities();
        let u: f64 = self.rng.random();
        let mut acc = 0.0;
        let mut action_index = self.k - 1;
        for (i, p) in probs.iter().enumerate() {
            acc += p;
            if u < acc {
                action_index = i;
                break;
            }
        }
        Ok(PolicyDecision {
            action_index,
            scores: probs,
        })
    }

    fn observe(&mut self, decision: &PolicyDecision, reward: f64) -> Result<()> {
        let i = decision.action_index;
        let p = decision.scores[i];
        let estimate = self.normalize(reward) / p;
        self.log_weights[i] += self.gamma * estimate / self.k as f64;
        self.rounds += 1;
        if self.rounds.is_multiple_of(self.batch) {
            self.log_weights.iter_mut().for_each(|l| *l = 0.0);
        }
        Ok(())
    }
}
