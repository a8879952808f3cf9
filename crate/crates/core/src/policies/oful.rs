use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matops::{Matrix, Vector};

use super::{Policy, PolicyDecision, PolicyKind, RewardScale, RoundContext};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OfulConfig {
    /// Ridge regularization λ.
    pub lambda: f64,
    /// Confidence level δ.
    pub delta: f64,
    /// Noise scale; `None` uses `√(σ² + tr Z)`.
    pub sigma_eff: Option<f64>,
    /// Parameter norm bound; `None` uses `√(tr Z)`.
    pub s_bound: Option<f64>,
    /// Multiplier on the confidence radius β_t.
    pub beta_scale: f64,
}

impl Default for OfulConfig {
    fn default() -> Self {
        Self {
            lambda: 1.0,
            delta: 0.01,
            sigma_eff: None,
            s_bound: None,
            beta_scale: 1.0,
        }
    }
}

/// Optimism in the face of uncertainty for a fixed linear parameter:
/// score `⟨a, θ̂⟩ + β_t ‖a‖_{V⁻¹}` with ridge estimate `θ̂ = V⁻¹ b`.
#[derive(Debug, Clone)]
pub struct Oful {
    actions: Vec<Vector>,
    v_inv: Matrix,
    b: Vector,
    observations: usize,
    lambda: f64,
    delta: f64,
    sigma_eff: f64,
    s_bound: f64,
    beta_scale: f64,
}

impl Oful {
    pub fn new(actions: Vec<Vector>, cfg: &OfulConfig, scale: &RewardScale) -> Result<Self> {
        if actions.is_empty() {
            return Err(Error::Input("empty action set".into()));
        }
        if !(cfg.lambda > 0.0) {
            return Err(Error::Parameter(format!("lambda must be positive, got {}", cfg.lambda)));
        }
        if !(cfg.delta > 0.0 && cfg.delta < 1.0) {
            return Err(Error::Parameter(format!("delta must lie in (0, 1), got {}", cfg.delta)));
        }
        if !(cfg.beta_scale >= 0.0) {
            return Err(Error::Parameter(format!("beta_scale must be >= 0, got {}", cfg.beta_scale)));
        }
        let d = actions[0].len();
        Ok(Self {
            v_inv: Matrix::identity(d, d) / cfg.lambda,
            b: Vector::zeros(d),
            observations: 0,
            lambda: cfg.lambda,
            delta: cfg.delta,
            sigma_eff: cfg.sigma_eff.unwrap_or_else(|| scale.reward_std_bound()),
            s_bound: cfg.s_bound.unwrap_or_else(|| scale.trace_z.sqrt()),
            beta_scale: cfg.beta_scale,
            actions,
        })
    }

    /// `σ_eff √(d ln((1 + t/λ)/δ)) + √λ S`, times the configured scale.
    pub fn beta(&self) -> f64 {
        let d = self.b.len() as f64;
        let t = self.observations as f64;
        let radius = self.sigma_eff * (d * ((1.0 + t / self.lambda) / self.delta).ln()).sqrt()
            + self.lambda.sqrt() * self.s_bound;
        self.beta_scale * radius
    }

    pub fn theta_hat(&self) -> Vector {
        &self.v_inv * &self.b
    }

    pub fn scores(&self) -> Vec<f64> {
        let theta = self.theta_hat();
        let beta = self.beta();
        self.actions
            .iter()
            .map(|a| a.dot(&theta) + beta * a.dot(&(&self.v_inv * a)).max(0.0).sqrt())
            .collect()
    }
}

impl Policy for Oful {
    fn kind(&self) -> PolicyKind {
        PolicyKind::Oful
    }

    fn select(&mut self, _ctx: &RoundContext<'_>) -> Result<PolicyDecision> {
        PolicyDecision::from_scores(self.scores())
    }

    fn observe(&mut self, decision: &PolicyDecision, reward: f64) -> Result<()> {
        let a = &self.actions[decision.action_index];
        // Sherman–Morrison on V ← V + a aᵀ
        let va = &self.v_inv * a;
        let denom = 1.0 + a.dot(&va);
        self.v_inv -= (&va * va.transpose()) / denom;
        self.v_inv = crate::matops::symmetrize(&self.v_inv);
        self.b.axpy(reward, a, 1.0);
        self.observations += 1;
        Ok(())
    }
}
