//! One-step Kalman predictor for the reward-observed LGDS.
//!
//! Only the predictor form is kept: `ẑ_{t|t−1}` and `P_{t|t−1}`.

use crate::env::LgdsParams;
use crate::error::{Error, Result};
use crate::matops::{self, Matrix, Vector};

#[derive(Debug, Clone, PartialEq)]
pub struct KalmanState {
    /// `ẑ_{t|t−1}`
    pub z_hat: Vector,
    /// `P_{t|t−1}`
    pub p: Matrix,
}

/// Side quantities of one update.
#[derive(Debug, Clone)]
pub struct Innovation {
    /// `K_t = P a (aᵀPa + σ²)⁻¹`
    pub gain: Vector,
    /// `X_t − ⟨a, ẑ⟩`
    pub residual: f64,
    /// `aᵀPa + σ²`
    pub variance: f64,
}

impl KalmanState {
    /// `ẑ_{0|−1} = 0`, `P_{0|−1} = Σ₀`.
    pub fn new(params: &LgdsParams) -> Self {
        Self {
            z_hat: Vector::zeros(params.dim()),
            p: params.sigma0.clone(),
        }
    }

    pub fn with_prior(z_hat: Vector, p: Matrix) -> Self {
        Self { z_hat, p }
    }

    pub fn dim(&self) -> usize {
        self.z_hat.len()
    }

    /// `⟨a, ẑ_{t|t−1}⟩`
    pub fn predict_reward(&self, a: &Vector) -> Result<f64> {
        if a.len() != self.dim() {
            return Err(Error::Dimension(format!(
                "action has length {}, state has dimension {}",
                a.len(),
                self.dim()
            )));
        }
        Ok(a.dot(&self.z_hat))
    }

    /// Folds in reward `x` observed for action `a` and moves to the next
    /// round's prediction.
    pub fn update(&mut self, a: &Vector, x: f64, params: &LgdsParams) -> Result<Innovation> {
        if !x.is_finite() {
            return Err(Error::Input(format!("non-finite reward {x}")));
        }
        let predicted = self.predict_reward(a)?;
        let pa = &self.p * a;
        let variance = a.dot(&pa) + params.sigma2;
        let gain = pa / variance;
        let residual = x - predicted;

        let next_p = matops::riccati_step(&self.p, a, &params.gamma, &params.q, params.sigma2)?;
        self.z_hat = &params.gamma * (&self.z_hat + &gain * residual);
        self.p = next_p;
        Ok(Innovation {
            gain,
            residual,
            variance,
        })
    }
}
