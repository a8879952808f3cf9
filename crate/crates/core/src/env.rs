//! The bandit environment: a stable linear Gaussian dynamical system whose
//! state is read out through the chosen action.
//!
//! ```text
//! z_{t+1} = Γ z_t + ξ_t,   ξ_t ~ N(0, Q),   z_0 ~ N(0, Σ₀)
//! X_t     = ⟨a_t, z_t⟩ + η_t,  η_t ~ N(0, σ²)
//! ```

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matops::{self, argmax_lowest, Matrix, Vector};

const UNIT_NORM_TOL: f64 = 1e-12;

/// Full description of one environment instance.
#[derive(Debug, Clone, PartialEq)]
pub struct LgdsParams {
    pub gamma: Matrix,
    /// Process noise covariance.
    pub q: Matrix,
    /// Measurement noise variance.
    pub sigma2: f64,
    /// The action set; every entry has unit Euclidean norm.
    pub actions: Vec<Vector>,
    /// Covariance of the initial state.
    pub sigma0: Matrix,
    /// Seed the instance was generated from, if any.
    pub seed: Option<u64>,
}

impl LgdsParams {
    /// Builds and validates a parameter set.
    pub fn new(gamma: Matrix, q: Matrix, sigma2: f64, actions: Vec<Vector>, sigma0: Matrix) -> Result<Self> {
        let params = Self {
            gamma,
            q,
            sigma2,
            actions,
            sigma0,
            seed: None,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn dim(&self) -> usize {
        self.gamma.nrows()
    }

    pub fn num_actions(&self) -> usize {
        self.actions.len()
    }

    pub fn action(&self, index: usize) -> Result<&Vector> {
        self.actions.get(index).ok_or_else(|| {
            Error::Input(format!("action index {index} out of range (k = {})", self.actions.len()))
        })
    }

    /// Checks the structural invariants: stability, unit-norm actions, PSD
    /// covariances, positive σ², at least one action.
    ///
    /// `k ≥ 2` is only required by the instance generator and by `ũ`; a
    /// single-action set is a legal (if trivial) environment.
    pub fn validate(&self) -> Result<()> {
        let d = matops::ensure_square(&self.gamma, "gamma")?;
        matops::ensure_finite(&self.gamma, "gamma")?;
        for (name, m) in [("q", &self.q), ("sigma0", &self.sigma0)] {
            if m.nrows() != d || m.ncols() != d {
                return Err(Error::Dimension(format!("{name} must be {d}x{d}")));
            }
            matops::ensure_finite(m, name)?;
            let scale = m.norm().max(1.0);
            if (m - m.transpose()).norm() > 1e-9 * scale {
                return Err(Error::Parameter(format!("{name} is not symmetric")));
            }
            if matops::min_eigenvalue(m) < -1e-9 * scale {
                return Err(Error::Parameter(format!("{name} is not positive semidefinite")));
            }
        }
        if !(self.sigma2 > 0.0) || !self.sigma2.is_finite() {
            return Err(Error::Parameter(format!("sigma2 must be positive, got {}", self.sigma2)));
        }
        if self.actions.is_empty() {
            return Err(Error::Parameter("action set is empty".into()));
        }
        for (i, a) in self.actions.iter().enumerate() {
            if a.len() != d {
                return Err(Error::Dimension(format!("action {i} has length {}, expected {d}", a.len())));
            }
            if (a.norm() - 1.0).abs() > UNIT_NORM_TOL {
                return Err(Error::Parameter(format!("action {i} has norm {}, expected 1", a.norm())));
            }
        }
        let rho = matops::spectral_radius(&self.gamma)?;
        if rho >= 1.0 {
            return Err(Error::Unstable(rho));
        }
        Ok(())
    }

    /// Steady-state state covariance `Z = ΓZΓᵀ + Q`.
    pub fn steady_state_covariance(&self) -> Result<Matrix> {
        matops::solve_lyapunov(&self.gamma, &self.q)
    }

    pub fn to_document(&self) -> InstanceDocument {
        InstanceDocument {
            d: self.dim(),
            k: self.num_actions(),
            seed: self.seed,
            gamma: rows_of(&self.gamma),
            q: rows_of(&self.q),
            sigma2: self.sigma2,
            actions: self.actions.iter().map(|a| a.iter().copied().collect()).collect(),
            sigma0: rows_of(&self.sigma0),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_document()).expect("instance serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: InstanceDocument = serde_json::from_str(text)
            .map_err(|e| Error::Parse(format!("instance document, line {} column {}: {e}", e.line(), e.column())))?;
        doc.into_params()
    }
}

/// On-disk form of [`LgdsParams`]: matrices as arrays of rows.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceDocument {
    pub d: usize,
    pub k: usize,
    #[serde(default)]
    pub seed: Option<u64>,
    pub gamma: Vec<Vec<f64>>,
    pub q: Vec<Vec<f64>>,
    pub sigma2: f64,
    pub actions: Vec<Vec<f64>>,
    pub sigma0: Vec<Vec<f64>>,
}

impl InstanceDocument {
    pub fn into_params(self) -> Result<LgdsParams> {
        let d = self.d;
        if self.actions.len() != self.k {
            return Err(Error::Parse(format!("k = {} but {} actions listed", self.k, self.actions.len())));
        }
        let params = LgdsParams {
            gamma: matrix_from_rows(&self.gamma, d, "gamma")?,
            q: matrix_from_rows(&self.q, d, "q")?,
            sigma2: self.sigma2,
            actions: self
                .actions
                .iter()
                .enumerate()
                .map(|(i, a)| {
                    if a.len() != d {
                        return Err(Error::Parse(format!("action {i} has {} entries, expected {d}", a.len())));
                    }
                    Ok(Vector::from_column_slice(a))
                })
                .collect::<Result<_>>()?,
            sigma0: matrix_from_rows(&self.sigma0, d, "sigma0")?,
            seed: self.seed,
        };
        params.validate()?;
        Ok(params)
    }
}

fn rows_of(m: &Matrix) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

fn matrix_from_rows(rows: &[Vec<f64>], d: usize, name: &str) -> Result<Matrix> {
    if rows.len() != d || rows.iter().any(|r| r.len() != d) {
        return Err(Error::Parse(format!("{name} must be a {d}x{d} array of rows")));
    }
    let flat: Vec<f64> = rows.iter().flatten().copied().collect();
    Ok(Matrix::from_row_slice(d, d, &flat))
}

fn standard_normal_matrix(rng: &mut ChaCha8Rng, d: usize) -> Matrix {
    let entries: Vec<f64> = (0..d * d).map(|_| StandardNormal.sample(rng)).collect();
    Matrix::from_row_slice(d, d, &entries)
}

fn standard_normal_vector(rng: &mut ChaCha8Rng, d: usize) -> Vector {
    Vector::from_iterator(d, (0..d).map(|_| StandardNormal.sample(rng)))
}

/// Draws a random instance: `Q^{1/2}`, `σ`, actions and `G` with i.i.d.
/// standard normal entries (in that order, row-major), actions normalized to
/// the unit sphere, `Γ = 0.99 G / ρ(G)`, and `Σ₀` the Lyapunov steady state.
pub fn generate_instance(d: usize, k: usize, seed: u64) -> Result<LgdsParams> {
    if d == 0 {
        return Err(Error::Parameter("dimension must be at least 1".into()));
    }
    if k < 2 {
        return Err(Error::Parameter(format!("need at least two actions, got {k}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let q_sqrt = standard_normal_matrix(&mut rng, d);
    let q = matops::symmetrize(&(&q_sqrt * q_sqrt.transpose()));

    let sigma2 = loop {
        let s: f64 = StandardNormal.sample(&mut rng);
        if s != 0.0 {
            break s * s;
        }
    };

    let actions = (0..k)
        .map(|_| loop {
            let a = standard_normal_vector(&mut rng, d);
            let n = a.norm();
            if n > 0.0 {
                break a / n;
            }
        })
        .collect();

    let gamma = loop {
        let g = standard_normal_matrix(&mut rng, d);
        let rho = matops::spectral_radius(&g)?;
        if rho > 0.0 {
            break g * (0.99 / rho);
        }
    };

    let sigma0 = matops::solve_lyapunov(&gamma, &q)?;
    let params = LgdsParams {
        gamma,
        q,
        sigma2,
        actions,
        sigma0,
        seed: Some(seed),
    };
    params.validate()?;
    Ok(params)
}

/// What the environment emitted for one round.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOutcome {
    /// Observed reward `⟨a_t, z_t⟩ + η_t`.
    pub reward: f64,
    /// Noise-free mean of the chosen action, `⟨a_t, z_t⟩`.
    pub chosen_mean: f64,
    /// Best noise-free mean over the action set.
    pub x_star: f64,
    pub oracle_index: usize,
}

impl StepOutcome {
    pub fn pseudo_regret(&self) -> f64 {
        self.x_star - self.chosen_mean
    }
}

/// Hidden state plus the environment's private noise stream.
///
/// Noise is drawn in a fixed order each round (η, then ξ) so the trajectory
/// only depends on the seed and the action sequence.
#[derive(Debug, Clone)]
pub struct EnvState {
    pub z: Vector,
    pub t: u64,
    rng: ChaCha8Rng,
    q_factor: Matrix,
}

impl EnvState {
    /// Draws `z_0 ~ N(0, Σ₀)` from a stream seeded by `seed`.
    pub fn init(params: &LgdsParams, seed: u64) -> Result<Self> {
        let d = params.dim();
        let s0 = matops::psd_factor(&params.sigma0)?;
        let q_factor = matops::psd_factor(&params.q)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = standard_normal_vector(&mut rng, d);
        Ok(Self {
            z: s0 * w,
            t: 0,
            rng,
            q_factor,
        })
    }

    fn advance(&mut self, params: &LgdsParams) {
        let w = standard_normal_vector(&mut self.rng, self.z.len());
        self.z = &params.gamma * &self.z + &self.q_factor * w;
    }

    /// Runs the state recursion `iters` times without emitting rewards, then
    /// resets the round counter.
    pub fn burn_in(&mut self, params: &LgdsParams, iters: usize) {
        for _ in 0..iters {
            self.advance(params);
        }
        self.t = 0;
    }

    /// Noise-free means `⟨a, z_t⟩` of every action.
    pub fn means(&self, params: &LgdsParams) -> Vec<f64> {
        params.actions.iter().map(|a| a.dot(&self.z)).collect()
    }

    /// Plays `action_index` in the current round and advances the state.
    pub fn step(&mut self, params: &LgdsParams, action_index: usize) -> Result<StepOutcome> {
        let a = params.action(action_index)?;
        let means = self.means(params);
        let oracle_index = argmax_lowest(&means).ok_or_else(|| Error::Numeric("non-finite action means".into()))?;
        let chosen_mean = a.dot(&self.z);
        let eta: f64 = StandardNormal.sample(&mut self.rng);
        let reward = chosen_mean + params.sigma2.sqrt() * eta;
        self.advance(params);
        self.t += 1;
        Ok(StepOutcome {
            reward,
            chosen_mean,
            x_star: means[oracle_index],
            oracle_index,
        })
    }
}
