//! Performance bounds and the implicit-exploration analysis.
//!
//! * [`compute_p_bar`]: a covariance dominating every fixed-action DARE solution.
//! * [`regret_bound`]: `n · max_{a,a'} √(2 (a − a')ᵀ P̄ (a − a') / π)`.
//! * [`online_angle_bound`] / [`steady_angle_bound`]: bounds on the expected
//!   angle between the state and its prediction, valid up to `π/4`.
//! * [`implicit_exploration_term`], [`u_tilde`], [`coupling_conditions`]: the
//!   innovation-driven perturbation of KODE's scores and when it vanishes.

use std::f64::consts::{FRAC_PI_4, PI};

use serde::{Serialize, Serializer};

use crate::env::LgdsParams;
use crate::error::{Error, Result};
use crate::matops::{self, Matrix, Vector};

pub const DARE_TOL: f64 = 1e-10;
pub const DARE_MAX_ITER: usize = 1_000_000;

/// Tolerance of the dominance checks, relative to `max(1, ‖P̄‖_F)`.
pub const DOMINANCE_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct PBar {
    pub matrix: Matrix,
    /// DARE solution `P_a` for each action, in action order.
    pub per_action: Vec<Matrix>,
    /// Action whose `P_a` has the largest trace.
    pub candidate_index: usize,
    /// Whether the candidate had to be shifted by `inflation · I`.
    pub inflated: bool,
    pub inflation: f64,
    /// `matrix ⪰ P_a` for every action, rechecked on the returned matrix.
    pub dominance_ok: bool,
}

/// Solves the DARE for each action and picks the largest-trace solution,
/// inflating it by `μ I` when it does not dominate every other solution.
///
/// Each DARE is iterated down from `Z`, so every `P_a` returned sits on or
/// above the exact fixed point and `g(P_a, a) ⪯ P_a`.
pub fn compute_p_bar(params: &LgdsParams) -> Result<PBar> {
    if params.actions.is_empty() {
        return Err(Error::Input("empty action set".into()));
    }
    let z = params.steady_state_covariance()?;
    let tol = DARE_TOL * z.norm().max(1.0);
    let per_action = params
        .actions
        .iter()
        .map(|a| matops::solve_dare_from(&params.gamma, &params.q, params.sigma2, a, &z, tol, DARE_MAX_ITER))
        .collect::<Result<Vec<_>>>()?;
    let traces: Vec<f64> = per_action.iter().map(|p| p.trace()).collect();
    let candidate_index = matops::argmax_lowest(&traces)
        .ok_or_else(|| Error::Numeric("non-finite DARE solution".into()))?;
    let candidate = per_action[candidate_index].clone();
    let check_tol = DOMINANCE_TOL * candidate.norm().max(1.0);

    let excess = per_action
        .iter()
        .map(|p| matops::max_eigenvalue(&(p - &candidate)))
        .fold(0.0f64, f64::max);
    let (matrix, inflated, inflation) = if excess <= check_tol {
        (candidate, false, 0.0)
    } else {
        let d = params.dim();
        (candidate + Matrix::identity(d, d) * excess, true, excess)
    };
    let dominance_ok = per_action
        .iter()
        .map(|p| matops::psd_dominates(&matrix, p, check_tol))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .all(|ok| ok);
    Ok(PBar {
        matrix,
        per_action,
        candidate_index,
        inflated,
        inflation,
        dominance_ok,
    })
}

/// Per-round bound times `n`.
pub fn regret_bound(p_bar: &Matrix, actions: &[Vector], n: usize) -> f64 {
    let mut worst = 0.0f64;
    for a in actions {
        for b in actions {
            let diff = a - b;
            let quad = diff.dot(&(p_bar * &diff)).max(0.0);
            worst = worst.max((2.0 * quad / PI).sqrt());
        }
    }
    n as f64 * worst
}

/// Angle in `[0, π]` between two nonzero vectors.
pub fn angle(z: &Vector, z_hat: &Vector) -> Result<f64> {
    if z.len() != z_hat.len() {
        return Err(Error::Dimension("vectors have different lengths".into()));
    }
    let denom = z.norm() * z_hat.norm();
    if !(denom > 0.0) {
        return Err(Error::UndefinedAngle);
    }
    Ok((z.dot(z_hat) / denom).clamp(-1.0, 1.0).acos())
}

/// An angle bound, or the marker that its value exceeded `π/4`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AngleBound {
    Applicable(f64),
    NotApplicable,
}

impl AngleBound {
    fn from_value(v: f64) -> Self {
        if v <= FRAC_PI_4 {
            AngleBound::Applicable(v)
        } else {
            AngleBound::NotApplicable
        }
    }

    pub fn value(self) -> Option<f64> {
        match self {
            AngleBound::Applicable(v) => Some(v),
            AngleBound::NotApplicable => None,
        }
    }

    pub fn is_applicable(self) -> bool {
        matches!(self, AngleBound::Applicable(_))
    }
}

impl Serialize for AngleBound {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.value().serialize(s)
    }
}

// ½ arccos(2x / (x + tr) − 1)
fn half_arccos(x: f64, tr: f64) -> f64 {
    0.5 * (2.0 * x / (x + tr) - 1.0).clamp(-1.0, 1.0).acos()
}

/// `½ arccos(2‖ẑ‖² / (‖ẑ‖² + tr P) − 1)`.
pub fn online_angle_bound(z_hat: &Vector, p: &Matrix) -> Result<AngleBound> {
    let zz = z_hat.norm_squared();
    let tr = p.trace();
    if zz == 0.0 && tr == 0.0 {
        return Err(Error::UndefinedAngle);
    }
    Ok(AngleBound::from_value(half_arccos(zz, tr)))
}

#[derive(Debug, Clone)]
pub struct SteadyAngle {
    /// Steady-state state covariance `Z`.
    pub z: Matrix,
    /// `(1 − α)`-quantile of `wᵀ (Z − P̄) w`.
    pub nu: f64,
    pub theta_s: AngleBound,
}

/// Steady-state angle bound `½ arccos(2ν / (ν + tr P̄) − 1)`; not applicable
/// when `ν ≤ 0`.
pub fn steady_angle_bound(
    params: &LgdsParams,
    p_bar: &Matrix,
    alpha: f64,
    mc_samples: usize,
    seed: u64,
) -> Result<SteadyAngle> {
    let z = params.steady_state_covariance()?;
    let nu = matops::quadratic_form_quantile(&(&z - p_bar), alpha, mc_samples, seed)?;
    let theta_s = if nu > 0.0 {
        AngleBound::from_value(half_arccos(nu, p_bar.trace()))
    } else {
        AngleBound::NotApplicable
    };
    Ok(SteadyAngle { z, nu, theta_s })
}

/// `⟨a_next, Γ P a_chosen⟩ ω / √(a_chosenᵀ P a_chosen + σ²)`.
pub fn implicit_exploration_term(
    a_next: &Vector,
    a_chosen: &Vector,
    p: &Matrix,
    gamma: &Matrix,
    sigma2: f64,
    omega: f64,
) -> f64 {
    let pa = p * a_chosen;
    let coupling = a_next.dot(&(gamma * &pa));
    coupling * omega / (a_chosen.dot(&pa) + sigma2).sqrt()
}

/// Variance of [`implicit_exploration_term`] over `ω ~ N(0, 1)`.
pub fn exploration_variance(a_next: &Vector, a_chosen: &Vector, p: &Matrix, gamma: &Matrix, sigma2: f64) -> f64 {
    let pa = p * a_chosen;
    let coupling = a_next.dot(&(gamma * &pa));
    coupling * coupling / (a_chosen.dot(&pa) + sigma2)
}

/// Largest exploration variance over ordered pairs of distinct action indices.
pub fn u_tilde(params: &LgdsParams, p_bar: &Matrix) -> Result<f64> {
    let k = params.num_actions();
    if k < 2 {
        return Err(Error::Input(format!("need at least two actions, got {k}")));
    }
    let mut best = 0.0f64;
    for (i, chosen) in params.actions.iter().enumerate() {
        for (j, other) in params.actions.iter().enumerate() {
            if i != j {
                best = best.max(exploration_variance(other, chosen, p_bar, &params.gamma, params.sigma2));
            }
        }
    }
    Ok(best)
}

/// Coupling between a chosen action `a` and another action `ã`, read in the
/// observability coordinates of `a`.
#[derive(Debug, Clone)]
pub struct CouplingConditions {
    /// `ã_O ≠ 0` or `Γ_U' ≠ 0`.
    pub condition1: bool,
    /// `|ãᵀ P a| > tol`.
    pub condition2: bool,
    /// Cross-covariance block `Φ` between the observable and unobservable parts is nonzero.
    pub phi_coupled: bool,
    /// `ãᵀ P a`.
    pub coupling: f64,
    /// Correlation of the two reward prediction errors, `ãᵀ P a + σ²`.
    pub error_correlation: f64,
    /// `ãᵀ Γ P a` vanishes for structural reasons: no observable overlap,
    /// no coupling block and `Φ = 0`.
    pub structural_zero: bool,
    pub obs_dim: usize,
}

pub fn coupling_conditions(params: &LgdsParams, a: &Vector, a_tilde: &Vector, p: &Matrix) -> Result<CouplingConditions> {
    let dec = matops::observability_decompose(&params.gamma, a)?;
    let (a_tilde_o, _) = dec.split_vector(a_tilde);
    let (_, phi, _) = dec.split_covariance(p);

    let g_tol = 1e-9 * params.gamma.norm().max(1.0);
    let p_tol = 1e-9 * p.norm().max(1.0);
    let condition1 = a_tilde_o.norm() > g_tol || dec.gamma_u_prime.norm() > g_tol;
    let coupling = a_tilde.dot(&(p * a));
    let condition2 = coupling.abs() > p_tol;
    let phi_coupled = phi.norm() > p_tol;
    Ok(CouplingConditions {
        condition1,
        condition2,
        phi_coupled,
        coupling,
        error_correlation: coupling + params.sigma2,
        structural_zero: !condition1 && !phi_coupled,
        obs_dim: dec.obs_dim,
    })
}

fn matrix_rows<S: Serializer>(m: &Matrix, s: S) -> std::result::Result<S::Ok, S::Error> {
    let rows: Vec<Vec<f64>> = m.row_iter().map(|r| r.iter().copied().collect()).collect();
    rows.serialize(s)
}

/// Every analytical quantity for one instance.
#[derive(Debug, Clone, Serialize)]
pub struct BoundReport {
    #[serde(serialize_with = "matrix_rows")]
    pub p_bar: Matrix,
    pub dominance_ok: bool,
    pub inflated: bool,
    pub inflation: f64,
    pub horizon: usize,
    pub regret_bound_per_round: f64,
    pub regret_bound_n: f64,
    #[serde(serialize_with = "matrix_rows")]
    pub z_lyapunov: Matrix,
    pub nu: f64,
    pub alpha: f64,
    pub theta_s: AngleBound,
    /// `None` for a single-action instance.
    pub u_tilde: Option<f64>,
}

impl BoundReport {
    pub const CSV_HEADER: [&'static str; 9] = [
        "dominance_ok",
        "inflated",
        "inflation",
        "regret_bound_per_round",
        "regret_bound_n",
        "nu",
        "alpha",
        "theta_s",
        "u_tilde",
    ];

    pub fn csv_record(&self) -> Vec<String> {
        vec![
            self.dominance_ok.to_string(),
            self.inflated.to_string(),
            fmt_f64(self.inflation),
            fmt_f64(self.regret_bound_per_round),
            fmt_f64(self.regret_bound_n),
            fmt_f64(self.nu),
            fmt_f64(self.alpha),
            fmt_opt(self.theta_s.value()),
            fmt_opt(self.u_tilde),
        ]
    }
}

/// Shortest round-trip representation of a double.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:?}")
}

pub fn fmt_opt(x: Option<f64>) -> String {
    x.map_or_else(|| "NA".to_string(), fmt_f64)
}

pub fn bound_report(params: &LgdsParams, horizon: usize, alpha: f64, nu_samples: usize, seed: u64) -> Result<BoundReport> {
    let pb = compute_p_bar(params)?;
    let per_round = regret_bound(&pb.matrix, &params.actions, 1);
    let steady = steady_angle_bound(params, &pb.matrix, alpha, nu_samples, seed)?;
    let u = if params.num_actions() >= 2 {
        Some(u_tilde(params, &pb.matrix)?)
    } else {
        None
    };
    Ok(BoundReport {
        dominance_ok: pb.dominance_ok,
        inflated: pb.inflated,
        inflation: pb.inflation,
        horizon,
        regret_bound_per_round: per_round,
        regret_bound_n: horizon as f64 * per_round,
        p_bar: pb.matrix,
        z_lyapunov: steady.z,
        nu: steady.nu,
        alpha,
        theta_s: steady.theta_s,
        u_tilde: u,
    })
}
