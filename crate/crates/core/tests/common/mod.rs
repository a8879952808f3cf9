//! Property checks shared by the property tests and the acceptance run.
//! Each check draws its inputs from `seed` and reports a failure as `Err`.

#![allow(dead_code, clippy::neg_cmp_op_on_partial_ord)]

use kode::bounds::angle;
use kode::kalman::KalmanState;
use kode::matops::{self, Matrix, Vector};
use kode::policies::{kode_select, PolicyDecision};
use kode::{EnvState, LgdsParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub type Check = Result<(), String>;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(rng: &mut ChaCha8Rng, r: usize, c: usize) -> Matrix {
    Matrix::from_fn(r, c, |_, _| StandardNormal.sample(rng))
}

pub fn unit(rng: &mut ChaCha8Rng, d: usize) -> Vector {
    loop {
        let v = Vector::from_fn(d, |_, _| StandardNormal.sample(rng));
        if v.norm() > 1e-3 {
            return v.normalize();
        }
    }
}

/// `L Lᵀ` with `L` of random rank between 1 and `d`.
pub fn psd(rng: &mut ChaCha8Rng, d: usize) -> Matrix {
    let rank = rng.random_range(1..=d);
    let l = gaussian(rng, d, rank);
    matops::symmetrize(&(&l * l.transpose()))
}

/// Gaussian matrix rescaled to spectral radius `rho`.
pub fn stable(rng: &mut ChaCha8Rng, d: usize, rho: f64) -> Matrix {
    loop {
        let g = gaussian(rng, d, d);
        let r = matops::spectral_radius(&g).unwrap();
        if r > 1e-6 {
            return g * (rho / r);
        }
    }
}

pub struct System {
    pub gamma: Matrix,
    pub q: Matrix,
    pub sigma2: f64,
    pub a: Vector,
}

pub fn system(seed: u64, d: usize) -> System {
    let mut r = rng(seed);
    let rho = r.random_range(0.1..0.97);
    System {
        gamma: stable(&mut r, d, rho),
        q: psd(&mut r, d),
        sigma2: r.random_range(0.05..3.0),
        a: unit(&mut r, d),
    }
}

fn scale(m: &Matrix) -> f64 {
    m.norm().max(1.0)
}

pub fn riccati_preserves_psd(seed: u64, d: usize) -> Check {
    let s = system(seed, d);
    let p = psd(&mut rng(seed ^ 1), d);
    let next = matops::riccati_step(&p, &s.a, &s.gamma, &s.q, s.sigma2).map_err(|e| e.to_string())?;
    let low = matops::min_eigenvalue(&next);
    if low < -1e-9 * scale(&next) {
        return Err(format!("g(P, a) has eigenvalue {low}"));
    }
    if next != next.transpose() {
        return Err("g(P, a) not symmetric".into());
    }
    Ok(())
}

pub fn riccati_is_monotone(seed: u64, d: usize) -> Check {
    let s = system(seed, d);
    let mut r = rng(seed ^ 2);
    let lo = psd(&mut r, d);
    let hi = &lo + psd(&mut r, d);
    let g = |p: &Matrix| matops::riccati_step(p, &s.a, &s.gamma, &s.q, s.sigma2).unwrap();
    let diff = g(&hi) - g(&lo);
    let low = matops::min_eigenvalue(&diff);
    if low < -1e-9 * scale(&hi) {
        return Err(format!("g(P2) - g(P1) has eigenvalue {low}"));
    }
    Ok(())
}

pub fn dare_is_fixed_point(seed: u64, d: usize) -> Check {
    let s = system(seed, d);
    let tol = 1e-10 * scale(&s.q);
    let p = matops::solve_dare(&s.gamma, &s.q, s.sigma2, &s.a, tol, 1_000_000).map_err(|e| e.to_string())?;
    let res = (matops::riccati_step(&p, &s.a, &s.gamma, &s.q, s.sigma2).unwrap() - &p).norm();
    if res > tol {
        return Err(format!("residual {res} > {tol}"));
    }
    if matops::min_eigenvalue(&p) < -1e-9 * scale(&p) {
        return Err("DARE solution not PSD".into());
    }
    Ok(())
}

pub fn lyapunov_residual(seed: u64, d: usize) -> Check {
    let s = system(seed, d);
    let z = matops::solve_lyapunov(&s.gamma, &s.q).map_err(|e| e.to_string())?;
    let res = (&z - &s.gamma * &z * s.gamma.transpose() - &s.q).norm();
    if res > 1e-9 * scale(&z) {
        return Err(format!("Lyapunov residual {res}"));
    }
    Ok(())
}

/// Half of the cases hide an unobservable block behind a random rotation.
pub fn decomposition_structure(seed: u64, d: usize) -> Check {
    let mut r = rng(seed);
    let (gamma, a, max_obs) = if d > 1 && r.random_bool(0.5) {
        let m = r.random_range(1..d);
        let mut block = gaussian(&mut r, d, d) * 0.3;
        block.view_mut((0, m), (m, d - m)).fill(0.0);
        let rot = gaussian(&mut r, d, d).qr().q();
        let mut a0 = Vector::zeros(d);
        a0.rows_mut(0, m).copy_from(&unit(&mut r, m));
        (&rot * block * rot.transpose(), &rot * a0, m)
    } else {
        (gaussian(&mut r, d, d), unit(&mut r, d), d)
    };
    let dec = matops::observability_decompose(&gamma, &a).map_err(|e| e.to_string())?;
    let t = &dec.transform;
    let gs = scale(&gamma);
    if (t.transpose() * t - Matrix::identity(d, d)).norm() > 1e-9 {
        return Err("transform not orthogonal".into());
    }
    if dec.obs_dim == 0 || dec.obs_dim > max_obs {
        return Err(format!("observable dimension {} outside 1..={max_obs}", dec.obs_dim));
    }
    let upper = dec.observable_basis().transpose() * &gamma * dec.unobservable_basis();
    if upper.norm() > 1e-8 * gs {
        return Err(format!("upper-right block has norm {}", upper.norm()));
    }
    let (_, a_u) = dec.split_vector(&a);
    if a_u.norm() > 1e-9 {
        return Err("action leaks into the unobservable block".into());
    }
    let rebuilt = t.transpose() * &gamma * t;
    let m = dec.obs_dim;
    if (rebuilt.view((0, 0), (m, m)) - &dec.gamma_o).norm() > 1e-9 * gs
        || (rebuilt.view((m, 0), (d - m, m)) - &dec.gamma_u_prime).norm() > 1e-9 * gs
        || (rebuilt.view((m, m), (d - m, d - m)) - &dec.gamma_u).norm() > 1e-9 * gs
    {
        return Err("blocks disagree with the transformed matrix".into());
    }
    Ok(())
}

pub fn quantile_monotone_in_alpha(seed: u64, d: usize) -> Check {
    let mut r = rng(seed);
    let s = psd(&mut r, d) - psd(&mut r, d) * 0.5;
    let mut last = f64::INFINITY;
    for alpha in [0.05, 0.25, 0.5, 0.75, 0.95] {
        let q = matops::quadratic_form_quantile(&s, alpha, 10_000, seed).map_err(|e| e.to_string())?;
        if q > last {
            return Err(format!("quantile increased at alpha {alpha}"));
        }
        last = q;
    }
    Ok(())
}

/// Lowest index among ties; invariant to positive scaling and shifts.
pub fn argmax_invariants(seed: u64, k: usize) -> Check {
    let mut r = rng(seed);
    let mut scores: Vec<f64> = (0..k).map(|_| r.random_range(-3i32..3) as f64).collect();
    let best = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let first = scores.iter().position(|&s| s == best).unwrap();
    let got = matops::argmax_lowest(&scores);
    if got != Some(first) {
        return Err(format!("argmax {got:?}, expected {first}"));
    }
    let c = r.random_range(0.1..10.0);
    let shift = r.random_range(-5.0..5.0);
    let moved: Vec<f64> = scores.iter().map(|s| c * s + shift).collect();
    if matops::argmax_lowest(&moved) != got {
        return Err("argmax changed under c·x + b".into());
    }
    scores.push(f64::NAN);
    if matops::argmax_lowest(&scores) != got {
        return Err("NaN changed the argmax".into());
    }
    Ok(())
}

/// KODE's choice is unchanged when `ẑ` is scaled by a positive factor.
pub fn kode_scaling_invariance(seed: u64, d: usize) -> Check {
    let mut r = rng(seed);
    let actions: Vec<Vector> = (0..4).map(|_| unit(&mut r, d)).collect();
    let z = Vector::from_fn(d, |_, _| StandardNormal.sample(&mut r));
    let p = Matrix::identity(d, d);
    let pick = |zh: Vector| -> PolicyDecision { kode_select(&KalmanState::with_prior(zh, p.clone()), &actions).unwrap() };
    let base = pick(z.clone()).action_index;
    for c in [1e-3, 0.5, 7.0, 1e4] {
        if pick(&z * c).action_index != base {
            return Err(format!("choice changed at scale {c}"));
        }
    }
    Ok(())
}

/// Monte Carlo moments of `(z_t, ẑ_{t|t−1})` over independent replicates.
pub struct KalmanMoments {
    pub p: Matrix,
    pub error_cov: Matrix,
    pub cross: Matrix,
    pub pred_second: Matrix,
    pub state_second: Matrix,
    pub z: Matrix,
    pub angles_mean: f64,
}

/// Runs `replicates` copies of a filter fed by the true system for `rounds`
/// rounds of a fixed round-robin action schedule, from the steady-state prior.
pub fn kalman_moments(params: &LgdsParams, rounds: usize, replicates: usize, seed: u64) -> KalmanMoments {
    let d = params.dim();
    let k = params.num_actions();
    let mut error_cov = Matrix::zeros(d, d);
    let mut cross = Matrix::zeros(d, d);
    let mut pred_second = Matrix::zeros(d, d);
    let mut state_second = Matrix::zeros(d, d);
    let mut p = Matrix::zeros(d, d);
    let mut angles = 0.0;
    for rep in 0..replicates {
        let mut env = EnvState::init(params, seed.wrapping_add(rep as u64)).unwrap();
        let mut filter = KalmanState::new(params);
        for t in 0..rounds {
            let out = env.step(params, t % k).unwrap();
            filter.update(&params.actions[t % k], out.reward, params).unwrap();
        }
        let e = &env.z - &filter.z_hat;
        error_cov += &e * e.transpose();
        cross += &e * filter.z_hat.transpose();
        pred_second += &filter.z_hat * filter.z_hat.transpose();
        state_second += &env.z * env.z.transpose();
        angles += angle(&env.z, &filter.z_hat).unwrap_or(0.0);
        p = filter.p.clone();
    }
    let m = replicates as f64;
    KalmanMoments {
        p,
        error_cov: error_cov / m,
        cross: cross / m,
        pred_second: pred_second / m,
        state_second: state_second / m,
        z: params.steady_state_covariance().unwrap(),
        angles_mean: angles / m,
    }
}

fn rel(a: &Matrix, b: &Matrix) -> f64 {
    (a - b).norm() / b.norm().max(1e-12)
}

/// Error covariance equals `P`, the error is orthogonal to the prediction,
/// `E[ẑẑᵀ] = Z − P` and the state keeps covariance `Z`; each within 10 %
/// (relative Frobenius).
pub fn kalman_identities(params: &LgdsParams, rounds: usize, replicates: usize, seed: u64) -> Check {
    let mm = kalman_moments(params, rounds, replicates, seed);
    let checks = [
        ("E[e eᵀ] vs P", rel(&mm.error_cov, &mm.p)),
        ("E[z zᵀ] vs Z", rel(&mm.state_second, &mm.z)),
        ("E[ẑ ẑᵀ] vs Z − P", rel(&mm.pred_second, &(&mm.z - &mm.p))),
        (
            "E[e ẑᵀ] vs 0",
            mm.cross.norm() / (mm.p.norm() * (&mm.z - &mm.p).norm()).sqrt(),
        ),
    ];
    for (name, err) in checks {
        if !(err <= 0.1) {
            return Err(format!("{name}: relative error {err:.4}"));
        }
    }
    Ok(())
}
