//! Small dense-matrix kernels used throughout the crate.
//!
//! Everything here is a pure function of its inputs. Matrices are
//! `nalgebra::DMatrix<f64>`; the only decompositions borrowed from nalgebra
//! are the generic ones (Schur, symmetric eigen, LU, Cholesky). The
//! Riccati map, its fixed point, the Lyapunov solve, the observability
//! Gramian and the observability decomposition are built here.

use nalgebra::linalg::{Schur, SymmetricEigen};
use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::experiments::stats::quantile_sorted;

pub type Matrix = DMatrix<f64>;
pub type Vector = DVector<f64>;

/// Tolerance used to decide the rank of the observability Krylov sequence.
pub const RANK_TOL: f64 = 1e-10;

pub(crate) fn ensure_square(m: &Matrix, what: &str) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::Dimension(format!(
            "{what} must be square, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(m.nrows())
}

pub(crate) fn ensure_finite(m: &Matrix, what: &str) -> Result<()> {
    if m.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::Input(format!("{what} contains non-finite entries")))
    }
}

fn ensure_same_dim(m: &Matrix, d: usize, what: &str) -> Result<()> {
    if m.nrows() != d || m.ncols() != d {
        return Err(Error::Dimension(format!(
            "{what} must be {d}x{d}, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(())
}

fn ensure_len(v: &Vector, d: usize, what: &str) -> Result<()> {
    if v.len() != d {
        return Err(Error::Dimension(format!(
            "{what} must have length {d}, got {}",
            v.len()
        )));
    }
    Ok(())
}

/// `(M + Mᵀ) / 2`.
pub fn symmetrize(m: &Matrix) -> Matrix {
    (m + m.transpose()) * 0.5
}

/// Smallest eigenvalue of the symmetric part of `m`.
pub fn min_eigenvalue(m: &Matrix) -> f64 {
    if m.nrows() == 0 {
        return 0.0;
    }
    symmetrize(m).symmetric_eigenvalues().min()
}

/// Largest eigenvalue of the symmetric part of `m`.
pub fn max_eigenvalue(m: &Matrix) -> f64 {
    if m.nrows() == 0 {
        return 0.0;
    }
    symmetrize(m).symmetric_eigenvalues().max()
}

/// Largest eigenvalue magnitude over the complex spectrum.
pub fn spectral_radius(m: &Matrix) -> Result<f64> {
    let d = ensure_square(m, "matrix")?;
    ensure_finite(m, "matrix")?;
    if d == 0 {
        return Ok(0.0);
    }
    let schur = Schur::try_new(m.clone(), f64::EPSILON, 100_000)
        .ok_or_else(|| Error::Numeric("Schur iteration did not converge".into()))?;
    Ok(schur
        .complex_eigenvalues()
        .iter()
        .map(|c| c.re.hypot(c.im))
        .fold(0.0, f64::max))
}

/// Solves `Z = Γ Z Γᵀ + Q` through the Kronecker form
/// `(I − Γ⊗Γ) vec(Z) = vec(Q)`.
pub fn solve_lyapunov(gamma: &Matrix, q: &Matrix) -> Result<Matrix> {
    let d = ensure_square(gamma, "gamma")?;
    ensure_same_dim(q, d, "q")?;
    ensure_finite(q, "q")?;
    let rho = spectral_radius(gamma)?;
    if rho >= 1.0 {
        return Err(Error::Unstable(rho));
    }
    if d == 0 {
        return Ok(Matrix::zeros(0, 0));
    }
    let kron = gamma.kronecker(gamma);
    let system = Matrix::identity(d * d, d * d) - kron;
    // vec(ΓZΓᵀ) = (Γ⊗Γ) vec(Z) with column-major vec
    let rhs = DVector::from_column_slice(q.as_slice());
    let sol = system
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Numeric("singular Lyapunov system".into()))?;
    let z = symmetrize(&Matrix::from_column_slice(d, d, sol.as_slice()));
    ensure_finite(&z, "Lyapunov solution")?;
    Ok(z)
}

/// One step of the difference Riccati map
/// `g(P, a) = ΓPΓᵀ + Q − ΓPa (aᵀPa + σ²)⁻¹ aᵀPΓᵀ`, symmetrized.
pub fn riccati_step(p: &Matrix, a: &Vector, gamma: &Matrix, q: &Matrix, sigma2: f64) -> Result<Matrix> {
    let d = ensure_square(gamma, "gamma")?;
    ensure_same_dim(p, d, "p")?;
    ensure_same_dim(q, d, "q")?;
    ensure_len(a, d, "action")?;
    let pa = p * a;
    let innovation_var = a.dot(&pa) + sigma2;
    if !(innovation_var > 0.0) || !innovation_var.is_finite() {
        return Err(Error::Numeric(format!(
            "innovation variance must be positive, got {innovation_var}"
        )));
    }
    let gpa = gamma * pa;
    let next = gamma * p * gamma.transpose() + q - (&gpa * gpa.transpose()) / innovation_var;
    Ok(symmetrize(&next))
}

/// Fixed point of `g(·, a)`, iterated from `P₀ = Q`.
///
/// Returns the first iterate `P` with `‖g(P, a) − P‖_F ≤ tol`.
pub fn solve_dare(
    gamma: &Matrix,
    q: &Matrix,
    sigma2: f64,
    a: &Vector,
    tol: f64,
    max_iter: usize,
) -> Result<Matrix> {
    solve_dare_from(gamma, q, sigma2, a, q, tol, max_iter)
}

/// Same iteration started from `p0`. Started at any `p0 ⪰ P_a` (the
/// steady-state covariance `Z`, say) the iterates decrease monotonically, so
/// the result over-approximates the fixed point.
pub fn solve_dare_from(
    gamma: &Matrix,
    q: &Matrix,
    sigma2: f64,
    a: &Vector,
    p0: &Matrix,
    tol: f64,
    max_iter: usize,
) -> Result<Matrix> {
    if !(tol > 0.0) {
        return Err(Error::Parameter(format!("tol must be positive, got {tol}")));
    }
    let d = ensure_square(gamma, "gamma")?;
    ensure_same_dim(p0, d, "initial covariance")?;
    let mut p = symmetrize(p0);
    let mut residual = f64::INFINITY;
    for _ in 0..max_iter {
        let next = riccati_step(&p, a, gamma, q, sigma2)?;
        residual = (&next - &p).norm();
        if !residual.is_finite() {
            return Err(Error::Numeric("Riccati iteration diverged".into()));
        }
        if residual <= tol {
            return Ok(p);
        }
        p = next;
    }
    Err(Error::Convergence {
        iterations: max_iter,
        residual,
    })
}

/// `Σ_{τ=t0}^{t1} (Γᵀ)^τ a_τ a_τᵀ Γ^τ`, with `actions[τ]` supplying `a_τ`.
pub fn observability_gramian(gamma: &Matrix, actions: &[Vector], t0: usize, t1: usize) -> Result<Matrix> {
    let d = ensure_square(gamma, "gamma")?;
    if t0 > t1 {
        return Err(Error::Input(format!("window start {t0} after end {t1}")));
    }
    if actions.len() <= t1 {
        return Err(Error::Input(format!(
            "no action supplied for round {} (window ends at {t1})",
            actions.len()
        )));
    }
    let gt = gamma.transpose();
    let mut power = Matrix::identity(d, d); // (Γᵀ)^τ
    for _ in 0..t0 {
        power = &gt * power;
    }
    let mut gram = Matrix::zeros(d, d);
    for a in &actions[t0..=t1] {
        ensure_len(a, d, "action")?;
        let v = &power * a;
        gram += &v * v.transpose();
        power = &gt * power;
    }
    Ok(symmetrize(&gram))
}

/// Orthogonal change of coordinates splitting the state into the part seen
/// through `a` and the part it cannot see.
///
/// With `T = [V_O V_U]`, `Tᵀ Γ T = [[Γ_O, 0], [Γ_U', Γ_U]]` and
/// `Tᵀ a = (a_O, 0)`.
#[derive(Debug, Clone)]
pub struct ObservabilityDecomposition {
    pub transform: Matrix,
    pub obs_dim: usize,
    pub gamma_o: Matrix,
    pub gamma_u_prime: Matrix,
    pub gamma_u: Matrix,
    pub a_o: Vector,
}

impl ObservabilityDecomposition {
    pub fn dim(&self) -> usize {
        self.transform.nrows()
    }

    pub fn observable_basis(&self) -> Matrix {
        self.transform.columns(0, self.obs_dim).into_owned()
    }

    pub fn unobservable_basis(&self) -> Matrix {
        let d = self.dim();
        self.transform.columns(self.obs_dim, d - self.obs_dim).into_owned()
    }

    /// Coordinates `(v_O, v_U)` of a vector in the decomposed basis.
    pub fn split_vector(&self, v: &Vector) -> (Vector, Vector) {
        (self.observable_basis().transpose() * v, self.unobservable_basis().transpose() * v)
    }

    /// Blocks `(P^O, Φ, P^U)` of `Tᵀ P T`.
    pub fn split_covariance(&self, p: &Matrix) -> (Matrix, Matrix, Matrix) {
        let vo = self.observable_basis();
        let vu = self.unobservable_basis();
        (
            vo.transpose() * p * &vo,
            vo.transpose() * p * &vu,
            vu.transpose() * p * &vu,
        )
    }
}

// Appends `v` to `basis` if it is not (numerically) in its span. Two passes of
// modified Gram-Schmidt.
fn orthogonalize_against(basis: &[Vector], v: &Vector) -> Vector {
    let mut w = v.clone();
    for _ in 0..2 {
        for q in basis {
            let c = q.dot(&w);
            w.axpy(-c, q, 1.0);
        }
    }
    w
}

pub fn observability_decompose(gamma: &Matrix, a: &Vector) -> Result<ObservabilityDecomposition> {
    let d = ensure_square(gamma, "gamma")?;
    ensure_len(a, d, "action")?;
    let norm = a.norm();
    if (norm - 1.0).abs() > 1e-9 {
        return Err(Error::Parameter(format!("action must have unit norm, got {norm}")));
    }

    // Arnoldi-style Krylov basis of span{a, Γᵀa, (Γᵀ)²a, ...}.
    let gt = gamma.transpose();
    let scale = gamma.norm().max(1.0);
    let mut basis: Vec<Vector> = vec![a / norm];
    while basis.len() < d {
        let candidate = &gt * basis.last().expect("non-empty");
        let w = orthogonalize_against(&basis, &candidate);
        let wn = w.norm();
        if wn <= RANK_TOL * scale {
            break;
        }
        basis.push(w / wn);
    }
    let obs_dim = basis.len();

    for j in 0..d {
        if basis.len() == d {
            break;
        }
        let e = Vector::from_fn(d, |i, _| if i == j { 1.0 } else { 0.0 });
        let w = orthogonalize_against(&basis, &e);
        let wn = w.norm();
        if wn > 1e-6 {
            basis.push(w / wn);
        }
    }
    if basis.len() != d {
        return Err(Error::Numeric("failed to complete orthogonal basis".into()));
    }

    let transform = Matrix::from_columns(&basis);
    let vo = transform.columns(0, obs_dim).into_owned();
    let vu = transform.columns(obs_dim, d - obs_dim).into_owned();
    Ok(ObservabilityDecomposition {
        gamma_o: vo.transpose() * gamma * &vo,
        gamma_u_prime: vu.transpose() * gamma * &vo,
        gamma_u: vu.transpose() * gamma * &vu,
        a_o: vo.transpose() * a,
        transform,
        obs_dim,
    })
}

/// Empirical `(1 − α)`-quantile of `wᵀ S w`, `w ~ N(0, I)`.
///
/// Uses the eigen-decomposition `S = U Λ Uᵀ`: since `Uᵀw` is again standard
/// normal, `wᵀ S w` has the law of `Σ λᵢ wᵢ²`.
pub fn quadratic_form_quantile(s: &Matrix, alpha: f64, samples: usize, seed: u64) -> Result<f64> {
    let d = ensure_square(s, "matrix")?;
    ensure_finite(s, "matrix")?;
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Parameter(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    if samples < 10_000 {
        return Err(Error::Parameter(format!(
            "at least 10^4 samples required, got {samples}"
        )));
    }
    if d == 0 {
        return Ok(0.0);
    }
    let eig = symmetrize(s).symmetric_eigenvalues();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draws: Vec<f64> = (0..samples)
        .map(|_| {
            eig.iter()
                .map(|&l| {
                    let w: f64 = StandardNormal.sample(&mut rng);
                    l * w * w
                })
                .sum()
        })
        .collect();
    draws.sort_by(f64::total_cmp);
    Ok(quantile_sorted(&draws, 1.0 - alpha))
}

/// True iff `p_hi − p_lo ⪰ −tol·I`.
pub fn psd_dominates(p_hi: &Matrix, p_lo: &Matrix, tol: f64) -> Result<bool> {
    let d = ensure_square(p_hi, "p_hi")?;
    ensure_same_dim(p_lo, d, "p_lo")?;
    Ok(min_eigenvalue(&(p_hi - p_lo)) >= -tol)
}

/// A factor `L` with `L Lᵀ = S` for a PSD matrix: Cholesky when it succeeds,
/// otherwise the scaled eigenvectors.
pub fn psd_factor(s: &Matrix) -> Result<Matrix> {
    let d = ensure_square(s, "covariance")?;
    ensure_finite(s, "covariance")?;
    let sym = symmetrize(s);
    if let Some(chol) = sym.clone().cholesky() {
        return Ok(chol.l());
    }
    let eig = SymmetricEigen::new(sym);
    let max_ev = eig.eigenvalues.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let tol = 1e-10 * max_ev.max(1.0);
    if eig.eigenvalues.iter().any(|&v| v < -tol) {
        return Err(Error::Parameter("covariance is not positive semidefinite".into()));
    }
    let mut factor = eig.eigenvectors;
    for j in 0..d {
        let s = eig.eigenvalues[j].max(0.0).sqrt();
        factor.column_mut(j).scale_mut(s);
    }
    Ok(factor)
}

/// Lowest index among the maxima of `scores`. NaN entries are never chosen.
pub fn argmax_lowest(scores: &[f64]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, &s) in scores.iter().enumerate() {
        if s.is_nan() {
            continue;
        }
        match best {
            Some((_, b)) if s <= b => {}
            _ => best = Some((i, s)),
        }
    }
    best.map(|(i, _)| i)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn diag(v: &[f64]) -> Matrix {
        Matrix::from_diagonal(&Vector::from_column_slice(v))
    }

    fn m(rows: usize, cols: usize, v: &[f64]) -> Matrix {
        Matrix::from_row_slice(rows, cols, v)
    }

    fn v(x: &[f64]) -> Vector {
        Vector::from_column_slice(x)
    }

    #[test]
    fn spectral_radius_examples() {
        assert_relative_eq!(spectral_radius(&Matrix::identity(3, 3)).unwrap(), 1.0, epsilon = 1e-12);
        assert_eq!(spectral_radius(&Matrix::zeros(2, 2)).unwrap(), 0.0);
        assert_eq!(spectral_radius(&m(2, 2, &[0.0, 1.0, 0.0, 0.0])).unwrap(), 0.0);
        assert_relative_eq!(spectral_radius(&diag(&[0.5, -2.0])).unwrap(), 2.0, epsilon = 1e-12);
    }

    #[test]
    fn spectral_radius_complex_pair() {
        // rotation by 90° scaled by 0.7 has eigenvalues ±0.7i
        let r = m(2, 2, &[0.0, -0.7, 0.7, 0.0]);
        assert_relative_eq!(spectral_radius(&r).unwrap(), 0.7, epsilon = 1e-12);
    }

    #[test]
    fn spectral_radius_rejects_non_square() {
        assert!(matches!(spectral_radius(&Matrix::zeros(2, 3)), Err(Error::Dimension(_))));
    }

    #[test]
    fn lyapunov_examples() {
        let q = m(2, 2, &[2.0, 0.5, 0.5, 1.0]);
        let z = solve_lyapunov(&Matrix::zeros(2, 2), &q).unwrap();
        assert_relative_eq!(z, q, epsilon = 1e-14);

        let z = solve_lyapunov(&m(1, 1, &[0.5]), &m(1, 1, &[1.0])).unwrap();
        assert_relative_eq!(z[(0, 0)], 1.0 / (1.0 - 0.25), epsilon = 1e-12);

        let z = solve_lyapunov(&diag(&[0.9, 0.5]), &Matrix::identity(2, 2)).unwrap();
        assert_relative_eq!(z, diag(&[1.0 / (1.0 - 0.81), 1.0 / (1.0 - 0.25)]), epsilon = 1e-10);
    }

    #[test]
    fn lyapunov_rejects_unstable() {
        let r = solve_lyapunov(&Matrix::identity(2, 2), &Matrix::identity(2, 2));
        assert!(matches!(r, Err(Error::Unstable(_))));
    }

    #[test]
    fn lyapunov_residual_nonsymmetric_gamma() {
        let gamma = m(3, 3, &[0.5, 0.2, -0.1, 0.0, 0.3, 0.4, 0.1, -0.2, 0.6]);
        let l = m(3, 3, &[1.0, 0.0, 0.0, 0.3, 1.0, 0.0, -0.2, 0.5, 1.0]);
        let q = &l * l.transpose();
        let z = solve_lyapunov(&gamma, &q).unwrap();
        let res = (&z - &gamma * &z * gamma.transpose() - &q).norm();
        assert!(res <= 1e-10 * (1.0 + z.norm()), "residual {res}");
    }

    #[test]
    fn riccati_step_examples() {
        let q = m(2, 2, &[1.0, 0.2, 0.2, 0.5]);
        let p = m(2, 2, &[3.0, 1.0, 1.0, 2.0]);
        let a = v(&[0.6, 0.8]);
        assert_relative_eq!(riccati_step(&p, &a, &Matrix::zeros(2, 2), &q, 1.0).unwrap(), q);
        assert_relative_eq!(riccati_step(&Matrix::zeros(2, 2), &a, &diag(&[0.9, 0.3]), &q, 1.0).unwrap(), q);

        // scalar: γ²p + q − γ²p²/(p + σ²) with γ=1, q=0, σ²=1, p=1
        let out = riccati_step(&m(1, 1, &[1.0]), &v(&[1.0]), &m(1, 1, &[1.0]), &m(1, 1, &[0.0]), 1.0).unwrap();
        assert_relative_eq!(out[(0, 0)], 0.5, epsilon = 1e-15);
    }

    #[test]
    fn riccati_step_dimension_mismatch() {
        let r = riccati_step(&Matrix::identity(2, 2), &v(&[1.0]), &Matrix::identity(2, 2), &Matrix::identity(2, 2), 1.0);
        assert!(matches!(r, Err(Error::Dimension(_))));
    }

    #[test]
    fn dare_examples() {
        let q = m(2, 2, &[1.0, 0.2, 0.2, 0.5]);
        let a = v(&[1.0, 0.0]);
        let p = solve_dare(&Matrix::zeros(2, 2), &q, 1.0, &a, 1e-10, 10).unwrap();
        assert_relative_eq!(p, q);

        // positive root of p² − 0.81p − 1 = 0
        let root = (0.81 + (0.81f64 * 0.81 + 4.0).sqrt()) / 2.0;
        let p = solve_dare(&m(1, 1, &[0.9]), &m(1, 1, &[1.0]), 1.0, &v(&[1.0]), 1e-12, 1_000_000).unwrap();
        assert!((p[(0, 0)] - root).abs() < 1e-10);
        assert!((root - 1.4839).abs() < 1e-6);

        let p = solve_dare(&m(1, 1, &[0.7]), &m(1, 1, &[0.0]), 1.0, &v(&[1.0]), 1e-12, 100).unwrap();
        assert_eq!(p[(0, 0)], 0.0);
    }

    #[test]
    fn dare_reports_nonconvergence() {
        let r = solve_dare(&m(1, 1, &[0.9]), &m(1, 1, &[1.0]), 1.0, &v(&[1.0]), 1e-14, 2);
        match r {
            Err(Error::Convergence { iterations, residual }) => {
                assert_eq!(iterations, 2);
                assert!(residual > 0.0);
            }
            other => panic!("expected convergence error, got {other:?}"),
        }
    }

    #[test]
    fn gramian_examples() {
        let e1 = v(&[1.0, 0.0]);
        let three = vec![v(&[1.0, 0.0, 0.0]); 3];
        let g = observability_gramian(&Matrix::identity(3, 3), &three, 0, 2).unwrap();
        let mut expect = Matrix::zeros(3, 3);
        expect[(0, 0)] = 3.0;
        assert_relative_eq!(g, expect);

        let acts = vec![e1.clone(), v(&[0.6, 0.8]), v(&[0.0, 1.0]), e1.clone()];
        let g = observability_gramian(&Matrix::zeros(2, 2), &acts, 1, 3).unwrap();
        assert_relative_eq!(g, Matrix::zeros(2, 2));

        // direct two-term sum: e1e1ᵀ + diag(0.5,0.2) e1 e1ᵀ diag(0.5,0.2)
        let g = observability_gramian(&diag(&[0.5, 0.2]), &[e1.clone(), e1], 0, 1).unwrap();
        assert_relative_eq!(g, diag(&[1.25, 0.0]), epsilon = 1e-15);
    }

    #[test]
    fn gramian_missing_action() {
        let r = observability_gramian(&Matrix::identity(2, 2), &[v(&[1.0, 0.0])], 0, 1);
        assert!(matches!(r, Err(Error::Input(_))));
    }

    #[test]
    fn decompose_diagonal() {
        let dec = observability_decompose(&diag(&[0.5, 0.2]), &v(&[1.0, 0.0])).unwrap();
        assert_eq!(dec.obs_dim, 1);
        assert_relative_eq!(dec.gamma_o[(0, 0)], 0.5, epsilon = 1e-14);
        assert_relative_eq!(dec.gamma_u[(0, 0)], 0.2, epsilon = 1e-14);
        assert!(dec.gamma_u_prime.norm() < 1e-14);
    }

    #[test]
    fn decompose_fully_observable() {
        let gamma = m(2, 2, &[0.5, 0.3, 0.0, 0.2]);
        let dec = observability_decompose(&gamma, &v(&[1.0, 0.0])).unwrap();
        assert_eq!(dec.obs_dim, 2);
        assert_eq!(dec.gamma_u.nrows(), 0);
        assert_eq!(dec.gamma_u_prime.nrows(), 0);
    }

    #[test]
    fn decompose_coupled_unobservable() {
        let gamma = m(2, 2, &[0.5, 0.0, 0.3, 0.2]);
        let dec = observability_decompose(&gamma, &v(&[1.0, 0.0])).unwrap();
        assert_eq!(dec.obs_dim, 1);
        // Gramian rank check: span{e1} is Γᵀ-invariant
        let g = observability_gramian(&gamma, &vec![v(&[1.0, 0.0]); 2], 0, 1).unwrap();
        assert!(min_eigenvalue(&g).abs() < 1e-14);
        assert_relative_eq!(dec.gamma_u_prime[(0, 0)].abs(), 0.3, epsilon = 1e-14);
    }

    #[test]
    fn decompose_rejects_non_unit() {
        let r = observability_decompose(&Matrix::identity(2, 2), &v(&[2.0, 0.0]));
        assert!(matches!(r, Err(Error::Parameter(_))));
    }

    #[test]
    fn quantile_examples() {
        assert_eq!(quadratic_form_quantile(&Matrix::zeros(3, 3), 0.3, 10_000, 1).unwrap(), 0.0);

        // χ²₁ median = (Φ⁻¹(0.75))²
        use statrs::distribution::{ContinuousCDF, Normal};
        let z75 = Normal::new(0.0, 1.0).unwrap().inverse_cdf(0.75);
        let oracle = z75 * z75;
        let nu = quadratic_form_quantile(&Matrix::identity(1, 1), 0.5, 1_000_000, 11).unwrap();
        assert!((nu / oracle - 1.0).abs() < 0.02, "nu {nu} oracle {oracle}");

        let nu2 = quadratic_form_quantile(&(Matrix::identity(1, 1) * 2.0), 0.5, 1_000_000, 11).unwrap();
        assert_relative_eq!(nu2, 2.0 * nu, epsilon = 1e-12);
    }

    #[test]
    fn quantile_rejects_bad_alpha() {
        for alpha in [0.0, 1.0, -0.1, 1.5] {
            let r = quadratic_form_quantile(&Matrix::identity(1, 1), alpha, 10_000, 0);
            assert!(matches!(r, Err(Error::Parameter(_))));
        }
    }

    #[test]
    fn dominance_examples() {
        let i = Matrix::identity(2, 2);
        assert!(psd_dominates(&(&i * 2.0), &i, 0.0).unwrap());
        assert!(!psd_dominates(&i, &(&i * 2.0), 0.0).unwrap());
        assert!(!psd_dominates(&diag(&[2.0, 0.5]), &i, 0.0).unwrap());
        assert!(psd_dominates(&i, &Matrix::identity(3, 3), 0.0).is_err());
    }

    #[test]
    fn psd_factor_rank_deficient() {
        let u = v(&[1.0, 2.0, -1.0]);
        let s = &u * u.transpose();
        let l = psd_factor(&s).unwrap();
        assert_relative_eq!(&l * l.transpose(), s, epsilon = 1e-10);
        assert!(psd_factor(&diag(&[1.0, -1.0])).is_err());
    }

    #[test]
    fn argmax_ties_lowest() {
        assert_eq!(argmax_lowest(&[1.0, 3.0, 3.0]), Some(1));
        assert_eq!(argmax_lowest(&[0.0, 0.0]), Some(0));
        assert_eq!(argmax_lowest(&[f64::NAN, -1.0]), Some(1));
        assert_eq!(argmax_lowest(&[]), None);
        assert_eq!(argmax_lowest(&[f64::INFINITY, f64::INFINITY, 2.0]), Some(0));
    }
}
