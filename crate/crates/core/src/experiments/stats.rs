//! Summary statistics for the experiment reports.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};

/// Quantile of already-sorted data by linear interpolation between order
/// statistics: position `h = (n − 1) q`, value `x⌊h⌋ + (h − ⌊h⌋)(x⌊h⌋₊₁ − x⌊h⌋)`.
///
/// Panics on empty input.
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty(), "quantile of empty sample");
    let h = (sorted.len() - 1) as f64 * q.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// `100 (r_baseline − r_kode) / r_baseline`; `None` unless `r_baseline > 0`.
pub fn percent_regret_decrease(r_baseline: f64, r_kode: f64) -> Option<f64> {
    (r_baseline > 0.0).then(|| 100.0 * (r_baseline - r_kode) / r_baseline)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoxplotStats {
    pub count: usize,
    pub median: f64,
    pub q1: f64,
    pub q3: f64,
    /// Most extreme samples within `1.5 · IQR` of the box.
    pub whisker_low: f64,
    pub whisker_high: f64,
    pub outliers: usize,
}

/// Quartiles use [`quantile_sorted`].
pub fn boxplot_stats(samples: &[f64]) -> Result<BoxplotStats> {
    if samples.is_empty() {
        return Err(Error::Input("boxplot of an empty sample".into()));
    }
    if samples.iter().any(|x| !x.is_finite()) {
        return Err(Error::Input("boxplot sample contains non-finite values".into()));
    }
    let mut s = samples.to_vec();
    s.sort_by(f64::total_cmp);
    let q1 = quantile_sorted(&s, 0.25);
    let median = quantile_sorted(&s, 0.5);
    let q3 = quantile_sorted(&s, 0.75);
    let iqr = q3 - q1;
    let (lo_fence, hi_fence) = (q1 - 1.5 * iqr, q3 + 1.5 * iqr);
    let inside: Vec<f64> = s.iter().copied().filter(|&x| x >= lo_fence && x <= hi_fence).collect();
    Ok(BoxplotStats {
        count: s.len(),
        median,
        q1,
        q3,
        whisker_low: inside.first().copied().unwrap_or(median),
        whisker_high: inside.last().copied().unwrap_or(median),
        outliers: s.len() - inside.len(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Correlation {
    pub r: f64,
    pub p_value: f64,
    pub m: usize,
}

fn pearson_coefficient(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::Input(format!("length mismatch: {} vs {}", x.len(), y.len())));
    }
    if x.len() < 3 {
        return Err(Error::Input(format!("need at least 3 pairs, got {}", x.len())));
    }
    let m = x.len() as f64;
    let mx = x.iter().sum::<f64>() / m;
    let my = y.iter().sum::<f64>() / m;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if !(sxx > 0.0) || !(syy > 0.0) {
        return Err(Error::UndefinedCorrelation("zero variance".into()));
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Product-moment `r` with a two-sided p-value from
/// `t = r √((m − 2) / (1 − r²))` on `m − 2` degrees of freedom.
pub fn pearson_r(x: &[f64], y: &[f64]) -> Result<Correlation> {
    let r = pearson_coefficient(x, y)?;
    let m = x.len();
    let df = (m - 2) as f64;
    let p_value = if r.abs() >= 1.0 {
        0.0
    } else if df == 0.0 {
        1.0
    } else {
        let t = r * (df / (1.0 - r * r)).sqrt();
        let dist = StudentsT::new(0.0, 1.0, df).map_err(|e| Error::Numeric(e.to_string()))?;
        (2.0 * dist.cdf(-t.abs())).min(1.0)
    };
    Ok(Correlation { r, p_value, m })
}

/// Like [`pearson_r`] but with a two-sided permutation p-value,
/// `(1 + #{|r_perm| ≥ |r|}) / (1 + permutations)`.
pub fn pearson_r_permutation(x: &[f64], y: &[f64], permutations: usize, seed: u64) -> Result<Correlation> {
    let r = pearson_coefficient(x, y)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut shuffled = y.to_vec();
    let mut hits = 0usize;
    for _ in 0..permutations {
        shuffled.shuffle(&mut rng);
        if pearson_coefficient(x, &shuffled)?.abs() >= r.abs() - 1e-12 {
            hits += 1;
        }
    }
    Ok(Correlation {
        r,
        p_value: (1 + hits) as f64 / (1 + permutations) as f64,
        m: x.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn quantile_interpolates() {
        let s = [1.0, 2.0, 4.0, 8.0];
        assert_eq!(quantile_sorted(&s, 0.0), 1.0);
        assert_eq!(quantile_sorted(&s, 1.0), 8.0);
        // h = 1.5
        assert_eq!(quantile_sorted(&s, 0.5), 3.0);
        assert_eq!(quantile_sorted(&[7.0], 0.3), 7.0);
    }

    #[test]
    fn percent_decrease_examples() {
        assert_eq!(percent_regret_decrease(100.0, 50.0), Some(50.0));
        assert_eq!(percent_regret_decrease(80.0, 80.0), Some(0.0));
        assert_eq!(percent_regret_decrease(50.0, 100.0), Some(-100.0));
        assert_eq!(percent_regret_decrease(0.0, 1.0), None);
    }

    #[test]
    fn boxplot_examples() {
        let b = boxplot_stats(&[5.0, 1.0, 4.0, 2.0, 3.0]).unwrap();
        assert_eq!((b.median, b.q1, b.q3), (3.0, 2.0, 4.0));
        assert_eq!((b.whisker_low, b.whisker_high, b.outliers), (1.0, 5.0, 0));

        let b = boxplot_stats(&[2.5; 6]).unwrap();
        assert_eq!((b.median, b.q1, b.q3), (2.5, 2.5, 2.5));

        let b = boxplot_stats(&[-4.0]).unwrap();
        assert_eq!((b.median, b.q1, b.q3, b.whisker_low, b.whisker_high), (-4.0, -4.0, -4.0, -4.0, -4.0));

        let b = boxplot_stats(&[1.0, 2.0, 3.0, 4.0, 100.0]).unwrap();
        assert_eq!((b.whisker_high, b.outliers), (4.0, 1));

        assert!(boxplot_stats(&[]).is_err());
    }

    #[test]
    fn pearson_examples() {
        let x = [1.0, 2.0, 3.0, 4.0, 5.0];
        let y: Vec<f64> = x.iter().map(|v| 2.0 * v + 1.0).collect();
        assert_relative_eq!(pearson_r(&x, &y).unwrap().r, 1.0, epsilon = 1e-15);
        let y: Vec<f64> = x.iter().map(|v| -v).collect();
        assert_relative_eq!(pearson_r(&x, &y).unwrap().r, -1.0, epsilon = 1e-15);
        let c = pearson_r(&[1.0, 2.0, 3.0], &[1.0, 3.0, 2.0]).unwrap();
        assert_relative_eq!(c.r, 0.5, epsilon = 1e-15);
        // t = 0.5·√(1/0.75) on one degree of freedom: p = 1 − (2/π) atan(t)
        let t = 0.5 / 0.75f64.sqrt();
        assert_relative_eq!(c.p_value, 1.0 - 2.0 / std::f64::consts::PI * t.atan(), epsilon = 1e-12);
        assert!(matches!(pearson_r(&x, &[1.0; 5]), Err(Error::UndefinedCorrelation(_))));
        assert!(pearson_r(&x[..2], &x[..2]).is_err());
    }

    #[test]
    fn permutation_agrees_with_t_test() {
        let x: Vec<f64> = (0..40).map(|i| i as f64).collect();
        let y: Vec<f64> = x.iter().map(|v| (v * 1.7).sin() * 10.0 + 0.3 * v).collect();
        let t = pearson_r(&x, &y).unwrap();
        let p = pearson_r_permutation(&x, &y, 4000, 1).unwrap();
        assert_eq!(t.r, p.r);
        assert!((t.p_value - p.p_value).abs() < 0.03, "{} vs {}", t.p_value, p.p_value);
    }
}
