//! Summary statistics and the two-sample Welch t-test.

use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample variance (`n - 1` denominator); NaN below two samples.
pub fn sample_variance(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return f64::NAN;
    }
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() - 1) as f64
}

pub fn sample_std(xs: &[f64]) -> f64 {
    sample_variance(xs).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WelchResult {
    pub t: f64,
    pub df: f64,
    /// Two-sided p-value.
    pub p: f64,
}

/// Two-sided Welch t-test with Welch-Satterthwaite degrees of freedom.
/// `t` is positive when `a` has the larger mean.
pub fn welch_t_test(a: &[f64], b: &[f64]) -> Result<WelchResult> {
    if a.len() < 2 || b.len() < 2 {
        return Err(Error::Degenerate(format!(
            "welch test needs at least 2 samples per group, got {} and {}",
            a.len(),
            b.len()
        )));
    }
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (va, vb) = (sample_variance(a) / na, sample_variance(b) / nb);
    let se2 = va + vb;
    if !(se2 > 0.0) || !se2.is_finite() {
        return Err(Error::Degenerate("both samples have zero variance".into()));
    }
    let diff = mean(a) - mean(b);
    let t = diff / se2.sqrt();
    let df = se2 * se2 / (va * va / (na - 1.0) + vb * vb / (nb - 1.0));
    let dist = StudentsT::new(0.0, 1.0, df).map_err(|e| Error::Degenerate(e.to_string()))?;
    let p = if t == 0.0 { 1.0 } else { (2.0 * dist.sf(t.abs())).min(1.0) };
    Ok(WelchResult { t, df, p })
}

/// Pointwise `mean +- 1.96 * std / sqrt(n)` across curves of equal length
/// (sample std, `n - 1` denominator). Returns `(mean, lower, upper)` per point.
pub fn confidence_band(curves: &[Vec<f64>]) -> Vec<(f64, f64, f64)> {
    let len = curves.iter().map(Vec::len).min().unwrap_or(0);
    (0..len)
        .map(|i| {
            let column: Vec<f64> = curves.iter().map(|c| c[i]).filter(|v| v.is_finite()).collect();
            let m = mean(&column);
            let half = if column.len() >= 2 {
                1.96 * sample_std(&column) / (column.len() as f64).sqrt()
            } else {
                0.0
            };
            (m, m - half, m + half)
        })
        .collect()
}
