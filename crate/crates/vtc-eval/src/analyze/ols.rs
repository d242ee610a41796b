//! Ordinary least squares with mean-response confidence bands.
//!
//! Fits `y = slope·x + intercept` by minimizing squared error and reports the
//! 95% confidence band for the fitted mean at any `x`:
//!
//! ```text
//! ŷ(x) ± t(0.975, n−2) · s · sqrt(1/n + (x − x̄)² / Sxx)
//! ```
//!
//! where `s` is the residual standard deviation with `n − 2` degrees of
//! freedom. The Student-t quantile is computed here from first principles
//! (Lanczos log-gamma, regularized incomplete beta via Lentz's continued
//! fraction, then bisection on the CDF), so the crate needs no statistics
//! dependency.

use crate::error::{Error, Result};

/// A fitted line with everything needed to draw its confidence band.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OlsFit {
    pub slope: f64,
    pub intercept: f64,
    /// Number of points the fit consumed.
    pub n: usize,
    /// Mean of the predictor values.
    pub x_mean: f64,
    /// Centered sum of squares of the predictor, `Σ(x − x̄)²`.
    pub sxx: f64,
    /// Residual standard deviation `sqrt(SSE / (n − 2))`; zero when `n = 2`.
    pub residual_std: f64,
    /// Standard error of the slope.
    pub slope_se: f64,
    /// Standard error of the intercept.
    pub intercept_se: f64,
    /// Two-sided 95% critical value `t(0.975, n−2)`; `None` when `n = 2`,
    /// where the line interpolates exactly and the band is undefined.
    pub t_critical: Option<f64>,
}

impl OlsFit {
    /// Fitted mean response at `x`.
    pub fn predict(&self, x: f64) -> f64 {
        self.slope * x + self.intercept
    }

    /// Half-width of the 95% confidence band for the mean response at `x`,
    /// `None` when the band is undefined (`n = 2`).
    pub fn ci_margin(&self, x: f64) -> Option<f64> {
        let t = self.t_critical?;
        let dx = x - self.x_mean;
        let lever = 1.0 / self.n as f64 + dx * dx / self.sxx;
        Some(t * self.residual_std * lever.sqrt())
    }

    /// The 95% confidence band `(low, high)` for the mean response at `x`.
    pub fn ci_band(&self, x: f64) -> Option<(f64, f64)> {
        let margin = self.ci_margin(x)?;
        let fit = self.predict(x);
        Some((fit - margin, fit + margin))
    }
}

/// Least-squares fit of `(x, y)` points.
///
/// Fewer than two points, or a predictor with no variance, leaves the slope
/// undefined and is rejected.
pub fn ols_fit(points: &[(f64, f64)]) -> Result<OlsFit> {
    let n = points.len();
    if n < 2 {
        return Err(Error::DegenerateRegression(format!(
            "need at least 2 points, got {n}"
        )));
    }
    let nf = n as f64;
    let x_mean = points.iter().map(|&(x, _)| x).sum::<f64>() / nf;
    let y_mean = points.iter().map(|&(_, y)| y).sum::<f64>() / nf;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for &(x, y) in points {
        sxx += (x - x_mean) * (x - x_mean);
        sxy += (x - x_mean) * (y - y_mean);
    }
    if sxx == 0.0 {
        return Err(Error::DegenerateRegression(
            "all predictor values are identical".to_string(),
        ));
    }
    let slope = sxy / sxx;
    let intercept = y_mean - slope * x_mean;

    let sse: f64 = points
        .iter()
        .map(|&(x, y)| {
            let e = y - (slope * x + intercept);
            e * e
        })
        .sum();
    let (residual_std, t_critical) = if n == 2 {
        (0.0, None)
    } else {
        let s = (sse.max(0.0) / (nf - 2.0)).sqrt();
        (s, Some(student_t_quantile(0.975, (n - 2) as u32)))
    };
    Ok(OlsFit {
        slope,
        intercept,
        n,
        x_mean,
        sxx,
        residual_std,
        slope_se: residual_std / sxx.sqrt(),
        intercept_se: residual_std * (1.0 / nf + x_mean * x_mean / sxx).sqrt(),
        t_critical,
    })
}

/// Quantile of the Student-t distribution with `dof` degrees of freedom.
///
/// Solves `cdf(t) = p` by bisection; the CDF itself comes from the
/// regularized incomplete beta function. Accurate to well under `1e-9` for
/// the degrees of freedom that arise in regression over a study's worth of
/// children.
pub fn student_t_quantile(p: f64, dof: u32) -> f64 {
    assert!(p > 0.0 && p < 1.0, "quantile probability must be in (0, 1)");
    assert!(dof >= 1, "degrees of freedom must be at least 1");
    if p == 0.5 {
        return 0.0;
    }
    if p < 0.5 {
        return -student_t_quantile(1.0 - p, dof);
    }
    let mut hi = 1.0f64;
    while student_t_cdf(hi, dof) < p {
        hi *= 2.0;
        if hi > 1e300 {
            break;
        }
    }
    let mut lo = 0.0f64;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if student_t_cdf(mid, dof) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// CDF of the Student-t distribution at `t ≥ 0`.
fn student_t_cdf(t: f64, dof: u32) -> f64 {
    debug_assert!(t >= 0.0);
    let v = dof as f64;
    let x = v / (v + t * t);
    1.0 - 0.5 * regularized_incomplete_beta(0.5 * v, 0.5, x)
}

/// Regularized incomplete beta function `I_x(a, b)`.
fn regularized_incomplete_beta(a: f64, b: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let ln_front = a * x.ln() + b * (1.0 - x).ln() - ln_beta(a, b);
    // The continued fraction converges fast only below the distribution's
    // bulk; above it, evaluate the mirrored tail instead.
    if x < (a + 1.0) / (a + b + 2.0) {
        ln_front.exp() * beta_continued_fraction(a, b, x) / a
    } else {
        1.0 - ln_front.exp() * beta_continued_fraction(b, a, 1.0 - x) / b
    }
}

/// Lentz's method for the incomplete-beta continued fraction.
fn beta_continued_fraction(a: f64, b: f64, x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    const EPS: f64 = 3e-16;
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=300 {
        let m = m as f64;
        let m2 = 2.0 * m;
        // Even step.
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        // Odd step.
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

fn ln_beta(a: f64, b: f64) -> f64 {
    ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
}

/// Natural log of the gamma function for positive arguments, via the Lanczos
/// approximation (g = 7, 9 terms), accurate to about 1e-14 relative error.
pub(crate) fn ln_gamma(z: f64) -> f64 {
    debug_assert!(z > 0.0);
    const COEFFICIENTS: [f64; 8] = [
        676.5203681218851,
        -1259.1392167224028,
        771.32342877765313,
        -176.61502916214059,
        12.507343278686905,
        -0.13857109526572012,
        9.9843695780195716e-6,
        1.5056327351493116e-7,
    ];
    if z < 0.5 {
        // Reflection keeps the series in its accurate range.
        let pi = std::f64::consts::PI;
        return (pi / (pi * z).sin()).ln() - ln_gamma(1.0 - z);
    }
    let z = z - 1.0;
    let mut sum = 0.99999999999980993;
    for (i, c) in COEFFICIENTS.iter().enumerate() {
        sum += c / (z + (i + 1) as f64);
    }
    let t = z + 7.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (z + 0.5) * t.ln() - t + sum.ln()
}
