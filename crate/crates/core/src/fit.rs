//! Least-squares estimators for exponential and polynomial growth rates.
//!
//! A series is a list of points `(n, length)`. Both estimators use the window
//! `[n_max / 2, n_max]`. The entropy fit uses the model
//! `log length = n log K + r log n + C`, so that a polynomial factor does not
//! bias the exponential rate.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FitConfig<F> {
    /// Minimum number of usable points in the window.
    pub min_points: usize,
    /// Largest accepted RMS residual of the log-length fit.
    pub residual_threshold: F,
    /// A series counts as subexponential when `|K - 1|` is at most this.
    pub unit_tolerance: F,
}

impl<F: Real> Default for FitConfig<F> {
    fn default() -> Self {
        FitConfig {
            min_points: 8,
            residual_threshold: F::of(0.5),
            unit_tolerance: F::of(0.05),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EntropyEstimate<F> {
    /// `K = max(exp(rate), 1)`.
    pub value: F,
    /// Fitted `log K` before clamping.
    pub rate: F,
    /// Fitted exponent `r` of the polynomial factor.
    pub poly_exponent: F,
    pub constant: F,
    /// RMS residual of the fit in log space.
    pub residual: F,
    pub window: (u64, u64),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PolyFit<F> {
    pub degree: F,
    /// Pearson correlation of the log-log data; 1 for a constant series.
    pub correlation: F,
    pub window: (u64, u64),
}

/// Ordinary least squares `design * beta ~ y`. Returns `beta` and the RMS
/// residual, or `None` when the system is rank deficient.
pub fn least_squares<F: Real>(design: &[Vec<F>], y: &[F]) -> Option<(Vec<F>, F)> {
    let rows = design.len();
    let cols = design.first()?.len();
    if rows < cols || y.len() != rows {
        return None;
    }
    let a = DMatrix::from_fn(rows, cols, |i, j| design[i][j]);
    let b = DVector::from_column_slice(y);
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let eps = smax * F::default_epsilon() * F::of(rows as f64) * F::of(16.0);
    if svd.rank(eps) < cols {
        return None;
    }
    let beta = svd.solve(&b, eps).ok()?;
    let r = a * &beta - b;
    let rms = (r.norm_squared() / F::of(rows as f64)).sqrt();
    Some((beta.iter().copied().collect(), rms))
}

/// Points of the window `[n_max / 2, n_max]` with positive length, as
/// `(n, log length)`.
fn window<F: Real>(points: &[(u64, F)], cfg: &FitConfig<F>) -> Result<(Vec<(F, F)>, (u64, u64))> {
    let n_max = points.iter().map(|p| p.0).max().unwrap_or(0);
    let lo = (n_max / 2).max(1);
    let inside: Vec<&(u64, F)> = points.iter().filter(|p| p.0 >= lo && p.0 <= n_max).collect();
    if inside.len() < cfg.min_points {
        return Err(Error::InsufficientData(format!(
            "{} points in the window [{lo}, {n_max}], need {}",
            inside.len(),
            cfg.min_points
        )));
    }
    if inside.iter().all(|p| p.1 <= F::zero()) {
        return Err(Error::DegenerateFit("all lengths in the window are zero".into()));
    }
    let usable: Vec<(F, F)> = inside
        .iter()
        .filter(|p| p.1 > F::zero())
        .map(|p| (F::of(p.0 as f64), p.1.ln()))
        .collect();
    if usable.len() < cfg.min_points {
        return Err(Error::InsufficientData(format!(
            "{} nonzero lengths in the window [{lo}, {n_max}], need {}",
            usable.len(),
            cfg.min_points
        )));
    }
    Ok((usable, (lo, n_max)))
}

fn is_constant<F: Real>(ys: impl Iterator<Item = F> + Clone) -> bool {
    let first = ys.clone().next();
    first.is_some_and(|f| ys.into_iter().all(|y| y == f))
}

pub fn fit_entropy<F: Real>(points: &[(u64, F)], cfg: &FitConfig<F>) -> Result<EntropyEstimate<F>> {
    let (data, win) = window(points, cfg)?;
    let (rate, poly_exponent, constant, residual) = if is_constant(data.iter().map(|p| p.1)) {
        (F::zero(), F::zero(), data[0].1, F::zero())
    } else {
        let design: Vec<Vec<F>> = data.iter().map(|&(n, _)| vec![n, n.ln(), F::one()]).collect();
        let y: Vec<F> = data.iter().map(|p| p.1).collect();
        let (beta, rms) = least_squares(&design, &y)
            .ok_or_else(|| Error::DegenerateFit("rank-deficient design".into()))?;
        (beta[0], beta[1], beta[2], rms)
    };
    if residual > cfg.residual_threshold {
        return Err(Error::FitRejected {
            residual: residual.to_f64(),
            threshold: cfg.residual_threshold.to_f64(),
        });
    }
    let value = rate.exp().max(F::one());
    Ok(EntropyEstimate {
        value,
        rate,
        poly_exponent,
        constant,
        residual,
        window: win,
    })
}

/// Slope of `log length` against `log n` over the window. Rejects series
/// whose entropy estimate is not within `unit_tolerance` of 1.
pub fn fit_poly_degree<F: Real>(points: &[(u64, F)], cfg: &FitConfig<F>) -> Result<PolyFit<F>> {
    let k = fit_entropy(points, cfg)?;
    if (k.value - F::one()).abs() > cfg.unit_tolerance {
        return Err(Error::ExponentialSeries(k.value.to_f64()));
    }
    let (data, win) = window(points, cfg)?;
    let logs: Vec<(F, F)> = data.iter().map(|&(n, y)| (n.ln(), y)).collect();
    let (degree, correlation) = log_log_slope(&logs);
    Ok(PolyFit {
        degree: degree.max(F::zero()),
        correlation,
        window: win,
    })
}

/// Slope and Pearson correlation of `(x, y)` data.
pub fn log_log_slope<F: Real>(data: &[(F, F)]) -> (F, F) {
    let len = F::of(data.len() as f64);
    let mx = data.iter().fold(F::zero(), |a, p| a + p.0) / len;
    let my = data.iter().fold(F::zero(), |a, p| a + p.1) / len;
    let (mut sxx, mut sxy, mut syy) = (F::zero(), F::zero(), F::zero());
    for &(x, y) in data {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    if is_constant(data.iter().map(|p| p.1)) {
        return (F::zero(), F::one());
    }
    if sxx == F::zero() {
        return (F::zero(), F::zero());
    }
    (sxy / sxx, sxy / (sxx * syy).sqrt())
}
