//! Least-squares fits of `λ(ε)` and empirical orders.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `λ(ε) ≈ a + bε (+ cε²)` with standard errors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolyFit {
    pub degree: usize,
    /// `[a, b]` or `[a, b, c]`
    pub coeffs: Vec<f64>,
    pub std_errors: Vec<f64>,
    /// `λ_i − fit(ε_i)`
    pub residuals: Vec<f64>,
}

impl PolyFit {
    pub fn intercept(&self) -> f64 {
        self.coeffs[0]
    }

    pub fn slope(&self) -> f64 {
        self.coeffs[1]
    }

    pub fn eval(&self, eps: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * eps + c)
    }
}

/// Ordinary least squares on the monomials `1, ε, …, ε^degree`.
pub fn poly_fit(points: &[(f64, f64)], degree: usize) -> Result<PolyFit> {
    let m = points.len();
    let p = degree + 1;
    if m < p {
        return Err(Error::RankDeficient(format!("{m} points cannot determine {p} coefficients")));
    }
    let scale = points.iter().map(|(e, _)| e.abs()).fold(0.0, f64::max);
    if !(scale > 0.0) {
        return Err(Error::RankDeficient("all abscissae are zero".into()));
    }
    // columns in the scaled variable ε/scale keep the design well conditioned
    let x = DMatrix::from_fn(m, p, |i, j| (points[i].0 / scale).powi(j as i32));
    let y = DVector::from_iterator(m, points.iter().map(|(_, v)| *v));
    let qr = x.clone().qr();
    let r = qr.r();
    let rmax = (0..p).map(|i| r[(i, i)].abs()).fold(0.0, f64::max);
    if (0..p).any(|i| r[(i, i)].abs() <= 1e-12 * rmax) {
        return Err(Error::RankDeficient(format!("design matrix for degree {degree} is singular (repeated abscissae?)")));
    }
    let qty = qr.q().transpose() * &y;
    let beta = r.solve_upper_triangular(&qty).expect("nonsingular triangle");
    let fitted = &x * &beta;
    let residuals: Vec<f64> = (0..m).map(|i| y[i] - fitted[i]).collect();
    let dof = m - p;
    let rinv = r.try_inverse().expect("nonsingular triangle");
    let cov_unit = &rinv * rinv.transpose();
    let s2 = if dof > 0 { residuals.iter().map(|v| v * v).sum::<f64>() / dof as f64 } else { 0.0 };
    let coeffs = (0..p).map(|j| beta[j] / scale.powi(j as i32)).collect();
    let std_errors = (0..p).map(|j| (s2 * cov_unit[(j, j)]).sqrt() / scale.powi(j as i32)).collect();
    Ok(PolyFit { degree, coeffs, std_errors, residuals })
}

/// Empirical order of a quantity that should behave like `C ε^q`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderEstimate {
    /// Least-squares slope of `log|r|` against `log ε` over the points above
    /// the noise floor; `None` if fewer than two remain.
    pub order: Option<f64>,
    /// Slopes between successive retained points.
    pub pairwise: Vec<f64>,
    /// Number of points discarded as below the noise floor.
    pub below_floor: usize,
}

pub fn log_log_order(points: &[(f64, f64)], floor: f64) -> OrderEstimate {
    let kept: Vec<(f64, f64)> = points
        .iter()
        .filter(|(e, r)| *e > 0.0 && r.abs() > floor && r.is_finite())
        .map(|(e, r)| (e.ln(), r.abs().ln()))
        .collect();
    let below_floor = points.len() - kept.len();
    let pairwise = kept.windows(2).map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0)).collect();
    let order = if kept.len() >= 2 {
        let n = kept.len() as f64;
        let mx = kept.iter().map(|p| p.0).sum::<f64>() / n;
        let my = kept.iter().map(|p| p.1).sum::<f64>() / n;
        let sxy: f64 = kept.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = kept.iter().map(|p| (p.0 - mx).powi(2)).sum();
        (sxx > 0.0).then(|| sxy / sxx)
    } else {
        None
    };
    OrderEstimate { order, pairwise, below_floor }
}

/// Result of [`fit_orders`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderFit {
    pub a: f64,
    pub b: f64,
    pub fit: PolyFit,
    /// `λ_i − a − bε_i` (slope removed) or `λ_i − a`.
    pub remainder: Vec<f64>,
    pub order_estimate: OrderEstimate,
}

/// Default noise floor for residuals of values of size `scale`.
pub fn noise_floor(scale: f64) -> f64 {
    1e-11 * scale.abs().max(1.0)
}

/// Fits `a + bε (+ cε²)` and estimates the order of the remainder after
/// removing `a + bε` (if `remove_slope`) or only `a`.
pub fn fit_orders(values: &[(f64, f64)], degree: usize, remove_slope: bool) -> Result<OrderFit> {
    if values.len() < 4 {
        return Err(Error::InvalidArgument(format!("order estimation needs at least 4 points, got {}", values.len())));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|x, y| x.0.total_cmp(&y.0));
    if sorted.windows(2).any(|w| w[0].0 == w[1].0) {
        return Err(Error::RankDeficient("repeated epsilon values".into()));
    }
    let fit = poly_fit(values, degree)?;
    let (a, b) = (fit.intercept(), fit.slope());
    let remainder: Vec<f64> =
        values.iter().map(|(e, l)| l - a - if remove_slope { b * e } else { 0.0 }).collect();
    let pts: Vec<(f64, f64)> = values.iter().zip(&remainder).map(|((e, _), r)| (*e, *r)).collect();
    let mut pts_sorted = pts.clone();
    pts_sorted.sort_by(|x, y| y.0.total_cmp(&x.0));
    let order_estimate = log_log_order(&pts_sorted, noise_floor(a));
    Ok(OrderFit { a, b, fit, remainder, order_estimate })
}
