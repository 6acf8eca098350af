use nalgebra::DMatrix;

use super::curve::CURVE_SAMPLES;
use super::InterfaceSpec;
use crate::error::{Error, Result};

/// Fundamental forms and curvature at one parameter point.
#[derive(Debug, Clone)]
pub struct MetricSample {
    pub xi: Vec<f64>,
    /// `g_{0,ij} = (∂_i x, ∂_j x)`
    pub g0: DMatrix<f64>,
    pub g0_inv: DMatrix<f64>,
    pub sqrt_g0: f64,
    /// `b_ij = (∂_i ∂_j x, ν)`
    pub b: DMatrix<f64>,
    /// `G̃^{ij} = 2 (g₀⁻¹ b g₀⁻¹)^{ij}`
    pub g_tilde: DMatrix<f64>,
    /// Sum of principal curvatures, `tr(g₀⁻¹ b)`.
    pub mean_curvature: f64,
    /// `(∂_i x, ∂_j ν) + (∂_j x, ∂_i ν)`
    pub first_variation: DMatrix<f64>,
    /// `(∂_i ν, ∂_j ν)`
    pub second_variation: DMatrix<f64>,
}

/// Exact collar metric at `(ξ, t)`.
#[derive(Debug, Clone)]
pub struct CollarSample {
    pub g: DMatrix<f64>,
    pub g_inv: DMatrix<f64>,
    pub sqrt_g: f64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Inverse and `sqrt(det)` of a symmetric positive definite matrix.
fn spd_inverse_sqrt_det(m: &DMatrix<f64>) -> Option<(DMatrix<f64>, f64)> {
    let chol = m.clone().cholesky()?;
    let sqrt_det = chol.l().diagonal().iter().product::<f64>();
    Some((chol.inverse(), sqrt_det))
}

pub fn metric_at(spec: &InterfaceSpec, xi: &[f64]) -> Result<MetricSample> {
    let f = spec.frame(xi)?;
    let d = spec.param_dim();
    let g0 = DMatrix::from_fn(d, d, |i, j| dot(&f.tangents[i], &f.tangents[j]));
    let scale = g0.diagonal().iter().cloned().fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let degenerate = || Error::DegenerateParameterization { xi: xi.to_vec(), speed: 0.0 };
    let (g0_inv, sqrt_g0) = spd_inverse_sqrt_det(&g0).ok_or_else(degenerate)?;
    // Hyperspherical coordinates degenerate only on the poles, which no
    // interior quadrature point reaches; curves must be regular everywhere.
    let curve = matches!(spec, InterfaceSpec::PlaneCurve(_));
    if !(sqrt_g0 > 0.0) || curve && sqrt_g0 < 1e-10 * scale.powf(0.5 * d as f64) {
        return Err(Error::DegenerateParameterization { xi: xi.to_vec(), speed: sqrt_g0 });
    }
    let b = DMatrix::from_fn(d, d, |i, j| dot(&f.second[i][j], &f.normal));
    let b = (&b + b.transpose()) * 0.5;
    let g_tilde = &g0_inv * &b * &g0_inv * 2.0;
    let mean_curvature = (&g0_inv * &b).trace();
    let first_variation = DMatrix::from_fn(d, d, |i, j| {
        dot(&f.tangents[i], &f.normal_derivs[j]) + dot(&f.tangents[j], &f.normal_derivs[i])
    });
    let second_variation = DMatrix::from_fn(d, d, |i, j| dot(&f.normal_derivs[i], &f.normal_derivs[j]));
    Ok(MetricSample {
        xi: xi.to_vec(),
        g0,
        g0_inv,
        sqrt_g0,
        b,
        g_tilde,
        mean_curvature,
        first_variation,
        second_variation,
    })
}

impl MetricSample {
    /// `g(ξ, t) = g₀ + t g̃₀ + t² ĝ₀`, evaluated without truncation and
    /// without a reach check.
    pub fn collar(&self, t: f64) -> Option<CollarSample> {
        let g = &self.g0 + &self.first_variation * t + &self.second_variation * (t * t);
        let (g_inv, sqrt_g) = spd_inverse_sqrt_det(&g)?;
        Some(CollarSample { g, g_inv, sqrt_g })
    }

    /// `g₀⁻¹ + t G̃`, the first-order inverse metric.
    pub fn inverse_metric_expansion(&self, t: f64) -> DMatrix<f64> {
        &self.g0_inv + &self.g_tilde * t
    }

    /// `√G₀ (1 − tH)`, the first-order Jacobian.
    pub fn jacobian_expansion(&self, t: f64) -> f64 {
        self.sqrt_g0 * (1.0 - t * self.mean_curvature)
    }
}

/// Largest `|t|` admitted for the collar map.
pub fn reach(spec: &InterfaceSpec) -> f64 {
    match spec {
        InterfaceSpec::Sphere { radius, .. } => *radius,
        InterfaceSpec::PlaneCurve(c) => {
            let kmax = (0..CURVE_SAMPLES)
                .map(|i| c.curvature(2.0 * std::f64::consts::PI * i as f64 / CURVE_SAMPLES as f64).abs())
                .fold(0.0, f64::max);
            0.9 / kmax
        }
    }
}

/// The collar metric of one interface, with its reach cached.
#[derive(Debug, Clone)]
pub struct CollarMetric {
    spec: InterfaceSpec,
    reach: f64,
}

impl CollarMetric {
    pub fn new(spec: &InterfaceSpec) -> Result<Self> {
        spec.validate()?;
        Ok(Self { spec: spec.clone(), reach: reach(spec) })
    }

    pub fn reach(&self) -> f64 {
        self.reach
    }

    pub fn spec(&self) -> &InterfaceSpec {
        &self.spec
    }

    pub fn eval(&self, xi: &[f64], t: f64) -> Result<CollarSample> {
        if t.abs() >= self.reach {
            return Err(Error::OutsideCollar { t: t.abs(), reach: self.reach });
        }
        let m = metric_at(&self.spec, xi)?;
        m.collar(t).ok_or_else(|| Error::OutsideCollar { t: t.abs(), reach: self.reach })
    }
}

/// `(g⁻¹(ξ, t), √G(ξ, t))` for the tangential block of the collar metric.
pub fn collar_metric_eval(spec: &InterfaceSpec, xi: &[f64], t: f64) -> Result<(DMatrix<f64>, f64)> {
    let r = reach(spec);
    if t.abs() >= r {
        return Err(Error::OutsideCollar { t: t.abs(), reach: r });
    }
    let m = metric_at(spec, xi)?;
    let c = m.collar(t).ok_or(Error::OutsideCollar { t: t.abs(), reach: r })?;
    Ok((c.g_inv, c.sqrt_g))
}
