//! Interfaces, their fundamental forms, and the collar metric of the
//! normal-coordinate neighbourhood `x = p(ξ) + t ν(ξ)`.
//!
//! Sign convention: `ν` is the outward normal of the enclosed domain and
//! `b_ij = (∂_i ∂_j x, ν)`, so a sphere of radius `r` in `ℝⁿ` has
//! `H = −(n−1)/r`.

mod curve;
mod metric;

pub use curve::PlaneCurve;
pub use metric::{collar_metric_eval, metric_at, reach, CollarMetric, CollarSample, MetricSample};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A closed interface Γ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InterfaceSpec {
    /// `S^{n−1}(r) ⊂ ℝⁿ` in hyperspherical coordinates
    /// `(ξ_1, …, ξ_{n−2}) ∈ (0, π)`, `ξ_{n−1} ∈ [0, 2π)`.
    Sphere { dim_n: usize, radius: f64 },
    /// A smooth closed plane curve given by truncated Fourier series.
    PlaneCurve(PlaneCurve),
}

impl InterfaceSpec {
    pub fn sphere(dim_n: usize, radius: f64) -> Result<Self> {
        let s = InterfaceSpec::Sphere { dim_n, radius };
        s.validate()?;
        Ok(s)
    }

    pub fn circle(radius: f64) -> Result<Self> {
        Self::sphere(2, radius)
    }

    /// Ambient dimension `n`.
    pub fn ambient_dim(&self) -> usize {
        match self {
            InterfaceSpec::Sphere { dim_n, .. } => *dim_n,
            InterfaceSpec::PlaneCurve(_) => 2,
        }
    }

    /// Number of surface parameters, `n − 1`.
    pub fn param_dim(&self) -> usize {
        self.ambient_dim() - 1
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            InterfaceSpec::Sphere { dim_n, radius } => {
                if *dim_n < 2 {
                    return Err(Error::InvalidInterface(format!("sphere needs n >= 2, got {dim_n}")));
                }
                if !(*radius > 0.0) || !radius.is_finite() {
                    return Err(Error::InvalidInterface(format!("sphere radius must be positive, got {radius}")));
                }
                Ok(())
            }
            InterfaceSpec::PlaneCurve(c) => c.validate(),
        }
    }

    pub(crate) fn frame(&self, xi: &[f64]) -> Result<Frame> {
        if xi.len() != self.param_dim() {
            return Err(Error::InvalidArgument(format!(
                "parameter has {} components, interface needs {}",
                xi.len(),
                self.param_dim()
            )));
        }
        match self {
            InterfaceSpec::Sphere { dim_n, radius } => Ok(sphere_frame(*dim_n, *radius, xi)),
            InterfaceSpec::PlaneCurve(c) => c.frame(xi[0]),
        }
    }
}

/// Embedding derivatives at one parameter point.
#[derive(Debug, Clone)]
pub(crate) struct Frame {
    /// `∂_i x`
    pub tangents: Vec<Vec<f64>>,
    /// `∂_i ∂_j x`, indexed `[i][j]`
    pub second: Vec<Vec<Vec<f64>>>,
    pub normal: Vec<f64>,
    /// `∂_i ν`
    pub normal_derivs: Vec<Vec<f64>>,
}

#[derive(Clone, Copy)]
enum Factor {
    Sin,
    Cos,
    One,
}

impl Factor {
    fn eval(self, order: usize, x: f64) -> f64 {
        let (s, c) = x.sin_cos();
        match (self, order) {
            (Factor::Sin, 0) => s,
            (Factor::Sin, 1) => c,
            (Factor::Sin, 2) => -s,
            (Factor::Cos, 0) => c,
            (Factor::Cos, 1) => -s,
            (Factor::Cos, 2) => -c,
            (Factor::One, 0) => 1.0,
            (Factor::One, _) => 0.0,
            _ => unreachable!(),
        }
    }
}

/// Factor pattern of ambient component `k` in hyperspherical coordinates.
fn sphere_factors(n: usize, k: usize) -> Vec<Factor> {
    let d = n - 1;
    (0..d)
        .map(|j| {
            if j < k {
                Factor::Sin
            } else if j == k && k < d {
                Factor::Cos
            } else {
                Factor::One
            }
        })
        .collect()
}

/// Point on `S^{n−1}(r)` for the given hyperspherical coordinates.
pub fn sphere_point(n: usize, r: f64, xi: &[f64]) -> Vec<f64> {
    (0..n)
        .map(|k| r * sphere_factors(n, k).iter().zip(xi).map(|(f, x)| f.eval(0, *x)).product::<f64>())
        .collect()
}

fn sphere_frame(n: usize, r: f64, xi: &[f64]) -> Frame {
    let d = n - 1;
    let pats: Vec<Vec<Factor>> = (0..n).map(|k| sphere_factors(n, k)).collect();
    let comp = |k: usize, orders: &[usize]| -> f64 {
        r * pats[k].iter().zip(xi).zip(orders).map(|((f, x), o)| f.eval(*o, *x)).product::<f64>()
    };
    let zero = vec![0usize; d];
    let position: Vec<f64> = (0..n).map(|k| comp(k, &zero)).collect();
    let tangents: Vec<Vec<f64>> = (0..d)
        .map(|i| {
            let mut o = zero.clone();
            o[i] = 1;
            (0..n).map(|k| comp(k, &o)).collect()
        })
        .collect();
    let second: Vec<Vec<Vec<f64>>> = (0..d)
        .map(|i| {
            (0..d)
                .map(|j| {
                    let mut o = zero.clone();
                    o[i] += 1;
                    o[j] += 1;
                    (0..n).map(|k| comp(k, &o)).collect()
                })
                .collect()
        })
        .collect();
    let normal = position.iter().map(|p| p / r).collect();
    let normal_derivs = tangents.iter().map(|t| t.iter().map(|v| v / r).collect()).collect();
    Frame { tangents, second, normal, normal_derivs }
}
