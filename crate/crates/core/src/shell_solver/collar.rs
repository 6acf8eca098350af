//! Tensor-product quadratic elements in collar coordinates `(θ, τ)` for a
//! shell around a closed plane curve.
//!
//! The bilinear forms are the rescaled Rayleigh quotient
//! `∫∫ σ (g⁻¹ ∂_θu ∂_θv + ε⁻² ∂_τu ∂_τv) √G dθ dτ` and `∫∫ uv √G dθ dτ`
//! with the exact collar metric at `t = ετ`. The `τ` mesh has a vertex at
//! `τ = 0`, so `σ` is constant on every element.

use std::sync::Arc;

use super::{clamp_floor, ShellEigenResult, ShellMode, SolverMetadata, SolverPath, TwoPhaseCoeff};
use crate::error::{Error, Result};
use crate::geometry::{metric_at, reach, InterfaceSpec};
use crate::interface_spectrum::CurveMesh1D;
use crate::linalg::{smallest_eigenpairs, BandedSym, EigenOptions};
use crate::p2::{shape, shape_deriv};
use crate::quadrature::element_rule;

/// Default ceiling on the number of unknowns of one collar solve.
pub const DEFAULT_UNKNOWN_CAP: usize = 20_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollarOptions {
    /// Elements along the curve.
    pub m_xi: usize,
    /// Elements across the shell; even, so that `τ = 0` is a vertex.
    pub m_tau: usize,
    pub unknown_cap: usize,
}

impl Default for CollarOptions {
    fn default() -> Self {
        Self { m_xi: 256, m_tau: 8, unknown_cap: DEFAULT_UNKNOWN_CAP }
    }
}

impl CollarOptions {
    pub fn unknowns(&self) -> usize {
        2 * self.m_xi * (2 * self.m_tau + 1)
    }
}

/// A discrete eigenfunction `Φ̃(θ, τ)` of the collar problem.
#[derive(Debug, Clone)]
pub struct CollarFunction {
    mesh: Arc<CurveMesh1D>,
    m_tau: usize,
    /// Dof `(q, j)` (curve dof `q`, transverse dof `j`) at `q·T + j`.
    coeffs: Vec<f64>,
}

impl CollarFunction {
    pub fn mesh(&self) -> &Arc<CurveMesh1D> {
        &self.mesh
    }

    pub fn m_tau(&self) -> usize {
        self.m_tau
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    fn t_dofs(&self) -> usize {
        2 * self.m_tau + 1
    }

    pub(crate) fn locate_tau(&self, tau: f64) -> (usize, f64) {
        let h = 2.0 / self.m_tau as f64;
        let f = (((tau + 1.0) / h).floor() as isize).clamp(0, self.m_tau as isize - 1) as usize;
        (f, ((tau + 1.0 - f as f64 * h) / h).clamp(0.0, 1.0))
    }

    pub(crate) fn value_in(&self, e: usize, s: f64, f: usize, st: f64) -> f64 {
        let qs = self.mesh.element_dofs(e);
        let nt = shape(st);
        let t = self.t_dofs();
        let mut v = 0.0;
        for (nq, q) in shape(s).iter().zip(qs) {
            for (b, nb) in nt.iter().enumerate() {
                v += nq * nb * self.coeffs[q * t + 2 * f + b];
            }
        }
        v
    }

    pub fn value(&self, theta: f64, tau: f64) -> f64 {
        let (e, s) = self.mesh.locate(theta);
        let (f, st) = self.locate_tau(tau);
        self.value_in(e, s, f, st)
    }
}

/// Metric data at one quadrature point along the curve.
#[derive(Clone, Copy)]
pub(crate) struct CurvePoint {
    pub s: f64,
    pub theta: f64,
    /// Gauss weight times element length.
    pub weight: f64,
    pub g0: f64,
    pub g1: f64,
    pub g2: f64,
}

impl CurvePoint {
    pub fn sqrt_g0(&self) -> f64 {
        self.g0.sqrt()
    }

    /// `(g⁻¹, √G)` at signed distance `t`.
    pub fn collar(&self, t: f64) -> (f64, f64) {
        let g = self.g0 + t * (self.g1 + t * self.g2);
        (1.0 / g, g.sqrt())
    }
}

pub(crate) fn curve_points(spec: &InterfaceSpec, mesh: &CurveMesh1D) -> Result<Vec<[CurvePoint; 4]>> {
    (0..mesh.elements())
        .map(|e| {
            let (a, h) = mesh.element(e);
            let mut pts = [CurvePoint { s: 0.0, theta: 0.0, weight: 0.0, g0: 0.0, g1: 0.0, g2: 0.0 }; 4];
            for (p, &(s, w)) in pts.iter_mut().zip(element_rule()) {
                let theta = a + h * s;
                let m = metric_at(spec, &[theta])?;
                *p = CurvePoint {
                    s,
                    theta,
                    weight: w * h,
                    g0: m.g0[(0, 0)],
                    g1: m.first_variation[(0, 0)],
                    g2: m.second_variation[(0, 0)],
                };
            }
            Ok(pts)
        })
        .collect()
}

/// The `count` smallest eigenpairs of the shell around a closed plane curve
/// (or a circle given as a two-dimensional sphere).
pub fn solve_curve_shell(
    spec: &InterfaceSpec,
    coeff: TwoPhaseCoeff,
    epsilon: f64,
    count: usize,
    opts: &CollarOptions,
) -> Result<ShellEigenResult> {
    spec.validate()?;
    coeff.validate()?;
    if spec.ambient_dim() != 2 {
        return Err(Error::InvalidArgument("the collar solver handles interfaces in the plane only".into()));
    }
    if opts.m_tau < 2 || opts.m_tau % 2 != 0 {
        return Err(Error::InvalidArgument(format!("m_tau must be even and >= 2, got {}", opts.m_tau)));
    }
    if !(epsilon > 0.0) {
        return Err(Error::InvalidArgument(format!("epsilon must be positive, got {epsilon}")));
    }
    let rch = reach(spec);
    if epsilon >= rch {
        return Err(Error::OutsideCollar { t: epsilon, reach: rch });
    }
    let unknowns = opts.unknowns();
    if unknowns > opts.unknown_cap {
        return Err(Error::TooManyUnknowns { unknowns, cap: opts.unknown_cap });
    }
    let mesh = Arc::new(CurveMesh1D::uniform(opts.m_xi)?);
    if count == 0 || 4 * count > unknowns {
        return Err(Error::InvalidArgument(format!("cannot compute {count} eigenpairs from {unknowns} unknowns")));
    }
    let pts = curve_points(spec, &mesh)?;
    let t = 2 * opts.m_tau + 1;
    let w = 4 * t + 2;
    let mut a = BandedSym::zeros(unknowns, w);
    let mut b = BandedSym::zeros(unknowns, w);
    let ht = 2.0 / opts.m_tau as f64;
    let inv_eps2 = 1.0 / (epsilon * epsilon);
    let rule = element_rule();
    for (e, epts) in pts.iter().enumerate() {
        let (_, h) = mesh.element(e);
        let qs = mesh.element_dofs(e).map(|q| mesh.fold(q));
        for f in 0..opts.m_tau {
            let sigma = coeff.at(f >= opts.m_tau / 2);
            let tau0 = -1.0 + f as f64 * ht;
            let idx: [usize; 9] = std::array::from_fn(|i| qs[i / 3] * t + 2 * f + i % 3);
            let mut ka = [[0.0; 9]; 9];
            let mut kb = [[0.0; 9]; 9];
            for p in epts {
                let nq = shape(p.s);
                let dq = shape_deriv(p.s).map(|d| d / h);
                for &(st, wt) in rule {
                    let tau = tau0 + ht * st;
                    let (ginv, sg) = p.collar(epsilon * tau);
                    let wgt = p.weight * wt * ht * sg;
                    let nt = shape(st);
                    let dt = shape_deriv(st).map(|d| d / ht);
                    let val: [f64; 9] = std::array::from_fn(|i| nq[i / 3] * nt[i % 3]);
                    let dth: [f64; 9] = std::array::from_fn(|i| dq[i / 3] * nt[i % 3]);
                    let dta: [f64; 9] = std::array::from_fn(|i| nq[i / 3] * dt[i % 3]);
                    for i in 0..9 {
                        for j in 0..=i {
                            ka[i][j] += sigma * (ginv * dth[i] * dth[j] + inv_eps2 * dta[i] * dta[j]) * wgt;
                            kb[i][j] += val[i] * val[j] * wgt;
                        }
                    }
                }
            }
            for i in 0..9 {
                for j in 0..=i {
                    a.add(idx[i], idx[j], ka[i][j]);
                    b.add(idx[i], idx[j], kb[i][j]);
                }
            }
        }
    }
    let eopts = EigenOptions { shift: coeff.mean(), ..Default::default() };
    let pairs = smallest_eigenpairs(&a, &b, count, &eopts)?;
    let n_curve = mesh.dofs();
    let modes = pairs
        .vectors
        .iter()
        .map(|v| {
            let mut coeffs = vec![0.0; unknowns];
            for q in 0..n_curve {
                let src = mesh.fold(q) * t;
                coeffs[q * t..(q + 1) * t].copy_from_slice(&v[src..src + t]);
            }
            let big = coeffs.iter().cloned().fold(0.0f64, |m, x| if x.abs() > m.abs() { x } else { m });
            if big < 0.0 {
                coeffs.iter_mut().for_each(|x| *x = -*x);
            }
            ShellMode::Collar(CollarFunction { mesh: mesh.clone(), m_tau: opts.m_tau, coeffs })
        })
        .collect();
    let mut eigenvalues = pairs.values;
    let clamped = clamp_floor(&mut eigenvalues);
    Ok(ShellEigenResult {
        epsilon,
        interface: spec.clone(),
        coeff,
        eigenvalues,
        modes,
        meta: SolverMetadata {
            path: SolverPath::Collar,
            mesh: format!("collar {}x{}", opts.m_xi, opts.m_tau),
            unknowns,
            residuals: pairs.residuals,
            clamped,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::PlaneCurve;

    fn ellipse() -> InterfaceSpec {
        InterfaceSpec::PlaneCurve(PlaneCurve::ellipse(2.0, 1.0).unwrap())
    }

    #[test]
    fn guards() {
        let c = TwoPhaseCoeff::new(1.0, 2.0).unwrap();
        let o = CollarOptions::default();
        assert!(matches!(solve_curve_shell(&ellipse(), c, 0.5, 3, &o), Err(Error::OutsideCollar { .. })));
        let odd = CollarOptions { m_tau: 3, ..o };
        assert!(solve_curve_shell(&ellipse(), c, 0.01, 3, &odd).is_err());
        let big = CollarOptions { m_xi: 2048, m_tau: 8, unknown_cap: 6000 };
        assert!(matches!(solve_curve_shell(&ellipse(), c, 0.01, 3, &big), Err(Error::TooManyUnknowns { .. })));
        let s3 = InterfaceSpec::sphere(3, 1.0).unwrap();
        assert!(solve_curve_shell(&s3, c, 0.01, 3, &o).is_err());
    }

    #[test]
    fn constants_are_eigenfunctions() {
        let c = TwoPhaseCoeff::new(1.0, 2.0).unwrap();
        let o = CollarOptions { m_xi: 32, m_tau: 4, ..Default::default() };
        let r = solve_curve_shell(&ellipse(), c, 0.05, 3, &o).unwrap();
        assert!(r.eigenvalues[0].abs() < 1e-9);
        let v0 = r.modes[0].value(&[0.3], -0.5);
        let v1 = r.modes[0].value(&[2.1], 0.7);
        assert!((v0 - v1).abs() < 1e-8);
    }
}
