//! Quadrature of the curvature form
//! `C(Φ, Ψ) = ∫ (G̃^{ij} − H g₀^{ij}) ∂_iΦ ∂_jΨ √G₀ dξ` on the interface.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::geometry::{metric_at, InterfaceSpec};
use crate::interface_spectrum::{is_simple, InterfaceMode, Spectrum};
use crate::quadrature::{element_rule, gauss_on};

/// Tensor-product rule over the parameter domain of `spec`, adequate for
/// harmonics of degree up to `degree`. The azimuthal integrand is a
/// trigonometric polynomial of degree at most `2 degree`, integrated exactly
/// by the periodic trapezoid rule; polar integrands are analytic and get
/// Gauss–Legendre points well beyond their effective degree.
fn parameter_rule(spec: &InterfaceSpec, degree: usize) -> Vec<(Vec<f64>, f64)> {
    let d = spec.param_dim();
    let polar = gauss_on(0.0, std::f64::consts::PI, degree + spec.ambient_dim() + 16);
    let n_az = 2 * degree + 4;
    let h = std::f64::consts::TAU / n_az as f64;
    let azimuth: Vec<(f64, f64)> = (0..n_az).map(|i| ((i as f64 + 0.5) * h, h)).collect();
    let mut pts: Vec<(Vec<f64>, f64)> = vec![(Vec::new(), 1.0)];
    for j in 0..d {
        let rule = if j + 1 == d { &azimuth } else { &polar };
        pts = pts
            .iter()
            .flat_map(|(p, w)| {
                rule.iter().map(move |(x, wx)| {
                    let mut q = p.clone();
                    q.push(*x);
                    (q, w * wx)
                })
            })
            .collect();
    }
    pts
}

/// Quadrature points for the given modes: native elementwise Gauss points
/// for nodal functions, a product rule otherwise.
fn rule_for(spec: &InterfaceSpec, modes: &[&InterfaceMode]) -> Vec<(Vec<f64>, f64)> {
    if let Some(InterfaceMode::Nodal(f)) = modes.iter().find(|m| matches!(m, InterfaceMode::Nodal(_))) {
        let mesh = f.mesh();
        return (0..mesh.elements())
            .flat_map(|e| {
                let (a, h) = mesh.element(e);
                element_rule().iter().map(move |&(s, w)| (vec![a + h * s], w * h))
            })
            .collect();
    }
    let degree = modes
        .iter()
        .map(|m| match m {
            InterfaceMode::Harmonic(h) => h.l,
            InterfaceMode::Nodal(_) => 0,
        })
        .max()
        .unwrap_or(0);
    parameter_rule(spec, degree)
}

fn integrate(spec: &InterfaceSpec, modes: &[&InterfaceMode]) -> Result<DMatrix<f64>> {
    let m = modes.len();
    let mut out = DMatrix::zeros(m, m);
    for (xi, w) in rule_for(spec, modes) {
        let ms = metric_at(spec, &xi)?;
        let kernel = &ms.g_tilde - &ms.g0_inv * ms.mean_curvature;
        let grads: Vec<nalgebra::DVector<f64>> =
            modes.iter().map(|md| nalgebra::DVector::from_vec(md.gradient(&xi))).collect();
        let kg: Vec<nalgebra::DVector<f64>> = grads.iter().map(|g| &kernel * g).collect();
        for a in 0..m {
            for b in 0..=a {
                let v = w * ms.sqrt_g0 * grads[a].dot(&kg[b]);
                out[(a, b)] += v;
                if a != b {
                    out[(b, a)] += v;
                }
            }
        }
    }
    Ok(out)
}

/// `C(Φ_p, Φ_q)` for interface modes `p`, `q` (1-based).
pub fn curvature_form(spec: &InterfaceSpec, spectrum: &Spectrum, p: usize, q: usize) -> Result<f64> {
    let (a, b) = (spectrum.mode(p)?, spectrum.mode(q)?);
    Ok(integrate(spec, &[a, b])?[(0, 1)])
}

/// `C(Φ_p, Φ_q)` over the cluster containing `k`.
pub fn curvature_matrix(spec: &InterfaceSpec, spectrum: &Spectrum, k: usize) -> Result<DMatrix<f64>> {
    let c = spectrum.cluster_of(k)?;
    if c.last - c.first + 1 < c.multiplicity {
        return Err(Error::BasisTooSmall(format!(
            "cluster {}..{} is truncated; compute at least {} interface modes",
            c.first,
            c.first + c.multiplicity - 1,
            c.first + c.multiplicity - 1
        )));
    }
    let modes: Vec<&InterfaceMode> = (c.first..=c.last).map(|p| spectrum.mode(p)).collect::<Result<_>>()?;
    integrate(spec, &modes)
}

/// `Λ_k` for a simple eigenvalue.
pub fn lambda_k_functional(spec: &InterfaceSpec, spectrum: &Spectrum, k: usize) -> Result<f64> {
    if !is_simple(spectrum, k)? {
        let c = spectrum.cluster_of(k)?;
        return Err(Error::NotSimple { k, first: c.first, last: c.first + c.multiplicity - 1 });
    }
    let m = spectrum.mode(k)?;
    Ok(integrate(spec, &[m])?[(0, 0)])
}

/// Ascending eigenvalues of the curvature form on the eigenspace of the
/// cluster containing `k`; a single value `Λ_k` when `λ_k` is simple.
pub fn branch_functionals(spec: &InterfaceSpec, spectrum: &Spectrum, k: usize) -> Result<Vec<f64>> {
    let m = curvature_matrix(spec, spectrum, k)?;
    let mut v: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    Ok(v)
}
