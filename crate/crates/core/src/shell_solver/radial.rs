//! Separation of variables on a spherical shell: for each angular degree
//! `l` the radial weak form
//! `∫ σ (u′v′ + Λ/ρ² uv) ρ^{n−1} dρ = λ ∫ uv ρ^{n−1} dρ`, `Λ = l(l+n−2)`,
//! on `(r−ε, r+ε)` with natural ends and a node at `ρ = r`.

use std::sync::Arc;

use rayon::prelude::*;

use super::{clamp_floor, RadialShellMode, ShellEigenResult, ShellMode, SolverMetadata, SolverPath, TwoPhaseCoeff};
use crate::error::{Error, Result};
use crate::geometry::InterfaceSpec;
use crate::interface_spectrum::{harmonic_dimension, sphere_spectrum, SphereHarmonic};
use crate::linalg::{smallest_eigenpairs, BandedSym, EigenOptions};
use crate::p2::{shape, shape_deriv};
use crate::quadrature::element_rule;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialOptions {
    /// Quadratic elements on each side of the interface.
    pub elements_per_side: usize,
}

impl Default for RadialOptions {
    fn default() -> Self {
        Self { elements_per_side: 128 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RadialProblem {
    pub n: usize,
    pub r: f64,
    /// Dimensionless angular eigenvalue `l(l+n−2)`.
    pub lambda_ang: f64,
    pub epsilon: f64,
    pub coeff: TwoPhaseCoeff,
    pub elements_per_side: usize,
}

impl RadialProblem {
    pub fn new(n: usize, r: f64, degree: usize, epsilon: f64, coeff: TwoPhaseCoeff, opts: &RadialOptions) -> Result<Self> {
        let p = Self {
            n,
            r,
            lambda_ang: (degree * (degree + n - 2)) as f64,
            epsilon,
            coeff,
            elements_per_side: opts.elements_per_side,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 || !(self.r > 0.0) {
            return Err(Error::InvalidInterface(format!("sphere needs n >= 2 and r > 0, got n={}, r={}", self.n, self.r)));
        }
        if !(self.epsilon > 0.0) {
            return Err(Error::InvalidArgument(format!("epsilon must be positive, got {}", self.epsilon)));
        }
        if self.r - self.epsilon <= 0.0 {
            return Err(Error::ShellReachesOrigin(self.r - self.epsilon));
        }
        if self.elements_per_side < 1 {
            return Err(Error::InvalidArgument("need at least one element per side".into()));
        }
        if !(self.lambda_ang >= 0.0) {
            return Err(Error::InvalidArgument(format!("angular eigenvalue must be >= 0, got {}", self.lambda_ang)));
        }
        self.coeff.validate()
    }

    /// Element vertices `r−ε = ρ_0 < … < ρ_{2N} = r+ε` with `ρ_N = r`.
    pub fn vertices(&self) -> Vec<f64> {
        let ns = self.elements_per_side;
        let h = self.epsilon / ns as f64;
        (0..=2 * ns)
            .map(|i| {
                if i == ns {
                    self.r
                } else if i < ns {
                    self.r - self.epsilon + i as f64 * h
                } else {
                    self.r + (i - ns) as f64 * h
                }
            })
            .collect()
    }

    pub fn dofs(&self) -> usize {
        4 * self.elements_per_side + 1
    }
}

/// A piecewise quadratic radial profile normalized by `∫ u² ρ^{n−1} dρ = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialFunction {
    pub n: usize,
    pub r: f64,
    pub epsilon: f64,
    vertices: Vec<f64>,
    /// Vertex `i` at `2i`, midpoint of element `i` at `2i + 1`.
    coeffs: Vec<f64>,
}

impl RadialFunction {
    pub fn vertices(&self) -> &[f64] {
        &self.vertices
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    fn locate(&self, rho: f64) -> (usize, f64, f64) {
        let ne = self.vertices.len() - 1;
        let e = match self.vertices.partition_point(|&v| v <= rho) {
            0 => 0,
            i => (i - 1).min(ne - 1),
        };
        let h = self.vertices[e + 1] - self.vertices[e];
        (e, ((rho - self.vertices[e]) / h).clamp(0.0, 1.0), h)
    }

    pub fn value(&self, rho: f64) -> f64 {
        let (e, s, _) = self.locate(rho);
        self.value_in(e, s)
    }

    fn value_in(&self, e: usize, s: f64) -> f64 {
        shape(s).iter().enumerate().map(|(a, n)| n * self.coeffs[2 * e + a]).sum()
    }

    fn derivative_in(&self, e: usize, s: f64) -> f64 {
        let h = self.vertices[e + 1] - self.vertices[e];
        shape_deriv(s).iter().enumerate().map(|(a, n)| n * self.coeffs[2 * e + a]).sum::<f64>() / h
    }

    pub fn derivative(&self, rho: f64) -> f64 {
        let (e, s, _) = self.locate(rho);
        self.derivative_in(e, s)
    }

    /// `√(ε r^{n−1}) u(r + ετ)`, the collar-normalized transverse profile.
    pub fn collar_value(&self, tau: f64) -> f64 {
        (self.epsilon * self.r.powi(self.n as i32 - 1)).sqrt() * self.value(self.r + self.epsilon * tau)
    }

    /// `σ₋ u′(r⁻) − σ₊ u′(r⁺)`, which vanishes for the exact solution.
    pub fn flux_jump(&self, coeff: &TwoPhaseCoeff) -> f64 {
        let ns = (self.vertices.len() - 1) / 2;
        coeff.sigma_minus * self.derivative_in(ns - 1, 1.0) - coeff.sigma_plus * self.derivative_in(ns, 0.0)
    }

    /// Gauss points `(τ, weight)` on `(−1, 1)` aligned with the elements.
    pub(crate) fn tau_quadrature(&self) -> Vec<(f64, f64)> {
        let mut out = Vec::with_capacity(4 * (self.vertices.len() - 1));
        for w in self.vertices.windows(2) {
            let (a, b) = ((w[0] - self.r) / self.epsilon, (w[1] - self.r) / self.epsilon);
            for &(s, wt) in element_rule() {
                out.push((a + (b - a) * s, wt * (b - a)));
            }
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct RadialModes {
    pub values: Vec<f64>,
    pub functions: Vec<RadialFunction>,
    pub residuals: Vec<f64>,
}

/// The `count` smallest eigenpairs of one radial problem.
pub fn solve_radial_mode(p: &RadialProblem, count: usize) -> Result<RadialModes> {
    p.validate()?;
    let verts = p.vertices();
    let ndof = p.dofs();
    let ns = p.elements_per_side;
    let mut a = BandedSym::zeros(ndof, 2);
    let mut b = BandedSym::zeros(ndof, 2);
    let d = p.n as i32 - 1;
    for e in 0..2 * ns {
        let sigma = p.coeff.at(e >= ns);
        let (x0, h) = (verts[e], verts[e + 1] - verts[e]);
        for &(s, w) in element_rule() {
            let rho = x0 + h * s;
            let jac = rho.powi(d) * w * h;
            let nv = shape(s);
            let dv = shape_deriv(s).map(|v| v / h);
            for i in 0..3 {
                for j in 0..=i {
                    let k = sigma * (dv[i] * dv[j] + p.lambda_ang / (rho * rho) * nv[i] * nv[j]) * jac;
                    a.add(2 * e + i, 2 * e + j, k);
                    b.add(2 * e + i, 2 * e + j, nv[i] * nv[j] * jac);
                }
            }
        }
    }
    let count = count.min(ndof / 2).max(1);
    let opts = EigenOptions { shift: p.coeff.mean() * (1.0 + p.lambda_ang) / (p.r * p.r), ..Default::default() };
    let pairs = smallest_eigenpairs(&a, &b, count, &opts)?;
    // Rayleigh quotients element by element: the assembled stiffness has
    // entries of size σ/h, and its quadratic form cancels catastrophically
    // for profiles that are nearly constant across the shell.
    let values = pairs.vectors.iter().map(|v| rayleigh_quotient(p, &verts, v)).collect();
    let functions = pairs
        .vectors
        .into_iter()
        .map(|mut v| {
            // sign: positive value at the interface (or first nonzero slope)
            let mid = v[2 * ns];
            let s = if mid.abs() > 1e-12 { mid } else { v[2 * ns + 1] - v[2 * ns - 1] };
            if s < 0.0 {
                v.iter_mut().for_each(|x| *x = -*x);
            }
            RadialFunction { n: p.n, r: p.r, epsilon: p.epsilon, vertices: verts.clone(), coeffs: v }
        })
        .collect();
    Ok(RadialModes { values, functions, residuals: pairs.residuals })
}

fn rayleigh_quotient(p: &RadialProblem, verts: &[f64], v: &[f64]) -> f64 {
    let ns = p.elements_per_side;
    let d = p.n as i32 - 1;
    let (mut num, mut den) = (0.0, 0.0);
    for e in 0..2 * ns {
        let sigma = p.coeff.at(e >= ns);
        let (x0, h) = (verts[e], verts[e + 1] - verts[e]);
        let (u0, u1, u2) = (v[2 * e], v[2 * e + 1], v[2 * e + 2]);
        for &(s, w) in element_rule() {
            let rho = x0 + h * s;
            let jac = rho.powi(d) * w * h;
            let nv = shape(s);
            let u = nv[0] * u0 + nv[1] * u1 + nv[2] * u2;
            // derivative from differences, exact for the quadratic
            let du = ((4.0 * s - 3.0) * (u0 - u1) + (4.0 * s - 1.0) * (u2 - u1)) / h;
            num += sigma * (du * du + p.lambda_ang / (rho * rho) * u * u) * jac;
            den += u * u * jac;
        }
    }
    num / den
}

/// Default angular truncation `2 + ⌈√λ_target · r⌉`.
pub fn default_l_max(r: f64, lambda_target: f64) -> usize {
    2 + (lambda_target.max(0.0).sqrt() * r).ceil() as usize
}

struct Entry {
    lambda: f64,
    degree: usize,
    radial_index: usize,
    residual: f64,
}

/// The `count` smallest eigenvalues of the shell around `S^{n−1}(r)`.
///
/// `l_max` defaults to [`default_l_max`] with the target
/// `σ_max λ_count(Γ)`; the result is rejected if the `count`-th value is
/// within 1% of the lowest eigenvalue of degree `l_max`.
pub fn solve_sphere_shell(
    n: usize,
    r: f64,
    coeff: TwoPhaseCoeff,
    epsilon: f64,
    l_max: Option<usize>,
    count: usize,
    opts: &RadialOptions,
) -> Result<ShellEigenResult> {
    let interface = InterfaceSpec::sphere(n, r)?;
    coeff.validate()?;
    if count == 0 {
        return Err(Error::InvalidArgument("need at least one eigenvalue".into()));
    }
    if !(epsilon > 0.0) {
        return Err(Error::InvalidArgument(format!("epsilon must be positive, got {epsilon}")));
    }
    if r - epsilon <= 0.0 {
        return Err(Error::ShellReachesOrigin(r - epsilon));
    }
    let l_max = match l_max {
        Some(l) => l,
        None => {
            let target = coeff.max() * sphere_spectrum(n, r, count)?.eigenvalue(count)?;
            default_l_max(r, target)
        }
    };
    let solved: Vec<(usize, RadialModes)> = (0..=l_max)
        .into_par_iter()
        .map(|l| {
            let mult = harmonic_dimension(n, l);
            let per = count.div_ceil(mult).max(1);
            let p = RadialProblem::new(n, r, l, epsilon, coeff, opts)?;
            solve_radial_mode(&p, per).map(|m| (l, m))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut entries: Vec<Entry> = Vec::new();
    for (l, m) in &solved {
        for (j, (&lambda, &residual)) in m.values.iter().zip(&m.residuals).enumerate() {
            for _ in 0..harmonic_dimension(n, *l) {
                entries.push(Entry { lambda, degree: *l, radial_index: j, residual });
            }
        }
    }
    // value, then degree; members of one degree stay in label order
    entries.sort_by(|a, b| {
        a.lambda.total_cmp(&b.lambda).then(a.degree.cmp(&b.degree)).then(a.radial_index.cmp(&b.radial_index))
    });
    if entries.len() < count {
        return Err(Error::BasisTooSmall(format!("only {} eigenvalues available", entries.len())));
    }
    entries.truncate(count);
    let lambda_k = entries[count - 1].lambda;
    let lambda_top = solved[l_max].1.values[0];
    if l_max > 0 && lambda_k >= 0.99 * lambda_top {
        return Err(Error::ModeTruncation { lambda_k, lambda_top, l_max });
    }

    let harmonics: Vec<Vec<SphereHarmonic>> = (0..=l_max).map(|l| SphereHarmonic::degree(n, r, l)).collect();
    let radials: Vec<Vec<Arc<RadialFunction>>> =
        solved.into_iter().map(|(_, m)| m.functions.into_iter().map(Arc::new).collect()).collect();
    let mut used = vec![std::collections::HashMap::<usize, usize>::new(); l_max + 1];
    let mut eigenvalues = Vec::with_capacity(count);
    let mut residuals = Vec::with_capacity(count);
    let mut modes = Vec::with_capacity(count);
    for e in &entries {
        let member = used[e.degree].entry(e.radial_index).or_insert(0);
        modes.push(ShellMode::Radial(RadialShellMode {
            degree: e.degree,
            radial_index: e.radial_index,
            harmonic: harmonics[e.degree][*member].clone(),
            radial: radials[e.degree][e.radial_index].clone(),
        }));
        *member += 1;
        eigenvalues.push(e.lambda);
        residuals.push(e.residual);
    }
    let clamped = clamp_floor(&mut eigenvalues);
    let ns = opts.elements_per_side;
    Ok(ShellEigenResult {
        epsilon,
        interface,
        coeff,
        eigenvalues,
        modes,
        meta: SolverMetadata {
            path: SolverPath::Radial,
            mesh: format!("radial {ns}+{ns} l_max={l_max}"),
            unknowns: (l_max + 1) * (4 * ns + 1),
            residuals,
            clamped,
        },
    })
}
