//! Periodic quadratic finite elements for the Laplace–Beltrami operator on
//! a closed plane curve.

use std::f64::consts::TAU;
use std::sync::Arc;

use super::{cluster_values, Cluster, InterfaceMode, Spectrum};
use crate::error::{Error, Result};
use crate::geometry::InterfaceSpec;
use crate::linalg::{smallest_eigenpairs, BandedSym, EigenOptions};
use crate::p2::{shape, shape_deriv};
use crate::quadrature::element_rule;

/// Periodic mesh `θ_0 < … < θ_{M−1}` with `M` quadratic elements; element
/// `e` spans `[θ_e, θ_{e+1}]`, wrapping to `θ_0 + 2π`.
///
/// Degrees of freedom follow the curve: vertex `e` is dof `2e`, the midpoint
/// of element `e` is dof `2e + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveMesh1D {
    nodes: Vec<f64>,
}

impl CurveMesh1D {
    pub const MIN_ELEMENTS: usize = 16;

    pub fn uniform(m: usize) -> Result<Self> {
        Self::new((0..m).map(|i| TAU * i as f64 / m as f64).collect())
    }

    pub fn new(nodes: Vec<f64>) -> Result<Self> {
        if nodes.len() < Self::MIN_ELEMENTS {
            return Err(Error::InvalidArgument(format!(
                "curve mesh needs at least {} elements, got {}",
                Self::MIN_ELEMENTS,
                nodes.len()
            )));
        }
        if nodes.iter().any(|x| !x.is_finite())
            || nodes.windows(2).any(|w| !(w[1] > w[0]))
            || !(nodes[nodes.len() - 1] < nodes[0] + TAU)
        {
            return Err(Error::InvalidArgument("curve mesh nodes must be strictly increasing within one period".into()));
        }
        Ok(Self { nodes })
    }

    pub fn elements(&self) -> usize {
        self.nodes.len()
    }

    pub fn dofs(&self) -> usize {
        2 * self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// `(θ_start, length)` of element `e`.
    pub fn element(&self, e: usize) -> (f64, f64) {
        let m = self.nodes.len();
        let a = self.nodes[e];
        let b = if e + 1 == m { self.nodes[0] + TAU } else { self.nodes[e + 1] };
        (a, b - a)
    }

    pub fn element_dofs(&self, e: usize) -> [usize; 3] {
        let n = self.dofs();
        [2 * e, 2 * e + 1, (2 * e + 2) % n]
    }

    /// Position of dof `q` in the folded ordering, which keeps the periodic
    /// wrap inside a half bandwidth of 4.
    pub(crate) fn fold(&self, q: usize) -> usize {
        fold(self.dofs(), q)
    }

    /// Element containing `θ` and the reference coordinate in it.
    pub fn locate(&self, theta: f64) -> (usize, f64) {
        let t0 = self.nodes[0];
        let mut th = (theta - t0).rem_euclid(TAU) + t0;
        if th >= t0 + TAU {
            th = t0;
        }
        let e = match self.nodes.partition_point(|&x| x <= th) {
            0 => 0,
            i => i - 1,
        };
        let (a, h) = self.element(e);
        (e, ((th - a) / h).clamp(0.0, 1.0))
    }

    /// Interpolation coordinates `θ` of every dof in natural order.
    pub fn dof_coordinates(&self) -> Vec<f64> {
        (0..self.elements())
            .flat_map(|e| {
                let (a, h) = self.element(e);
                [a, a + 0.5 * h]
            })
            .collect()
    }
}

/// Folded position of periodic dof `q` among `n`.
pub(crate) fn fold(n: usize, q: usize) -> usize {
    if q < n / 2 {
        2 * q
    } else {
        2 * (n - 1 - q) + 1
    }
}

/// A continuous piecewise-quadratic function on a [`CurveMesh1D`].
#[derive(Debug, Clone)]
pub struct NodalFunction {
    mesh: Arc<CurveMesh1D>,
    coeffs: Vec<f64>,
}

impl NodalFunction {
    pub fn new(mesh: Arc<CurveMesh1D>, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() != mesh.dofs() {
            return Err(Error::InvalidArgument(format!(
                "nodal vector has {} entries, mesh has {} dofs",
                coeffs.len(),
                mesh.dofs()
            )));
        }
        Ok(Self { mesh, coeffs })
    }

    pub fn mesh(&self) -> &Arc<CurveMesh1D> {
        &self.mesh
    }

    /// Dof values in natural order.
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn value(&self, theta: f64) -> f64 {
        let (e, s) = self.mesh.locate(theta);
        self.value_in(e, s)
    }

    /// `dΦ/dθ`
    pub fn derivative(&self, theta: f64) -> f64 {
        let (e, s) = self.mesh.locate(theta);
        self.derivative_in(e, s)
    }

    pub fn value_in(&self, e: usize, s: f64) -> f64 {
        let d = self.mesh.element_dofs(e);
        shape(s).iter().zip(d).map(|(n, q)| n * self.coeffs[q]).sum()
    }

    pub fn derivative_in(&self, e: usize, s: f64) -> f64 {
        let d = self.mesh.element_dofs(e);
        let (_, h) = self.mesh.element(e);
        shape_deriv(s).iter().zip(d).map(|(n, q)| n * self.coeffs[q]).sum::<f64>() / h
    }
}

/// Per-element quadrature data: `(s, θ, weight·h, speed)` at each Gauss point.
pub(crate) fn curve_quadrature(
    spec: &InterfaceSpec,
    mesh: &CurveMesh1D,
    e: usize,
) -> Result<[(f64, f64, f64, f64); 4]> {
    let InterfaceSpec::PlaneCurve(c) = spec else {
        return Err(Error::InvalidArgument("curve quadrature needs a plane curve".into()));
    };
    let (a, h) = mesh.element(e);
    let mut out = [(0.0, 0.0, 0.0, 0.0); 4];
    for (o, &(s, w)) in out.iter_mut().zip(element_rule()) {
        let th = a + h * s;
        let sp = c.speed(th);
        if sp < 1e-10 {
            return Err(Error::DegenerateParameterization { xi: vec![th], speed: sp });
        }
        *o = (s, th, w * h, sp);
    }
    Ok(out)
}

/// First `count` Laplace–Beltrami eigenpairs of a plane curve, using
/// periodic quadratic elements on `mesh`.
pub fn curve_spectrum(spec: &InterfaceSpec, mesh: Arc<CurveMesh1D>, count: usize) -> Result<Spectrum> {
    spec.validate()?;
    if !matches!(spec, InterfaceSpec::PlaneCurve(_)) {
        return Err(Error::InvalidArgument("curve_spectrum needs a plane curve".into()));
    }
    let n = mesh.dofs();
    if count == 0 || 4 * count > n {
        return Err(Error::InvalidArgument(format!(
            "requested {count} eigenpairs from {n} dofs; need count <= dofs/4"
        )));
    }
    let mut a = BandedSym::zeros(n, 4);
    let mut b = BandedSym::zeros(n, 4);
    for e in 0..mesh.elements() {
        let dofs = mesh.element_dofs(e).map(|q| mesh.fold(q));
        let (_, h) = mesh.element(e);
        for (s, _, wh, sp) in curve_quadrature(spec, &mesh, e)? {
            let nv = shape(s);
            let dv = shape_deriv(s).map(|d| d / h);
            for i in 0..3 {
                for j in 0..=i {
                    a.add(dofs[i], dofs[j], wh * dv[i] * dv[j] / sp);
                    b.add(dofs[i], dofs[j], wh * nv[i] * nv[j] * sp);
                }
            }
        }
    }
    // A few extra pairs so the last requested cluster is complete.
    let extra = (count + 4).min(n / 2);
    let pairs = smallest_eigenpairs(&a, &b, extra, &EigenOptions::default())?;
    let mut values = pairs.values;
    for v in values.iter_mut() {
        if (-1e-9..0.0).contains(v) {
            *v = 0.0;
        }
    }
    let all_clusters = cluster_values(&values);
    let mut clusters: Vec<Cluster> = Vec::new();
    for c in all_clusters {
        if c.first > count {
            break;
        }
        clusters.push(Cluster { last: c.last.min(count), ..c });
    }
    let modes = pairs
        .vectors
        .into_iter()
        .take(count)
        .map(|v| {
            let mut nat: Vec<f64> = (0..n).map(|q| v[mesh.fold(q)]).collect();
            // deterministic sign: largest-magnitude entry positive
            let big = nat.iter().cloned().fold(0.0f64, |m, x| if x.abs() > m.abs() { x } else { m });
            if big < 0.0 {
                nat.iter_mut().for_each(|x| *x = -*x);
            }
            NodalFunction::new(mesh.clone(), nat).map(InterfaceMode::Nodal)
        })
        .collect::<Result<Vec<_>>>()?;
    values.truncate(count);
    Ok(Spectrum::new(values, clusters, modes, Some(mesh)))
}
