//! The two-phase eigenproblem on the thin shell `Ω(ε)`.
//!
//! Two independent discretizations are provided: separation of variables
//! for spherical interfaces (a 1D radial problem per angular degree), and a
//! tensor-product finite element method in collar coordinates
//! `(θ, τ) ∈ [0, 2π) × (−1, 1)` for closed plane curves. Eigenfunctions are
//! reported in collar variables, normalized by
//! `∫∫ Φ̃² √G(ξ, ετ) dξ dτ = 1`.

mod collar;
mod diagnostics;
mod ode;
mod radial;
mod shooting;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use collar::{solve_curve_shell, CollarFunction, CollarOptions, DEFAULT_UNKNOWN_CAP};
pub use diagnostics::{fourier_diagnostics, FourierTable};
pub use radial::{
    default_l_max, solve_radial_mode, solve_sphere_shell, RadialFunction, RadialModes, RadialOptions, RadialProblem,
};
pub use shooting::shooting_oracle;

use crate::error::{Error, Result};
use crate::geometry::InterfaceSpec;
use crate::interface_spectrum::SphereHarmonic;

/// Piecewise constant conductivity: `σ₋` for `t < 0`, `σ₊` for `t > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoPhaseCoeff {
    pub sigma_minus: f64,
    pub sigma_plus: f64,
}

impl TwoPhaseCoeff {
    pub fn new(sigma_minus: f64, sigma_plus: f64) -> Result<Self> {
        let c = Self { sigma_minus, sigma_plus };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |s: f64| s > 0.0 && s.is_finite();
        if !ok(self.sigma_minus) || !ok(self.sigma_plus) {
            return Err(Error::InvalidArgument(format!(
                "conductivities must be positive, got ({}, {})",
                self.sigma_minus, self.sigma_plus
            )));
        }
        Ok(())
    }

    /// `σ` on the side of the interface given by the sign of `t`.
    pub fn at(&self, outside: bool) -> f64 {
        if outside {
            self.sigma_plus
        } else {
            self.sigma_minus
        }
    }

    pub fn mean(&self) -> f64 {
        0.5 * (self.sigma_minus + self.sigma_plus)
    }

    pub fn jump(&self) -> f64 {
        self.sigma_plus - self.sigma_minus
    }

    pub fn min(&self) -> f64 {
        self.sigma_minus.min(self.sigma_plus)
    }

    pub fn max(&self) -> f64 {
        self.sigma_minus.max(self.sigma_plus)
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self { sigma_minus: c * self.sigma_minus, sigma_plus: c * self.sigma_plus }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverPath {
    Radial,
    Collar,
}

impl fmt::Display for SolverPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SolverPath::Radial => "radial",
            SolverPath::Collar => "collar",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverMetadata {
    pub path: SolverPath,
    /// Human-readable mesh description, e.g. `collar 256x8`.
    pub mesh: String,
    pub unknowns: usize,
    /// Eigen-iteration residual per returned pair.
    pub residuals: Vec<f64>,
    /// 1-based indices whose slightly negative values were clamped to 0.
    pub clamped: Vec<usize>,
}

/// One eigenfunction of the separated sphere problem, `Φ = u(ρ) Y(ξ)`.
#[derive(Debug, Clone)]
pub struct RadialShellMode {
    /// Angular degree.
    pub degree: usize,
    /// 0-based index among the radial eigenvalues of this degree.
    pub radial_index: usize,
    pub harmonic: SphereHarmonic,
    pub radial: Arc<RadialFunction>,
}

#[derive(Debug, Clone)]
pub enum ShellMode {
    Radial(RadialShellMode),
    Collar(CollarFunction),
}

impl ShellMode {
    /// `Φ̃(ξ, τ)` in collar variables.
    pub fn value(&self, xi: &[f64], tau: f64) -> f64 {
        match self {
            ShellMode::Radial(m) => m.radial.collar_value(tau) * m.harmonic.value(xi),
            ShellMode::Collar(c) => c.value(xi[0], tau),
        }
    }
}

/// Eigenpairs of the shell problem at one `ε`.
#[derive(Debug, Clone)]
pub struct ShellEigenResult {
    pub epsilon: f64,
    pub interface: InterfaceSpec,
    pub coeff: TwoPhaseCoeff,
    /// `λ_{1,ε} ≤ λ_{2,ε} ≤ …`
    pub eigenvalues: Vec<f64>,
    pub modes: Vec<ShellMode>,
    pub meta: SolverMetadata,
}

/// One line of the results table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub epsilon: f64,
    pub k: usize,
    pub lambda: f64,
    pub solver_path: SolverPath,
    pub mesh: String,
    pub residual: f64,
}

impl ShellEigenResult {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// `λ_{k,ε}`, 1-based.
    pub fn eigenvalue(&self, k: usize) -> Result<f64> {
        if k == 0 || k > self.len() {
            return Err(Error::InvalidArgument(format!("index {k} outside 1..={}", self.len())));
        }
        Ok(self.eigenvalues[k - 1])
    }

    pub fn rows(&self) -> Vec<ResultRow> {
        self.eigenvalues
            .iter()
            .enumerate()
            .map(|(i, &lambda)| ResultRow {
                epsilon: self.epsilon,
                k: i + 1,
                lambda,
                solver_path: self.meta.path,
                mesh: self.meta.mesh.clone(),
                residual: self.meta.residuals[i],
            })
            .collect()
    }
}

/// Clamps values in `[−1e−9, 0)` to zero, returning the 1-based indices.
pub(crate) fn clamp_floor(values: &mut [f64]) -> Vec<usize> {
    let mut out = Vec::new();
    for (i, v) in values.iter_mut().enumerate() {
        if (-1e-9..0.0).contains(v) {
            *v = 0.0;
            out.push(i + 1);
        }
    }
    out
}
