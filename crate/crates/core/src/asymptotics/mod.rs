//! First-order asymptotic predictions for `λ_{k,ε}` as `ε → 0`.
//!
//! The leading term is `((σ₋+σ₊)/2) λ_k`. The coefficient of `ε` is
//! `((σ₊−σ₋)/4) Λ_k` with the curvature functional
//! `Λ_k = ∫ (G̃^{ij} − H g₀^{ij}) ∂_iΦ_k ∂_jΦ_k √G₀ dξ` when `λ_k` is simple,
//! and `((n−3)/(4r)) (σ₊−σ₋) λ_k` on a sphere of radius `r`.

mod functional;
mod transverse;

use serde::{Deserialize, Serialize};

pub use functional::{branch_functionals, curvature_form, curvature_matrix, lambda_k_functional};
pub use transverse::{transverse_eigenpairs, TransverseMode};

use crate::error::Result;
use crate::geometry::InterfaceSpec;
use crate::interface_spectrum::{is_simple, Spectrum, CLUSTER_REL_TOL};
use crate::shell_solver::TwoPhaseCoeff;

/// Where the first-order coefficient came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SlopeSource {
    /// `((σ₊−σ₋)/4) Λ_k` for a simple eigenvalue.
    CurvatureFunctional,
    /// `((n−3)/(4r)) (σ₊−σ₋) λ_k` on a sphere.
    SphereClosedForm,
    /// The eigenvalue is multiple on a general curve; no slope is claimed.
    NoneMultiplicity,
    /// `σ₋ = σ₊`: the first-order term vanishes.
    EqualCoefficients,
    /// One branch of a multiple eigenvalue, from the eigenvalues of the
    /// curvature form restricted to the eigenspace.
    BranchFunctional,
}

/// Claimed size of `λ_{k,ε} − leading − slope·ε`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RemainderClaim {
    #[serde(rename = "O(eps)")]
    BigOEps,
    #[serde(rename = "o(eps)")]
    LittleOEps,
    #[serde(rename = "O(eps2)")]
    BigOEps2,
}

impl RemainderClaim {
    /// Smallest empirical order consistent with the claim.
    pub fn nominal_order(&self) -> f64 {
        match self {
            RemainderClaim::BigOEps => 1.0,
            RemainderClaim::LittleOEps => 1.0,
            RemainderClaim::BigOEps2 => 2.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticPrediction {
    pub k: usize,
    pub lambda_interface: f64,
    pub leading: f64,
    pub slope: Option<f64>,
    pub slope_source: SlopeSource,
    pub remainder_order_claim: RemainderClaim,
    pub multiplicity: usize,
    /// Simple, but separated from a neighbour by less than 100 cluster
    /// tolerances.
    pub fragile_simplicity: bool,
}

/// Prediction for index `k`, following the hypotheses of each law:
/// equal coefficients give a zero slope, spheres the closed form (any
/// multiplicity), simple eigenvalues on curves the curvature functional;
/// otherwise no slope.
pub fn predict(spec: &InterfaceSpec, coeff: &TwoPhaseCoeff, spectrum: &Spectrum, k: usize) -> Result<AsymptoticPrediction> {
    let lambda = spectrum.eigenvalue(k)?;
    let simple = is_simple(spectrum, k)?;
    let multiplicity = spectrum.cluster_of(k)?.multiplicity;
    let fragile_simplicity = simple && spectrum.relative_gap(k)? < 100.0 * CLUSTER_REL_TOL;
    let sphere = match spec {
        InterfaceSpec::Sphere { dim_n, radius } => Some((*dim_n, *radius)),
        InterfaceSpec::PlaneCurve(_) => None,
    };
    let (slope, slope_source, remainder) = if coeff.sigma_minus == coeff.sigma_plus {
        let claim = if simple {
            RemainderClaim::BigOEps2
        } else if sphere.is_some() {
            RemainderClaim::LittleOEps
        } else {
            RemainderClaim::BigOEps
        };
        (Some(0.0), SlopeSource::EqualCoefficients, claim)
    } else if let Some((n, r)) = sphere {
        let s = (n as f64 - 3.0) / (4.0 * r) * coeff.jump() * lambda;
        (Some(s), SlopeSource::SphereClosedForm, RemainderClaim::LittleOEps)
    } else if simple {
        let s = coeff.jump() / 4.0 * lambda_k_functional(spec, spectrum, k)?;
        (Some(s), SlopeSource::CurvatureFunctional, RemainderClaim::LittleOEps)
    } else {
        (None, SlopeSource::NoneMultiplicity, RemainderClaim::BigOEps)
    };
    Ok(AsymptoticPrediction {
        k,
        lambda_interface: lambda,
        leading: coeff.mean() * lambda,
        slope,
        slope_source,
        remainder_order_claim: remainder,
        multiplicity,
        fragile_simplicity,
    })
}

/// Like [`predict`], but for a member of a multiple eigenvalue the slope is
/// the `i`-th smallest branch slope `((σ₊−σ₋)/4) μ_i`, where `μ_i` are the
/// eigenvalues of the curvature form on the eigenspace and `k` is the
/// `i`-th index of its cluster. For simple eigenvalues this coincides with
/// [`predict`].
pub fn predict_branch(
    spec: &InterfaceSpec,
    coeff: &TwoPhaseCoeff,
    spectrum: &Spectrum,
    k: usize,
) -> Result<AsymptoticPrediction> {
    let base = predict(spec, coeff, spectrum, k)?;
    if base.slope.is_some() {
        return Ok(base);
    }
    let cluster = spectrum.cluster_of(k)?;
    let mu = branch_functionals(spec, spectrum, k)?;
    let s = coeff.jump() / 4.0 * mu[k - cluster.first];
    Ok(AsymptoticPrediction {
        slope: Some(s),
        slope_source: SlopeSource::BranchFunctional,
        remainder_order_claim: RemainderClaim::LittleOEps,
        ..base
    })
}
