use std::sync::Arc;

use nalgebra::DMatrix;

use thinshell::asymptotics::*;
use thinshell::geometry::{InterfaceSpec, PlaneCurve};
use thinshell::interface_spectrum::*;
use thinshell::shell_solver::TwoPhaseCoeff;
use thinshell::Error;

// Eigenvalues of the curvature form on the first nonzero eigenspace of the
// ellipse (2 cos θ, sin θ), frozen from a high-order Fourier–Galerkin run.
const ELLIPSE_BRANCH_ODD: f64 = -0.401170648974973168297178699924;
const ELLIPSE_BRANCH_EVEN: f64 = -0.144344647788536369055467165424;

fn c12() -> TwoPhaseCoeff {
    TwoPhaseCoeff::new(1.0, 2.0).unwrap()
}

fn curve_spec(c: PlaneCurve) -> InterfaceSpec {
    InterfaceSpec::PlaneCurve(c)
}

fn curve_modes(spec: &InterfaceSpec, m: usize, count: usize) -> Spectrum {
    curve_spectrum(spec, Arc::new(CurveMesh1D::uniform(m).unwrap()), count).unwrap()
}

#[test]
fn sphere_functional_reduces_to_closed_form() {
    for n in 2..=5 {
        for r in [0.7, 1.0, 2.0] {
            let spec = InterfaceSpec::sphere(n, r).unwrap();
            let s = sphere_spectrum(n, r, 20).unwrap();
            for c in s.clusters().iter().filter(|c| c.last - c.first + 1 == c.multiplicity) {
                let lam = s.eigenvalue(c.first).unwrap();
                let closed = (n as f64 - 3.0) / r * lam;
                let m = curvature_matrix(&spec, &s, c.first).unwrap();
                let dev = (m - DMatrix::identity(c.multiplicity, c.multiplicity) * closed).abs().max();
                assert!(dev < 1e-10 * closed.abs().max(1.0), "n={n} r={r} cluster {c:?}: {dev}");
            }
            let q = curvature_form(&spec, &s, 2, 2).unwrap();
            let closed = (n as f64 - 3.0) / r * s.eigenvalue(2).unwrap();
            assert!((q - closed).abs() < 1e-10 * closed.abs().max(1.0), "n={n} r={r}: {q} vs {closed}");
        }
    }
}

#[test]
fn sphere_predictions() {
    let circle = InterfaceSpec::circle(1.0).unwrap();
    let p = predict(&circle, &c12(), &sphere_spectrum(2, 1.0, 5).unwrap(), 2).unwrap();
    assert_eq!(p.leading, 1.5);
    assert!((p.slope.unwrap() + 0.25).abs() < 1e-15);
    assert_eq!(p.slope_source, SlopeSource::SphereClosedForm);
    assert_eq!(p.multiplicity, 2);

    let s3 = InterfaceSpec::sphere(3, 1.0).unwrap();
    let p = predict(&s3, &c12(), &sphere_spectrum(3, 1.0, 5).unwrap(), 3).unwrap();
    assert_eq!(p.leading, 3.0);
    assert_eq!(p.slope.unwrap(), 0.0);

    let s4 = InterfaceSpec::sphere(4, 1.0).unwrap();
    let p = predict(&s4, &c12(), &sphere_spectrum(4, 1.0, 5).unwrap(), 2).unwrap();
    assert!((p.slope.unwrap() - 0.75).abs() < 1e-15);
    assert!(p.slope.unwrap() > 0.0);
}

#[test]
fn equal_coefficients_have_no_first_order_term() {
    let eq = TwoPhaseCoeff::new(1.5, 1.5).unwrap();
    let spec = curve_spec(PlaneCurve::ellipse(2.0, 1.0).unwrap());
    let s = curve_modes(&spec, 128, 5);
    let p = predict(&spec, &eq, &s, 2).unwrap();
    assert_eq!(p.slope, Some(0.0));
    assert_eq!(p.slope_source, SlopeSource::EqualCoefficients);
    assert!((p.leading - 1.5 * s.eigenvalue(2).unwrap()).abs() < 1e-15);
}

#[test]
fn ellipse_branch_functionals_match_frozen_values() {
    let spec = curve_spec(PlaneCurve::ellipse(2.0, 1.0).unwrap());
    let s = curve_modes(&spec, 512, 5);
    let mu = branch_functionals(&spec, &s, 2).unwrap();
    assert_eq!(mu.len(), 2);
    assert!((mu[0] - ELLIPSE_BRANCH_ODD).abs() < 1e-8, "{mu:?}");
    assert!((mu[1] - ELLIPSE_BRANCH_EVEN).abs() < 1e-8, "{mu:?}");

    // the plain functional is undefined on a double eigenvalue
    assert!(matches!(lambda_k_functional(&spec, &s, 2), Err(Error::NotSimple { .. })));
    let p = predict(&spec, &c12(), &s, 2).unwrap();
    assert_eq!(p.slope, None);
    assert_eq!(p.slope_source, SlopeSource::NoneMultiplicity);
    let b = predict_branch(&spec, &c12(), &s, 3).unwrap();
    assert_eq!(b.slope_source, SlopeSource::BranchFunctional);
    assert!((b.slope.unwrap() - 0.25 * ELLIPSE_BRANCH_EVEN).abs() < 1e-8);
}

#[test]
fn branch_functionals_converge_with_the_interface_mesh() {
    let spec = curve_spec(PlaneCurve::ellipse(2.0, 1.0).unwrap());
    let err = |m| {
        let mu = branch_functionals(&spec, &curve_modes(&spec, m, 5), 2).unwrap();
        (mu[0] - ELLIPSE_BRANCH_ODD).abs().max((mu[1] - ELLIPSE_BRANCH_EVEN).abs())
    };
    let (e64, e128) = (err(64), err(128));
    assert!(e128 < e64 / 8.0, "{e64} -> {e128}");
}

#[test]
fn branch_functionals_are_invariant_under_reparameterization() {
    let c = PlaneCurve::ellipse(2.0, 1.0).unwrap();
    let spec = curve_spec(c.clone());
    let base = branch_functionals(&spec, &curve_modes(&spec, 512, 5), 2).unwrap();
    for moved in [c.shifted(0.61), c.rotated(0.8), c.reversed()] {
        let sp = curve_spec(moved);
        let mu = branch_functionals(&sp, &curve_modes(&sp, 512, 5), 2).unwrap();
        for i in 0..2 {
            assert!((mu[i] - base[i]).abs() < 1e-8, "{mu:?} vs {base:?}");
        }
    }
}

#[test]
fn truncated_clusters_are_refused() {
    let spec = InterfaceSpec::sphere(3, 1.0).unwrap();
    let s = sphere_spectrum(3, 1.0, 3).unwrap();
    assert!(matches!(curvature_matrix(&spec, &s, 2), Err(Error::BasisTooSmall(_))));
}

#[test]
fn transverse_modes_form_a_neumann_basis() {
    let modes = transverse_eigenpairs(5);
    assert_eq!(modes.len(), 5);
    assert_eq!(modes[0].mu, 0.0);
    for m in &modes {
        assert!(m.derivative(-1.0).abs() < 1e-12 && m.derivative(1.0).abs() < 1e-12);
    }
    assert!(modes.windows(2).all(|w| w[0].mu < w[1].mu));
}

#[test]
fn remainder_claims_are_ordered() {
    assert_eq!(RemainderClaim::BigOEps2.nominal_order(), 2.0);
    assert_eq!(RemainderClaim::LittleOEps.nominal_order(), 1.0);
}
