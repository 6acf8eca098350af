use thinshell::asymptotics::SlopeSource;
use thinshell::geometry::{InterfaceSpec, PlaneCurve};
use thinshell::shell_solver::*;
use thinshell::sweep::*;
use thinshell::Error;

fn c12() -> TwoPhaseCoeff {
    TwoPhaseCoeff::new(1.0, 2.0).unwrap()
}

#[test]
fn circle_sweep_recovers_leading_term_and_slope() {
    let mut cfg = SweepConfig::new(InterfaceSpec::circle(1.0).unwrap(), c12(), vec![2, 3]);
    cfg.diagnostics = Some(DiagnosticsConfig { p_max: 5, l_max: 6 });
    let rep = run_sweep(&cfg).unwrap();
    assert_eq!(rep.solver_path, SolverPath::Radial);
    assert_eq!(rep.epsilons, DEFAULT_EPSILONS.to_vec());
    for k in [2, 3] {
        let r = rep.k(k).unwrap();
        assert!((r.fit.intercept() - 1.5).abs() < 1e-4, "k={k}: a={}", r.fit.intercept());
        assert!((r.fit.slope() + 0.25).abs() < 0.005, "k={k}: b={}", r.fit.slope());
        assert_eq!(r.deviations.slope_reference, Some(SlopeSource::SphereClosedForm));
        assert!(r.deviations.intercept_abs <= r.intercept_error_bound.max(1e-4));
        assert!(r.remainder_order.order.unwrap() > 1.8);
        assert!(r.points.iter().all(|p| p.index == 2 || p.index == 3));
        let d = r.diagnostics.as_ref().unwrap();
        assert!(d.l1_deviation_order.order.unwrap() > 0.9);
        assert_eq!(d.epsilons.len(), 5);
    }
    // every ε contributes one row per computed eigenvalue
    assert_eq!(rep.results.len() % 5, 0);
    assert!(rep.results.iter().any(|r| r.k == 3 && r.epsilon == 0.005));
}

#[test]
fn ellipse_sweep_uses_branch_slopes() {
    let ell = InterfaceSpec::PlaneCurve(PlaneCurve::ellipse(2.0, 1.0).unwrap());
    let mut cfg = SweepConfig::new(ell, c12(), vec![2]);
    cfg.epsilons = vec![0.04, 0.02, 0.01, 0.005];
    cfg.solver.collar = CollarOptions { m_xi: 128, m_tau: 4, ..Default::default() };
    let rep = run_sweep(&cfg).unwrap();
    let r = rep.k(2).unwrap();
    assert_eq!(r.prediction.slope, None);
    assert_eq!(r.deviations.slope_reference, Some(SlopeSource::BranchFunctional));
    assert!(r.deviations.slope_rel.unwrap() < 0.05, "{:?}", r.deviations);
}

#[test]
fn linear_fit_option() {
    let mut cfg = SweepConfig::new(InterfaceSpec::sphere(3, 1.0).unwrap(), c12(), vec![2]);
    cfg.fit_degree = 1;
    cfg.epsilons = vec![0.02, 0.01, 0.005, 0.0025];
    let rep = run_sweep(&cfg).unwrap();
    let r = rep.k(2).unwrap();
    assert_eq!(r.fit.degree, 1);
    assert!((r.fit.intercept() - 3.0).abs() < 1e-3);
    assert_eq!(r.deviations.slope_rel, None);
}

#[test]
fn config_validation() {
    let base = SweepConfig::new(InterfaceSpec::circle(1.0).unwrap(), c12(), vec![2]);
    let mut c = base.clone();
    c.ks = vec![0];
    assert!(c.validate().is_err());
    let mut c = base.clone();
    c.epsilons = vec![0.01, 0.02, 0.005, 0.001];
    assert!(c.validate().is_err());
    let mut c = base.clone();
    c.epsilons = vec![0.04, 0.02, 0.01];
    assert!(c.validate().is_err());
    let mut c = base.clone();
    c.fit_degree = 3;
    assert!(c.validate().is_err());
    let mut c = SweepConfig::new(InterfaceSpec::PlaneCurve(PlaneCurve::ellipse(2.0, 1.0).unwrap()), c12(), vec![2]);
    c.epsilons = vec![0.6, 0.3, 0.1, 0.05];
    assert!(matches!(c.validate(), Err(Error::OutsideCollar { .. })));
    c.epsilons = vec![0.08, 0.04, 0.02, 0.01];
    c.solver.path = Some(SolverPath::Radial);
    assert!(c.validate().is_err());
    let mut c = SweepConfig::new(InterfaceSpec::sphere(3, 1.0).unwrap(), c12(), vec![2]);
    c.solver.path = Some(SolverPath::Collar);
    assert!(c.validate().is_err());
}

#[test]
fn default_grid_scales_with_reach() {
    let small = InterfaceSpec::circle(0.1).unwrap();
    let eps = default_epsilons(&small);
    assert!(eps[0] < 0.1);
    assert!(eps.windows(2).all(|w| w[1] < w[0]));
    assert_eq!(default_epsilons(&InterfaceSpec::circle(1.0).unwrap()), DEFAULT_EPSILONS.to_vec());
}

#[test]
fn tracking_follows_indices_across_epsilons() {
    let a = solve_sphere_shell(3, 1.0, c12(), 0.04, None, 9, &RadialOptions::default()).unwrap();
    let b = solve_sphere_shell(3, 1.0, c12(), 0.02, None, 9, &RadialOptions::default()).unwrap();
    for k in 1..=9 {
        let j = track_eigenvalue(&a, &b, k).unwrap();
        // first index of the degree-0, 1 and 2 blocks
        let block = |i: usize| match i {
            1 => 1,
            2..=4 => 2,
            _ => 5,
        };
        assert_eq!(block(j), block(k), "k={k} tracked to {j}");
        let (jo, overlap) = track_by_overlap(&a, &b, k).unwrap();
        assert_eq!(jo, block(k));
        assert!(overlap > 0.99, "k={k}: {overlap}");
    }
}

#[test]
fn fit_helpers() {
    let pts: Vec<(f64, f64)> = [0.08, 0.04, 0.02, 0.01].iter().map(|&e| (e, 2.0 - 0.5 * e + 3.0 * e * e)).collect();
    let f = poly_fit(&pts, 2).unwrap();
    assert!((f.intercept() - 2.0).abs() < 1e-12 && (f.slope() + 0.5).abs() < 1e-10);
    let of = fit_orders(&pts, 2, true).unwrap();
    assert!((of.order_estimate.order.unwrap() - 2.0).abs() < 1e-6);
    assert!(matches!(poly_fit(&[(1.0, 1.0), (1.0, 2.0), (1.0, 3.0)], 1), Err(Error::RankDeficient(_))));
    assert!(noise_floor(10.0) > noise_floor(1.0));
}

fn shipped_configs() -> Vec<SweepConfig> {
    let eq = TwoPhaseCoeff::new(1.0, 1.0).unwrap();
    vec![
        SweepConfig::new(InterfaceSpec::circle(1.0).unwrap(), c12(), vec![2]),
        SweepConfig::new(InterfaceSpec::sphere(3, 1.0).unwrap(), c12(), vec![2]),
        SweepConfig::new(InterfaceSpec::sphere(4, 1.0).unwrap(), c12(), vec![2]),
        SweepConfig::new(InterfaceSpec::circle(1.0).unwrap(), eq, vec![2]),
    ]
}

#[test]
fn halving_the_finest_epsilon_keeps_the_intercept() {
    for cfg in shipped_configs() {
        let base = run_sweep(&cfg).unwrap();
        let mut finer = cfg.clone();
        finer.epsilons.push(cfg.epsilons.last().unwrap() / 2.0);
        let fine = run_sweep(&finer).unwrap();
        for (r0, r1) in base.per_k.iter().zip(&fine.per_k) {
            let shift = (r0.fit.intercept() - r1.fit.intercept()).abs();
            assert!(shift < r0.fit.std_errors[0], "{:?} k={}: shift {shift:e} vs se {:e}", cfg.interface, r0.k, r0.fit.std_errors[0]);
        }
    }
}

#[test]
fn equal_coefficient_intercepts_match_the_interface_within_the_bound() {
    let eq = TwoPhaseCoeff::new(1.0, 1.0).unwrap();
    let ell = InterfaceSpec::PlaneCurve(PlaneCurve::ellipse(2.0, 1.0).unwrap());
    let mut e = SweepConfig::new(ell, eq, vec![2, 3]);
    e.solver.collar = CollarOptions { m_xi: 128, m_tau: 4, ..Default::default() };
    for cfg in [SweepConfig::new(InterfaceSpec::circle(1.0).unwrap(), eq, vec![1, 2, 3]), e] {
        let rep = run_sweep(&cfg).unwrap();
        for r in &rep.per_k {
            assert!(
                r.deviations.intercept_abs <= 2.0 * r.intercept_error_bound,
                "k={}: {:e} vs bound {:e}",
                r.k,
                r.deviations.intercept_abs,
                r.intercept_error_bound
            );
        }
    }
}
