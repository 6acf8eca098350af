//! `ε`-sweeps: solve at each `ε`, fit `λ_{k,ε}` against `a + bε (+cε²)`,
//! estimate remainder orders and compare with the predictions.

mod fit;
mod track;

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use fit::{fit_orders, log_log_order, noise_floor, poly_fit, OrderEstimate, OrderFit, PolyFit};
pub use track::{track_by_overlap, track_eigenvalue};

use crate::asymptotics::{predict, predict_branch, AsymptoticPrediction, SlopeSource};
use crate::error::{Error, Result};
use crate::geometry::{reach, InterfaceSpec};
use crate::interface_spectrum::{curve_spectrum, sphere_spectrum, CurveMesh1D, Spectrum};
use crate::shell_solver::{
    fourier_diagnostics, solve_curve_shell, solve_sphere_shell, CollarOptions, RadialOptions, ResultRow,
    ShellEigenResult, SolverPath, TwoPhaseCoeff,
};

/// The default grid `0.08, 0.04, …, 0.005`.
pub const DEFAULT_EPSILONS: [f64; 5] = [0.08, 0.04, 0.02, 0.01, 0.005];

/// [`DEFAULT_EPSILONS`], scaled down so the largest value is at most
/// `0.4 × reach`.
pub fn default_epsilons(spec: &InterfaceSpec) -> Vec<f64> {
    let cap = 0.4 * reach(spec);
    let f = if DEFAULT_EPSILONS[0] > cap { cap / DEFAULT_EPSILONS[0] } else { 1.0 };
    DEFAULT_EPSILONS.iter().map(|e| e * f).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsConfig {
    pub p_max: usize,
    pub l_max: usize,
}

/// Discretization settings shared by all `ε`.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverSettings {
    /// Forced solver; by default spheres use the radial path and curves the
    /// collar path.
    pub path: Option<SolverPath>,
    pub radial: RadialOptions,
    pub collar: CollarOptions,
    pub l_max: Option<usize>,
    /// Elements of the interface mesh for curve spectra.
    pub interface_elements: usize,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self {
            path: None,
            radial: RadialOptions::default(),
            collar: CollarOptions::default(),
            l_max: None,
            interface_elements: 256,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub interface: InterfaceSpec,
    pub coeff: TwoPhaseCoeff,
    /// 1-based eigenvalue indices.
    pub ks: Vec<usize>,
    /// Strictly decreasing.
    pub epsilons: Vec<f64>,
    pub solver: SolverSettings,
    /// 1 or 2.
    pub fit_degree: usize,
    pub diagnostics: Option<DiagnosticsConfig>,
}

impl SweepConfig {
    pub fn new(interface: InterfaceSpec, coeff: TwoPhaseCoeff, ks: Vec<usize>) -> Self {
        let epsilons = default_epsilons(&interface);
        Self { interface, coeff, ks, epsilons, solver: SolverSettings::default(), fit_degree: 2, diagnostics: None }
    }

    pub fn validate(&self) -> Result<()> {
        self.interface.validate()?;
        self.coeff.validate()?;
        if self.ks.is_empty() || self.ks.contains(&0) {
            return Err(Error::InvalidArgument("k list must be non-empty and 1-based".into()));
        }
        if self.epsilons.len() < 4 {
            return Err(Error::InvalidArgument(format!("need at least 4 epsilon values, got {}", self.epsilons.len())));
        }
        if self.epsilons.windows(2).any(|w| !(w[1] < w[0])) || !(self.epsilons[self.epsilons.len() - 1] > 0.0) {
            return Err(Error::InvalidArgument("epsilon grid must be positive and strictly decreasing".into()));
        }
        let rch = reach(&self.interface);
        if self.epsilons[0] >= rch {
            return Err(Error::OutsideCollar { t: self.epsilons[0], reach: rch });
        }
        if !(1..=2).contains(&self.fit_degree) {
            return Err(Error::InvalidArgument(format!("fit degree must be 1 or 2, got {}", self.fit_degree)));
        }
        if self.path() == SolverPath::Collar && self.interface.ambient_dim() != 2 {
            return Err(Error::InvalidArgument("the collar solver handles interfaces in the plane only".into()));
        }
        if self.path() == SolverPath::Radial && matches!(self.interface, InterfaceSpec::PlaneCurve(_)) {
            return Err(Error::InvalidArgument("the radial solver needs a sphere".into()));
        }
        Ok(())
    }

    pub fn path(&self) -> SolverPath {
        self.solver.path.unwrap_or(match self.interface {
            InterfaceSpec::Sphere { .. } => SolverPath::Radial,
            InterfaceSpec::PlaneCurve(_) => SolverPath::Collar,
        })
    }
}

/// Interface spectrum with every cluster touching `count` complete.
pub fn interface_spectrum(spec: &InterfaceSpec, count: usize, settings: &SolverSettings) -> Result<Spectrum> {
    match spec {
        InterfaceSpec::Sphere { dim_n, radius } => {
            let s = sphere_spectrum(*dim_n, *radius, count)?;
            let c = s.cluster_of(count)?;
            sphere_spectrum(*dim_n, *radius, c.first + c.multiplicity - 1)
        }
        InterfaceSpec::PlaneCurve(_) => {
            let mesh = Arc::new(CurveMesh1D::uniform(settings.interface_elements)?);
            let mut n = count + 2;
            loop {
                let s = curve_spectrum(spec, mesh.clone(), n)?;
                let c = s.cluster_of(count)?;
                if c.last < s.len() {
                    return Ok(s);
                }
                n += 2;
            }
        }
    }
}

/// Solves the shell problem at one `ε` with the configured path.
pub fn solve_at(cfg: &SweepConfig, epsilon: f64, count: usize) -> Result<ShellEigenResult> {
    let r = match (cfg.path(), &cfg.interface) {
        (SolverPath::Radial, InterfaceSpec::Sphere { dim_n, radius }) => {
            solve_sphere_shell(*dim_n, *radius, cfg.coeff, epsilon, cfg.solver.l_max, count, &cfg.solver.radial)
        }
        (SolverPath::Collar, spec) => solve_curve_shell(spec, cfg.coeff, epsilon, count, &cfg.solver.collar),
        (SolverPath::Radial, InterfaceSpec::PlaneCurve(_)) => {
            Err(Error::InvalidArgument("the radial solver needs a sphere".into()))
        }
    };
    r.map_err(|e| Error::AtEpsilon { epsilon, source: Box::new(e) })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesPoint {
    pub epsilon: f64,
    /// Index actually used at this `ε`.
    pub index: usize,
    pub lambda: f64,
    pub fitted: f64,
    pub residual: f64,
}

fn relative(value: f64, reference: f64) -> Option<f64> {
    (reference != 0.0).then(|| (value - reference).abs() / reference.abs())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Deviations {
    pub intercept_abs: f64,
    /// `None` when the prediction is zero.
    pub intercept_rel: Option<f64>,
    pub slope_abs: Option<f64>,
    /// `None` when there is no reference or it is zero.
    pub slope_rel: Option<f64>,
    /// Which prediction the slope was compared against.
    pub slope_reference: Option<SlopeSource>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsSeries {
    pub epsilons: Vec<f64>,
    /// `Σ_{p, l≥2} α²`
    pub transverse_tail: Vec<f64>,
    /// `Σ_p (α^{p,1})² − 1`
    pub l1_deviation: Vec<f64>,
    /// `Σ (α^{p,1})²` over the interface cluster of `k`.
    pub cluster_l1: Vec<f64>,
    pub tail_order: OrderEstimate,
    pub l1_deviation_order: OrderEstimate,
    /// `alpha[i][p−1][l−1] = α^{p,l}` at `epsilons[i]`.
    pub alpha: Vec<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KReport {
    pub k: usize,
    pub points: Vec<SeriesPoint>,
    /// Fit of the configured degree.
    pub fit: PolyFit,
    /// Degree-1 fit, for intercept consistency checks.
    pub fit_linear: PolyFit,
    pub prediction: AsymptoticPrediction,
    /// Branch-resolved prediction for members of multiple eigenvalues.
    pub branch_prediction: Option<AsymptoticPrediction>,
    pub deviations: Deviations,
    /// Order of `λ − a − bε` when a slope is predicted, else of `λ − a`.
    pub remainder_order: OrderEstimate,
    /// Order of `|λ_{k,ε} − ((σ₋+σ₊)/2) λ_k|`.
    pub interface_gap_order: OrderEstimate,
    /// `2·stderr(a)` plus an estimate of the interface discretization error.
    pub intercept_error_bound: f64,
    pub diagnostics: Option<DiagnosticsSeries>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub interface: InterfaceSpec,
    pub coeff: TwoPhaseCoeff,
    pub solver_path: SolverPath,
    pub epsilons: Vec<f64>,
    pub fit_degree: usize,
    /// `(k, λ_k, cluster id)` of the interface spectrum.
    pub interface_spectrum: Vec<(usize, f64, usize)>,
    pub per_k: Vec<KReport>,
    /// Every computed eigenvalue at every `ε`.
    pub results: Vec<ResultRow>,
}

impl SweepReport {
    pub fn k(&self, k: usize) -> Option<&KReport> {
        self.per_k.iter().find(|r| r.k == k)
    }
}

/// Number of shell eigenvalues needed so the clusters of all `ks` are
/// complete.
fn shell_count(spectrum: &Spectrum, ks: &[usize]) -> Result<usize> {
    let mut n = 0;
    for &k in ks {
        let c = spectrum.cluster_of(k)?;
        n = n.max(c.first + c.multiplicity - 1);
    }
    Ok(n)
}

/// Rough interface discretization error of `λ_k` (zero for spheres).
fn interface_error(cfg: &SweepConfig, spectrum: &Spectrum, k: usize) -> Result<f64> {
    match &cfg.interface {
        InterfaceSpec::Sphere { .. } => Ok(0.0),
        spec @ InterfaceSpec::PlaneCurve(_) => {
            let coarse = Arc::new(CurveMesh1D::uniform((cfg.solver.interface_elements / 2).max(16))?);
            let s = curve_spectrum(spec, coarse, spectrum.len())?;
            // quadratic elements: error ratio 16 per halving
            Ok((s.eigenvalue(k)? - spectrum.eigenvalue(k)?).abs() / 15.0)
        }
    }
}

pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepReport> {
    cfg.validate()?;
    let kmax = *cfg.ks.iter().max().expect("validated non-empty");
    let spectrum = interface_spectrum(&cfg.interface, kmax, &cfg.solver)?;
    let count = shell_count(&spectrum, &cfg.ks)?;
    let results: Vec<ShellEigenResult> =
        cfg.epsilons.par_iter().map(|&e| solve_at(cfg, e, count)).collect::<Result<_>>()?;

    let mut per_k = Vec::with_capacity(cfg.ks.len());
    for &k in &cfg.ks {
        // index tracking along the decreasing grid
        let mut idx = vec![k; results.len()];
        idx[0] = track_eigenvalue(&results[0], &results[0], k)?;
        for i in 1..results.len() {
            idx[i] = track_eigenvalue(&results[i - 1], &results[i], k)?;
        }
        let values: Vec<(f64, f64)> =
            results.iter().zip(&idx).map(|(r, &j)| (r.epsilon, r.eigenvalues[j - 1])).collect();

        let prediction = predict(&cfg.interface, &cfg.coeff, &spectrum, k)?;
        let branch_prediction = if prediction.slope.is_none() {
            predict_branch(&cfg.interface, &cfg.coeff, &spectrum, k).ok()
        } else {
            None
        };
        let reference = prediction.slope.map(|s| (s, prediction.slope_source)).or_else(|| {
            branch_prediction.as_ref().and_then(|b| b.slope.map(|s| (s, b.slope_source)))
        });

        let fitted = fit_orders(&values, cfg.fit_degree, reference.is_some())?;
        let fit_linear = poly_fit(&values, 1)?;
        let fit = fitted.fit.clone();
        let a = fit.intercept();
        let b = fit.slope();
        let points = values
            .iter()
            .zip(&idx)
            .zip(&fit.residuals)
            .map(|(((e, l), &j), r)| SeriesPoint { epsilon: *e, index: j, lambda: *l, fitted: fit.eval(*e), residual: *r })
            .collect();
        let lead = prediction.leading;
        let deviations = Deviations {
            intercept_abs: (a - lead).abs(),
            intercept_rel: relative(a, lead),
            slope_abs: reference.map(|(s, _)| (b - s).abs()),
            slope_rel: reference.and_then(|(s, _)| relative(b, s)),
            slope_reference: reference.map(|(_, src)| src),
        };
        let gap: Vec<(f64, f64)> = values.iter().map(|(e, l)| (*e, l - lead)).collect();
        let interface_gap_order = log_log_order(&gap, noise_floor(lead));
        let intercept_error_bound = 2.0 * fit.std_errors[0] + interface_error(cfg, &spectrum, k)? + noise_floor(lead);

        let diagnostics = match cfg.diagnostics {
            None => None,
            Some(d) => Some(diagnostics_series(&results, &idx, &spectrum, d)?),
        };
        per_k.push(KReport {
            k,
            points,
            fit,
            fit_linear,
            prediction,
            branch_prediction,
            deviations,
            remainder_order: fitted.order_estimate,
            interface_gap_order,
            intercept_error_bound,
            diagnostics,
        });
    }
    Ok(SweepReport {
        interface: cfg.interface.clone(),
        coeff: cfg.coeff,
        solver_path: cfg.path(),
        epsilons: cfg.epsilons.clone(),
        fit_degree: cfg.fit_degree,
        interface_spectrum: spectrum.rows(),
        per_k,
        results: results.iter().flat_map(|r| r.rows()).collect(),
    })
}

fn diagnostics_series(
    results: &[ShellEigenResult],
    idx: &[usize],
    spectrum: &Spectrum,
    d: DiagnosticsConfig,
) -> Result<DiagnosticsSeries> {
    let tables = results
        .par_iter()
        .zip(idx)
        .map(|(r, &j)| {
            fourier_diagnostics(r, spectrum, j, d.p_max.min(spectrum.len()), d.l_max)
                .map_err(|e| Error::AtEpsilon { epsilon: r.epsilon, source: Box::new(e) })
        })
        .collect::<Result<Vec<_>>>()?;
    let epsilons: Vec<f64> = results.iter().map(|r| r.epsilon).collect();
    let transverse_tail: Vec<f64> = tables.iter().map(|t| t.transverse_tail).collect();
    let l1_deviation: Vec<f64> = tables.iter().map(|t| t.interface_l1_sum - 1.0).collect();
    let cluster_l1 = tables.iter().map(|t| t.cluster_l1_sum).collect();
    let pts = |v: &[f64]| epsilons.iter().zip(v).map(|(e, x)| (*e, *x)).collect::<Vec<_>>();
    Ok(DiagnosticsSeries {
        tail_order: log_log_order(&pts(&transverse_tail), 1e-15),
        l1_deviation_order: log_log_order(&pts(&l1_deviation), 1e-13),
        epsilons,
        transverse_tail,
        l1_deviation,
        cluster_l1,
        alpha: tables.iter().map(|t| t.alpha.clone()).collect(),
    })
}
