//! Subcommand implementations. Every command writes into one output
//! directory; all files except `metadata.json` are byte-identical across
//! runs of the same config.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::Serialize;
use thinshell::geometry::InterfaceSpec;
use thinshell::interface_spectrum::{curve_spectrum, CurveMesh1D, Spectrum};
use thinshell::shell_solver::{shooting_oracle, RadialProblem, ShellEigenResult, ShellMode};
use thinshell::sweep::{interface_spectrum, run_sweep, solve_at, SweepConfig, SweepReport};

use crate::config::LoadedConfig;
use crate::error::Result;
use crate::output::{ensure_dir, fmt_f, fmt_opt, write_csv, write_json};
use crate::thresholds::ThresholdResult;

/// Relative agreement required by `--oracle-check`.
pub const ORACLE_TOLERANCE: f64 = 1e-6;

/// Samples per axis in eigenfunction dumps.
const DUMP_THETA: usize = 128;
const DUMP_TAU: usize = 21;

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub out: Option<PathBuf>,
    pub dump_eigenfunctions: bool,
    pub oracle_check: bool,
    pub threads: Option<usize>,
}

/// Result of a command that ran to completion.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub out_dir: PathBuf,
    /// Human-readable descriptions of failed thresholds or oracle checks.
    pub violations: Vec<String>,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Serialize)]
struct Metadata<'a> {
    command: &'a str,
    scenario: &'a str,
    config: String,
    version: &'static str,
    threads: usize,
    unix_time: u64,
    elapsed_seconds: f64,
}

fn write_metadata(dir: &Path, command: &str, loaded: &LoadedConfig, started: Instant) -> Result<()> {
    let meta = Metadata {
        command,
        scenario: &loaded.config.scenario,
        config: loaded.path.display().to_string(),
        version: env!("CARGO_PKG_VERSION"),
        threads: rayon::current_num_threads(),
        unix_time: SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0),
        elapsed_seconds: started.elapsed().as_secs_f64(),
    };
    write_json(&dir.join("metadata.json"), &meta)
}

fn prepare(loaded: &LoadedConfig, opts: &RunOptions) -> Result<PathBuf> {
    let dir = loaded.output_dir(opts.out.as_deref());
    ensure_dir(&dir)?;
    Ok(dir)
}

fn want_dump(loaded: &LoadedConfig, opts: &RunOptions) -> bool {
    opts.dump_eigenfunctions || loaded.config.flags.dump_eigenfunctions
}

fn want_oracle(loaded: &LoadedConfig, opts: &RunOptions) -> bool {
    opts.oracle_check || loaded.config.flags.oracle_check
}

fn spectrum_rows(spectrum: &Spectrum, count: usize) -> Vec<Vec<String>> {
    spectrum
        .rows()
        .into_iter()
        .take(count)
        .map(|(k, l, c)| {
            let m = spectrum.cluster_of(k).map(|c| c.multiplicity).unwrap_or(1);
            vec![k.to_string(), fmt_f(l), c.to_string(), m.to_string()]
        })
        .collect()
}

/// `spectrum`: the first `count` interface eigenvalues.
pub fn spectrum(loaded: &LoadedConfig, opts: &RunOptions) -> Result<Outcome> {
    let started = Instant::now();
    let dir = prepare(loaded, opts)?;
    let spec = loaded.interface()?;
    let count = loaded.spectrum_count();
    let s = interface_spectrum(&spec, count, &loaded.solver_settings())?;
    write_csv(&dir.join("spectrum.csv"), &["k", "lambda", "cluster", "multiplicity"], spectrum_rows(&s, count))?;
    let mut violations = Vec::new();
    if want_oracle(loaded, opts) {
        let cfg = loaded.sweep_config()?;
        let ks: Vec<usize> = (1..=count).collect();
        violations.extend(curve_oracle(&cfg, &s, &ks, &dir)?);
    }
    for (k, l, c) in s.rows().into_iter().take(count) {
        println!("k={k:<3} lambda={l:.12} cluster={c}");
    }
    write_metadata(&dir, "spectrum", loaded, started)?;
    Ok(Outcome { out_dir: dir, violations })
}

#[derive(Serialize)]
struct ThresholdReport<'a> {
    thresholds: &'a [ThresholdResult],
    passed: bool,
}

fn evaluate_thresholds(loaded: &LoadedConfig, report: &SweepReport, dir: &Path) -> Result<Vec<String>> {
    let results: Vec<ThresholdResult> = loaded.config.thresholds.iter().map(|t| t.evaluate(report)).collect();
    if results.is_empty() {
        return Ok(Vec::new());
    }
    write_csv(
        &dir.join("thresholds.csv"),
        &["name", "k", "value", "limit", "pass", "note"],
        results.iter().map(|r| {
            vec![r.name.clone(), r.k.to_string(), fmt_opt(r.value), r.limit.clone(), r.pass.to_string(), r.note.clone()]
        }),
    )?;
    let passed = results.iter().all(|r| r.pass);
    write_json(&dir.join("thresholds.json"), &ThresholdReport { thresholds: &results, passed })?;
    let mut violations = Vec::new();
    for r in &results {
        let value = r.value.map(|v| format!("{v:.6e}")).unwrap_or_else(|| "n/a".into());
        let status = if r.pass { "PASS" } else { "FAIL" };
        println!("{status} {} k={} value={value} limit={} {}", r.name, r.k, r.limit, r.note);
        if !r.pass {
            violations.push(format!("{} k={} value={value} limit={}", r.name, r.k, r.limit));
        }
    }
    Ok(violations)
}

fn write_sweep_files(report: &SweepReport, dir: &Path) -> Result<()> {
    write_json(&dir.join("report.json"), report)?;
    write_csv(
        &dir.join("results.csv"),
        &["epsilon", "k", "lambda", "solver_path", "mesh", "residual"],
        report.results.iter().map(|r| {
            vec![fmt_f(r.epsilon), r.k.to_string(), fmt_f(r.lambda), r.solver_path.to_string(), r.mesh.clone(), fmt_f(r.residual)]
        }),
    )?;
    for r in &report.per_k {
        write_csv(
            &dir.join(format!("k{}.csv", r.k)),
            &["epsilon", "index", "lambda", "fitted", "residual"],
            r.points.iter().map(|p| {
                vec![fmt_f(p.epsilon), p.index.to_string(), fmt_f(p.lambda), fmt_f(p.fitted), fmt_f(p.residual)]
            }),
        )?;
    }
    write_csv(
        &dir.join("summary.csv"),
        &[
            "k",
            "lambda_interface",
            "a",
            "a_stderr",
            "a_predicted",
            "a_deviation",
            "a_bound",
            "b",
            "b_stderr",
            "b_predicted",
            "b_source",
            "b_rel_deviation",
            "remainder_order",
            "interface_gap_order",
        ],
        report.per_k.iter().map(|r| {
            let reference = r.prediction.slope.map(|s| (s, r.prediction.slope_source)).or_else(|| {
                r.branch_prediction.as_ref().and_then(|b| b.slope.map(|s| (s, b.slope_source)))
            });
            vec![
                r.k.to_string(),
                fmt_f(r.prediction.lambda_interface),
                fmt_f(r.fit.intercept()),
                fmt_f(r.fit.std_errors[0]),
                fmt_f(r.prediction.leading),
                fmt_f(r.deviations.intercept_abs),
                fmt_f(r.intercept_error_bound),
                fmt_f(r.fit.slope()),
                fmt_f(r.fit.std_errors[1]),
                fmt_opt(reference.map(|x| x.0)),
                reference.map(|x| format!("{:?}", x.1)).unwrap_or_default(),
                fmt_opt(r.deviations.slope_rel),
                fmt_opt(r.remainder_order.order),
                fmt_opt(r.interface_gap_order.order),
            ]
        }),
    )?;
    Ok(())
}

fn print_summary(report: &SweepReport) {
    println!("solver path: {}   epsilons: {:?}", report.solver_path, report.epsilons);
    for r in &report.per_k {
        let pred = r
            .prediction
            .slope
            .or_else(|| r.branch_prediction.as_ref().and_then(|b| b.slope))
            .map(|s| format!("{s:.6}"))
            .unwrap_or_else(|| "n/a".into());
        let order = r.remainder_order.order.map(|o| format!("{o:.3}")).unwrap_or_else(|| "n/a".into());
        println!(
            "k={:<3} a={:.10} (pred {:.10})  b={:.6} +- {:.1e} (pred {pred})  remainder order {order}",
            r.k,
            r.fit.intercept(),
            r.prediction.leading,
            r.fit.slope(),
            r.fit.std_errors[1],
        );
    }
}

fn write_diagnostics_files(report: &SweepReport, dir: &Path) -> Result<()> {
    let mut alpha_rows = Vec::new();
    let mut tail_rows = Vec::new();
    #[derive(Serialize)]
    struct DiagSummary {
        k: usize,
        tail_order: Option<f64>,
        l1_deviation_order: Option<f64>,
        epsilons: Vec<f64>,
        transverse_tail: Vec<f64>,
        l1_deviation: Vec<f64>,
        cluster_l1: Vec<f64>,
    }
    let mut summary = Vec::new();
    for r in &report.per_k {
        let Some(d) = &r.diagnostics else { continue };
        for (i, &eps) in d.epsilons.iter().enumerate() {
            for (p, row) in d.alpha[i].iter().enumerate() {
                for (l, &a) in row.iter().enumerate() {
                    alpha_rows.push(vec![fmt_f(eps), r.k.to_string(), (p + 1).to_string(), (l + 1).to_string(), fmt_f(a)]);
                }
            }
            tail_rows.push(vec![
                r.k.to_string(),
                fmt_f(eps),
                fmt_f(d.transverse_tail[i]),
                fmt_f(d.l1_deviation[i]),
                fmt_f(d.cluster_l1[i]),
            ]);
        }
        summary.push(DiagSummary {
            k: r.k,
            tail_order: d.tail_order.order,
            l1_deviation_order: d.l1_deviation_order.order,
            epsilons: d.epsilons.clone(),
            transverse_tail: d.transverse_tail.clone(),
            l1_deviation: d.l1_deviation.clone(),
            cluster_l1: d.cluster_l1.clone(),
        });
        let t = d.tail_order.order.map(|o| format!("{o:.3}")).unwrap_or_else(|| "n/a".into());
        let l1 = d.l1_deviation_order.order.map(|o| format!("{o:.3}")).unwrap_or_else(|| "n/a".into());
        println!("k={:<3} transverse tail order {t}   l=1 deviation order {l1}", r.k);
    }
    write_csv(&dir.join("alpha_table.csv"), &["epsilon", "k", "p", "l", "alpha"], alpha_rows)?;
    write_csv(&dir.join("tails.csv"), &["k", "epsilon", "transverse_tail", "l1_deviation", "cluster_l1"], tail_rows)?;
    write_json(&dir.join("diagnostics.json"), &summary)
}

/// Shell eigenvalue count that keeps the clusters of all `ks` complete.
fn shell_count(cfg: &SweepConfig) -> Result<usize> {
    let kmax = cfg.ks.iter().copied().max().unwrap_or(1);
    let s = interface_spectrum(&cfg.interface, kmax, &cfg.solver)?;
    let mut n = 0;
    for &k in &cfg.ks {
        let c = s.cluster_of(k)?;
        n = n.max(c.first + c.multiplicity - 1);
    }
    Ok(n)
}

/// `Φ̃_k(θ, τ)` along `θ ↦ (π/3, …, π/3, θ)` at the finest `ε`; the
/// polar angle avoids the nodal equator of low harmonics.
fn dump_eigenfunctions(cfg: &SweepConfig, dir: &Path) -> Result<()> {
    let eps = *cfg.epsilons.last().expect("validated");
    let shell = solve_at(cfg, eps, shell_count(cfg)?)?;
    let polar = cfg.interface.ambient_dim().saturating_sub(2);
    for &k in &cfg.ks {
        let mode = &shell.modes[k - 1];
        let mut rows = Vec::with_capacity(DUMP_THETA * DUMP_TAU);
        for i in 0..DUMP_THETA {
            let theta = 2.0 * PI * i as f64 / DUMP_THETA as f64;
            let mut xi = vec![PI / 3.0; polar];
            xi.push(theta);
            for j in 0..DUMP_TAU {
                let tau = -1.0 + 2.0 * j as f64 / (DUMP_TAU - 1) as f64;
                rows.push(vec![fmt_f(theta), fmt_f(tau), fmt_f(mode.value(&xi, tau))]);
            }
        }
        write_csv(&dir.join(format!("eigenfunction_k{k}.csv")), &["theta", "tau", "value"], rows)?;
    }
    Ok(())
}

fn rel_diff(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-6)
}

/// Spheres: every radial shell eigenvalue against the shooting oracle.
fn sphere_oracle(cfg: &SweepConfig, dir: &Path) -> Result<Vec<String>> {
    let InterfaceSpec::Sphere { dim_n, radius } = cfg.interface else { return Ok(Vec::new()) };
    let count = shell_count(cfg)?;
    let mut rows = Vec::new();
    let mut violations = Vec::new();
    for &eps in &cfg.epsilons {
        let shell: ShellEigenResult = solve_at(cfg, eps, count)?;
        let mut oracle: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
        for (i, mode) in shell.modes.iter().enumerate() {
            let ShellMode::Radial(m) = mode else { continue };
            if !oracle.contains_key(&m.degree) {
                let p = RadialProblem::new(dim_n, radius, m.degree, eps, cfg.coeff, &cfg.solver.radial)?;
                let needed = shell
                    .modes
                    .iter()
                    .filter_map(|x| match x {
                        ShellMode::Radial(y) if y.degree == m.degree => Some(y.radial_index + 1),
                        _ => None,
                    })
                    .max()
                    .unwrap_or(1);
                oracle.insert(m.degree, shooting_oracle(&p, needed)?);
            }
            let reference = oracle[&m.degree][m.radial_index];
            let d = rel_diff(shell.eigenvalues[i], reference);
            let pass = d <= ORACLE_TOLERANCE;
            if !pass {
                violations.push(format!("oracle eps={eps} k={} rel diff {d:.3e}", i + 1));
            }
            rows.push(vec![
                fmt_f(eps),
                (i + 1).to_string(),
                m.degree.to_string(),
                fmt_f(shell.eigenvalues[i]),
                fmt_f(reference),
                fmt_f(d),
                pass.to_string(),
            ]);
        }
    }
    write_csv(&dir.join("oracle_check.csv"), &["epsilon", "k", "degree", "lambda", "oracle", "rel_diff", "pass"], rows)?;
    Ok(violations)
}

/// Curves: interface eigenvalues against a mesh refined twice over.
fn curve_oracle(cfg: &SweepConfig, spectrum: &Spectrum, ks: &[usize], dir: &Path) -> Result<Vec<String>> {
    if !matches!(cfg.interface, InterfaceSpec::PlaneCurve(_)) {
        return Ok(Vec::new());
    }
    let fine = Arc::new(CurveMesh1D::uniform(2 * cfg.solver.interface_elements)?);
    let refined = curve_spectrum(&cfg.interface, fine, spectrum.len())?;
    let mut rows = Vec::new();
    let mut violations = Vec::new();
    for &k in ks {
        let (a, b) = (spectrum.eigenvalue(k)?, refined.eigenvalue(k)?);
        let d = rel_diff(a, b);
        let pass = d <= ORACLE_TOLERANCE;
        if !pass {
            violations.push(format!("oracle k={k} rel diff {d:.3e}"));
        }
        rows.push(vec![k.to_string(), fmt_f(a), fmt_f(b), fmt_f(d), pass.to_string()]);
    }
    write_csv(&dir.join("oracle_check.csv"), &["k", "lambda", "lambda_refined", "rel_diff", "pass"], rows)?;
    Ok(violations)
}

fn oracle_check(cfg: &SweepConfig, report: &SweepReport, dir: &Path) -> Result<Vec<String>> {
    match cfg.interface {
        InterfaceSpec::Sphere { .. } => sphere_oracle(cfg, dir),
        InterfaceSpec::PlaneCurve(_) => {
            let kmax = cfg.ks.iter().copied().max().unwrap_or(1);
            let s = interface_spectrum(&cfg.interface, kmax, &cfg.solver)?;
            debug_assert_eq!(s.len(), report.interface_spectrum.len());
            curve_oracle(cfg, &s, &cfg.ks, dir)
        }
    }
}

fn sweep_common(loaded: &LoadedConfig, opts: &RunOptions, cfg: SweepConfig, command: &str) -> Result<Outcome> {
    let started = Instant::now();
    let dir = prepare(loaded, opts)?;
    log::info!("{command}: {} at {} epsilons", loaded.config.scenario, cfg.epsilons.len());
    let report = run_sweep(&cfg)?;
    write_sweep_files(&report, &dir)?;
    print_summary(&report);
    if cfg.diagnostics.is_some() {
        write_diagnostics_files(&report, &dir)?;
    }
    if want_dump(loaded, opts) {
        dump_eigenfunctions(&cfg, &dir)?;
    }
    let mut violations = evaluate_thresholds(loaded, &report, &dir)?;
    if want_oracle(loaded, opts) {
        violations.extend(oracle_check(&cfg, &report, &dir)?);
    }
    write_metadata(&dir, command, loaded, started)?;
    Ok(Outcome { out_dir: dir, violations })
}

/// `sweep`: fits and thresholds; Fourier diagnostics when configured or
/// when a threshold needs them.
pub fn sweep(loaded: &LoadedConfig, opts: &RunOptions) -> Result<Outcome> {
    let mut cfg = loaded.sweep_config()?;
    if cfg.diagnostics.is_none() && loaded.config.thresholds.iter().any(|t| t.needs_diagnostics()) {
        let d = crate::config::DiagnosticsSection::default();
        cfg.diagnostics = Some(thinshell::sweep::DiagnosticsConfig { p_max: d.p_max, l_max: d.l_max });
    }
    sweep_common(loaded, opts, cfg, "sweep")
}

/// `diagnostics`: a sweep with Fourier diagnostics always enabled.
pub fn diagnostics(loaded: &LoadedConfig, opts: &RunOptions) -> Result<Outcome> {
    let mut cfg = loaded.sweep_config()?;
    let d = loaded.config.diagnostics.clone().unwrap_or_default();
    cfg.diagnostics = Some(thinshell::sweep::DiagnosticsConfig { p_max: d.p_max, l_max: d.l_max });
    sweep_common(loaded, opts, cfg, "diagnostics")
}
