//! TOML experiment configuration.
//!
//! ```toml
//! scenario = "circle-two-phase"
//!
//! [interface]
//! kind = "circle"          # sphere | circle | ellipse | curve
//! radius = 1.0
//!
//! [coefficients]
//! sigma_minus = 1.0
//! sigma_plus = 2.0
//!
//! [sweep]
//! ks = [2, 3]
//! epsilons = [0.08, 0.04, 0.02, 0.01, 0.005]
//! fit_degree = 2
//!
//! [[thresholds]]
//! kind = "intercept_vs_prediction"
//! k = 2
//! max_abs = 1e-3
//! ```
//!
//! Unknown keys are rejected everywhere.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thinshell::geometry::{reach, InterfaceSpec, PlaneCurve};
use thinshell::shell_solver::{SolverPath, TwoPhaseCoeff};
use thinshell::sweep::{default_epsilons, DiagnosticsConfig, SolverSettings, SweepConfig};

use crate::error::{io_err, CliError, Result};
use crate::thresholds::Threshold;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InterfaceConfig {
    Sphere { dim_n: usize, radius: f64 },
    Circle { radius: f64 },
    Ellipse { a: f64, b: f64 },
    /// Fourier coefficients `[a_j, b_j]` of `x(θ)` and `y(θ)`, `j = 0, 1, …`.
    Curve { x: Vec<[f64; 2]>, y: Vec<[f64; 2]> },
}

impl InterfaceConfig {
    pub fn to_spec(&self) -> thinshell::Result<InterfaceSpec> {
        match self {
            InterfaceConfig::Sphere { dim_n, radius } => InterfaceSpec::sphere(*dim_n, *radius),
            InterfaceConfig::Circle { radius } => InterfaceSpec::circle(*radius),
            InterfaceConfig::Ellipse { a, b } => Ok(InterfaceSpec::PlaneCurve(PlaneCurve::ellipse(*a, *b)?)),
            InterfaceConfig::Curve { x, y } => {
                let pairs = |v: &[[f64; 2]]| v.iter().map(|p| (p[0], p[1])).collect();
                Ok(InterfaceSpec::PlaneCurve(PlaneCurve::new(pairs(x), pairs(y))?))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoefficientConfig {
    pub sigma_minus: f64,
    pub sigma_plus: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    #[serde(default)]
    pub ks: Vec<usize>,
    /// Defaults to the standard grid, scaled to the interface reach.
    pub epsilons: Option<Vec<f64>>,
    pub fit_degree: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeshSection {
    pub path: Option<SolverPath>,
    pub radial_elements: Option<usize>,
    pub collar_m_xi: Option<usize>,
    pub collar_m_tau: Option<usize>,
    pub unknown_cap: Option<usize>,
    pub interface_elements: Option<usize>,
    pub l_max: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumSection {
    /// Number of interface eigenvalues for `spectrum`; defaults to the
    /// largest k, or 6.
    pub count: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagnosticsSection {
    #[serde(default = "default_p_max")]
    pub p_max: usize,
    #[serde(default = "default_l_max")]
    pub l_max: usize,
}

fn default_p_max() -> usize {
    5
}

fn default_l_max() -> usize {
    6
}

impl Default for DiagnosticsSection {
    fn default() -> Self {
        Self { p_max: default_p_max(), l_max: default_l_max() }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Flags {
    #[serde(default)]
    pub dump_eigenfunctions: bool,
    #[serde(default)]
    pub oracle_check: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scenario: String,
    pub interface: InterfaceConfig,
    pub coefficients: CoefficientConfig,
    #[serde(default)]
    pub sweep: SweepSection,
    #[serde(default)]
    pub mesh: MeshSection,
    #[serde(default)]
    pub spectrum: SpectrumSection,
    /// Present section enables Fourier diagnostics in `sweep`.
    pub diagnostics: Option<DiagnosticsSection>,
    #[serde(default)]
    pub output: OutputSection,
    #[serde(default)]
    pub flags: Flags,
    #[serde(default)]
    pub thresholds: Vec<Threshold>,
}

/// A parsed config together with its source, for line-numbered errors.
#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub path: PathBuf,
    pub source: String,
    pub config: ExperimentConfig,
}

/// 1-based line of `key = …` inside `[section]` (or the top level when
/// `section` is empty); the section header line when the key is absent.
pub fn locate(source: &str, section: &str, key: &str) -> Option<usize> {
    let mut current = String::new();
    let mut header = None;
    for (i, raw) in source.lines().enumerate() {
        let line = raw.trim();
        if line.starts_with('[') {
            current = line.trim_matches(|c| c == '[' || c == ']').trim().to_string();
            if current == section && header.is_none() {
                header = Some(i + 1);
            }
            continue;
        }
        if current == section {
            if let Some(rest) = line.strip_prefix(key) {
                if rest.trim_start().starts_with('=') {
                    return Some(i + 1);
                }
            }
        }
    }
    header
}

fn line_of(source: &str, offset: usize) -> usize {
    source[..offset.min(source.len())].matches('\n').count() + 1
}

/// Line of a parse error. Tagged tables report the span of the whole table,
/// so an unknown field is looked up in the table that starts there.
fn error_line(source: &str, span: std::ops::Range<usize>, message: &str) -> usize {
    let unknown = message.strip_prefix("unknown field `").and_then(|m| m.split('`').next());
    if let Some(key) = unknown {
        let start = source[..span.start.min(source.len())].rfind('\n').map_or(0, |i| i + 1);
        let mut offset = start;
        for (i, line) in source[start..].split_inclusive('\n').enumerate() {
            if i > 0 && line.trim_start().starts_with('[') {
                break;
            }
            if let Some(rest) = line.trim_start().strip_prefix(key) {
                if rest.trim_start().starts_with('=') {
                    return line_of(source, offset);
                }
            }
            offset += line.len();
        }
    }
    line_of(source, span.start)
}

impl LoadedConfig {
    pub fn from_str(path: impl Into<PathBuf>, source: String) -> Result<Self> {
        let path = path.into();
        let config: ExperimentConfig = toml::from_str(&source).map_err(|e| CliError::Config {
            line: e.span().map(|s| error_line(&source, s, e.message())),
            path: path.clone(),
            message: e.message().to_string(),
        })?;
        let loaded = LoadedConfig { path, source, config };
        loaded.check()?;
        Ok(loaded)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let source = std::fs::read_to_string(path).map_err(io_err(path))?;
        Self::from_str(path, source)
    }

    fn error(&self, section: &str, key: &str, message: impl Into<String>) -> CliError {
        CliError::Config { path: self.path.clone(), line: locate(&self.source, section, key), message: message.into() }
    }

    /// Semantic checks with line numbers, before the library's own checks.
    fn check(&self) -> Result<()> {
        let c = &self.config;
        if c.scenario.trim().is_empty() {
            return Err(self.error("", "scenario", "scenario name must not be empty"));
        }
        let spec = c.interface.to_spec().map_err(|e| self.error("interface", "kind", e.to_string()))?;
        TwoPhaseCoeff::new(c.coefficients.sigma_minus, c.coefficients.sigma_plus)
            .map_err(|e| self.error("coefficients", "sigma_minus", e.to_string()))?;
        if c.sweep.ks.contains(&0) {
            return Err(self.error("sweep", "ks", "eigenvalue indices are 1-based"));
        }
        if let Some(eps) = &c.sweep.epsilons {
            if eps.len() < 4 {
                return Err(self.error("sweep", "epsilons", format!("need at least 4 values, got {}", eps.len())));
            }
            if eps.windows(2).any(|w| !(w[1] < w[0])) || !(eps[eps.len() - 1] > 0.0) {
                return Err(self.error("sweep", "epsilons", "values must be positive and strictly decreasing"));
            }
            let r = reach(&spec);
            if eps[0] >= r {
                return Err(self.error("sweep", "epsilons", format!("largest epsilon {} is not below the reach {r:.6}", eps[0])));
            }
        }
        if let Some(d) = c.sweep.fit_degree {
            if !(1..=2).contains(&d) {
                return Err(self.error("sweep", "fit_degree", format!("must be 1 or 2, got {d}")));
            }
        }
        if let Some(m) = c.mesh.collar_m_tau {
            if m < 2 || m % 2 != 0 {
                return Err(self.error("mesh", "collar_m_tau", format!("must be even and >= 2, got {m}")));
            }
        }
        for (key, v) in [
            ("radial_elements", c.mesh.radial_elements),
            ("collar_m_xi", c.mesh.collar_m_xi),
            ("interface_elements", c.mesh.interface_elements),
        ] {
            if v == Some(0) {
                return Err(self.error("mesh", key, "must be positive"));
            }
        }
        for t in &c.thresholds {
            t.validate().map_err(|m| self.error("thresholds", "kind", m))?;
        }
        self.sweep_config()?.validate().map_err(|e| self.error("sweep", "ks", e.to_string()))?;
        Ok(())
    }

    pub fn interface(&self) -> Result<InterfaceSpec> {
        self.config.interface.to_spec().map_err(|e| self.error("interface", "kind", e.to_string()))
    }

    pub fn solver_settings(&self) -> SolverSettings {
        let m = &self.config.mesh;
        let mut s = SolverSettings { path: m.path, l_max: m.l_max, ..Default::default() };
        if let Some(v) = m.radial_elements {
            s.radial.elements_per_side = v;
        }
        if let Some(v) = m.collar_m_xi {
            s.collar.m_xi = v;
        }
        if let Some(v) = m.collar_m_tau {
            s.collar.m_tau = v;
        }
        if let Some(v) = m.unknown_cap {
            s.collar.unknown_cap = v;
        }
        if let Some(v) = m.interface_elements {
            s.interface_elements = v;
        }
        s
    }

    /// Sweep configuration; an empty `ks` list defaults to `[2]`.
    pub fn sweep_config(&self) -> Result<SweepConfig> {
        let c = &self.config;
        let spec = self.interface()?;
        let coeff = TwoPhaseCoeff { sigma_minus: c.coefficients.sigma_minus, sigma_plus: c.coefficients.sigma_plus };
        let ks = if c.sweep.ks.is_empty() { vec![2] } else { c.sweep.ks.clone() };
        let mut cfg = SweepConfig::new(spec.clone(), coeff, ks);
        cfg.epsilons = c.sweep.epsilons.clone().unwrap_or_else(|| default_epsilons(&spec));
        cfg.fit_degree = c.sweep.fit_degree.unwrap_or(2);
        cfg.solver = self.solver_settings();
        cfg.diagnostics = c.diagnostics.as_ref().map(|d| DiagnosticsConfig { p_max: d.p_max, l_max: d.l_max });
        Ok(cfg)
    }

    pub fn spectrum_count(&self) -> usize {
        let c = &self.config;
        c.spectrum.count.unwrap_or_else(|| c.sweep.ks.iter().copied().max().unwrap_or(6).max(1))
    }

    pub fn output_dir(&self, overridden: Option<&Path>) -> PathBuf {
        overridden
            .map(Path::to_path_buf)
            .or_else(|| self.config.output.dir.clone())
            .unwrap_or_else(|| PathBuf::from("out").join(&self.config.scenario))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
scenario = "t"

[interface]
kind = "circle"
radius = 1.0

[coefficients]
sigma_minus = 1.0
sigma_plus = 2.0
"#;

    #[test]
    fn minimal_config_uses_defaults() {
        let l = LoadedConfig::from_str("t.toml", MINIMAL.into()).unwrap();
        let s = l.sweep_config().unwrap();
        assert_eq!(s.ks, vec![2]);
        assert_eq!(s.epsilons, vec![0.08, 0.04, 0.02, 0.01, 0.005]);
        assert_eq!(s.fit_degree, 2);
        assert_eq!(l.output_dir(None), PathBuf::from("out/t"));
        assert_eq!(l.spectrum_count(), 6);
    }

    #[test]
    fn unknown_keys_are_rejected_with_a_line() {
        let src = MINIMAL.replace("radius = 1.0", "radius = 1.0\ncolour = \"red\"");
        let e = LoadedConfig::from_str("t.toml", src).unwrap_err();
        match e {
            CliError::Config { line, message, .. } => {
                assert_eq!(line, Some(7), "{message}");
                assert!(message.contains("colour"), "{message}");
            }
            other => panic!("{other}"),
        }
        let src = format!("{MINIMAL}\n[output]\ndirectory = \"x\"\n");
        assert!(matches!(LoadedConfig::from_str("t.toml", src), Err(CliError::Config { .. })));
    }

    #[test]
    fn semantic_errors_point_at_their_key() {
        let src = format!("{MINIMAL}\n[sweep]\nks = [2]\nepsilons = [0.1, 0.2, 0.05, 0.01]\n");
        match LoadedConfig::from_str("t.toml", src).unwrap_err() {
            CliError::Config { line, .. } => assert_eq!(line, Some(14)),
            other => panic!("{other}"),
        }
        let src = MINIMAL.replace("sigma_plus = 2.0", "sigma_plus = -2.0");
        match LoadedConfig::from_str("t.toml", src).unwrap_err() {
            CliError::Config { line, .. } => assert_eq!(line, Some(9)),
            other => panic!("{other}"),
        }
    }

    #[test]
    fn locate_finds_keys_in_sections() {
        let src = "a = 1\n[s]\nb = 2\n[t]\nb = 3\n";
        assert_eq!(locate(src, "", "a"), Some(1));
        assert_eq!(locate(src, "s", "b"), Some(3));
        assert_eq!(locate(src, "t", "b"), Some(5));
        assert_eq!(locate(src, "t", "zz"), Some(4));
        assert_eq!(locate(src, "u", "b"), None);
    }
}
