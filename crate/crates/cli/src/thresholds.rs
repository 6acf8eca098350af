//! Pass/fail thresholds on sweep results.

use serde::{Deserialize, Serialize};
use thinshell::sweep::{KReport, SweepReport};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Threshold {
    /// `|a − (σ₋+σ₊)/2·λ_k| ≤ max_abs`.
    InterceptVsPrediction { k: usize, max_abs: f64 },
    /// Slope against the closed-form or branch prediction.
    SlopeVsPrediction { k: usize, max_rel: Option<f64>, max_abs: Option<f64> },
    /// `|b| ≤ max`, for null-slope scenarios.
    SlopeAbsMax { k: usize, max: f64 },
    /// Estimated order of `λ − a − bε` at least `min`.
    RemainderOrderMin { k: usize, min: f64 },
    /// Estimated order of `|λ_{k,ε} − (σ₋+σ₊)/2·λ_k|` at least `min`.
    InterfaceGapOrderMin { k: usize, min: f64 },
    /// Transverse tail order inside `[min, max]`.
    TailOrderRange { k: usize, min: f64, max: f64 },
    /// Order of the `l = 1` mass deviation at least `min`.
    L1DeviationOrderMin { k: usize, min: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdResult {
    pub name: String,
    pub k: usize,
    /// Measured value, `None` when it could not be estimated.
    pub value: Option<f64>,
    pub limit: String,
    pub pass: bool,
    pub note: String,
}

impl Threshold {
    pub fn k(&self) -> usize {
        match *self {
            Threshold::InterceptVsPrediction { k, .. }
            | Threshold::SlopeVsPrediction { k, .. }
            | Threshold::SlopeAbsMax { k, .. }
            | Threshold::RemainderOrderMin { k, .. }
            | Threshold::InterfaceGapOrderMin { k, .. }
            | Threshold::TailOrderRange { k, .. }
            | Threshold::L1DeviationOrderMin { k, .. } => k,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Threshold::InterceptVsPrediction { .. } => "intercept_vs_prediction",
            Threshold::SlopeVsPrediction { .. } => "slope_vs_prediction",
            Threshold::SlopeAbsMax { .. } => "slope_abs_max",
            Threshold::RemainderOrderMin { .. } => "remainder_order_min",
            Threshold::InterfaceGapOrderMin { .. } => "interface_gap_order_min",
            Threshold::TailOrderRange { .. } => "tail_order_range",
            Threshold::L1DeviationOrderMin { .. } => "l1_deviation_order_min",
        }
    }

    /// Whether evaluation needs Fourier diagnostics.
    pub fn needs_diagnostics(&self) -> bool {
        matches!(self, Threshold::TailOrderRange { .. } | Threshold::L1DeviationOrderMin { .. })
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.k() == 0 {
            return Err(format!("{}: k is 1-based", self.name()));
        }
        let finite = |x: f64| x.is_finite() && x >= 0.0;
        let ok = match *self {
            Threshold::InterceptVsPrediction { max_abs, .. } => finite(max_abs),
            Threshold::SlopeVsPrediction { max_rel, max_abs, .. } => {
                (max_rel.is_some() || max_abs.is_some()) && max_rel.is_none_or(finite) && max_abs.is_none_or(finite)
            }
            Threshold::SlopeAbsMax { max, .. } => finite(max),
            Threshold::RemainderOrderMin { min, .. }
            | Threshold::InterfaceGapOrderMin { min, .. }
            | Threshold::L1DeviationOrderMin { min, .. } => min.is_finite(),
            Threshold::TailOrderRange { min, max, .. } => min.is_finite() && max.is_finite() && min <= max,
        };
        if ok {
            Ok(())
        } else {
            Err(format!("{}: limits must be finite, non-negative and consistent", self.name()))
        }
    }

    pub fn evaluate(&self, report: &SweepReport) -> ThresholdResult {
        let k = self.k();
        let Some(r) = report.k(k) else {
            return self.result(None, String::new(), false, format!("k={k} was not swept"));
        };
        self.evaluate_k(r)
    }

    fn result(&self, value: Option<f64>, limit: String, pass: bool, note: String) -> ThresholdResult {
        ThresholdResult { name: self.name().to_string(), k: self.k(), value, limit, pass, note }
    }

    fn order_min(&self, order: Option<f64>, min: f64) -> ThresholdResult {
        let pass = order.is_some_and(|o| o >= min);
        let note = if order.is_none() { "order not estimable".into() } else { String::new() };
        self.result(order, format!(">= {min}"), pass, note)
    }

    fn evaluate_k(&self, r: &KReport) -> ThresholdResult {
        match *self {
            Threshold::InterceptVsPrediction { max_abs, .. } => {
                let v = r.deviations.intercept_abs;
                self.result(Some(v), format!("<= {max_abs:e}"), v <= max_abs, String::new())
            }
            Threshold::SlopeVsPrediction { max_rel, max_abs, .. } => {
                let Some(source) = r.deviations.slope_reference else {
                    return self.result(None, String::new(), false, "no slope prediction".into());
                };
                let note = format!("reference {source:?}");
                let mut pass = true;
                let mut value = None;
                let mut limits = Vec::new();
                if let Some(m) = max_rel {
                    value = r.deviations.slope_rel;
                    pass &= value.is_some_and(|v| v <= m);
                    limits.push(format!("rel <= {m:e}"));
                }
                if let Some(m) = max_abs {
                    let v = r.deviations.slope_abs;
                    pass &= v.is_some_and(|v| v <= m);
                    value = value.or(v);
                    limits.push(format!("abs <= {m:e}"));
                }
                self.result(value, limits.join(", "), pass, note)
            }
            Threshold::SlopeAbsMax { max, .. } => {
                let b = r.fit.slope().abs();
                self.result(Some(b), format!("<= {max:e}"), b <= max, String::new())
            }
            Threshold::RemainderOrderMin { min, .. } => self.order_min(r.remainder_order.order, min),
            Threshold::InterfaceGapOrderMin { min, .. } => self.order_min(r.interface_gap_order.order, min),
            Threshold::TailOrderRange { min, max, .. } => {
                let Some(d) = &r.diagnostics else {
                    return self.result(None, String::new(), false, "diagnostics disabled".into());
                };
                let o = d.tail_order.order;
                let pass = o.is_some_and(|o| (min..=max).contains(&o));
                self.result(o, format!("in [{min}, {max}]"), pass, String::new())
            }
            Threshold::L1DeviationOrderMin { min, .. } => {
                let Some(d) = &r.diagnostics else {
                    return self.result(None, String::new(), false, "diagnostics disabled".into());
                };
                self.order_min(d.l1_deviation_order.order, min)
            }
        }
    }
}
