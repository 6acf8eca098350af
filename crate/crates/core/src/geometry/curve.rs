use serde::{Deserialize, Serialize};

use super::Frame;
use crate::error::{Error, Result};

/// Number of samples used for pointwise checks on a curve.
pub(crate) const CURVE_SAMPLES: usize = 4096;

/// `x(θ) = Σ_j a_j cos jθ + b_j sin jθ` per coordinate, with the pair
/// `(a_j, b_j)` stored at index `j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlaneCurve {
    pub x: Vec<(f64, f64)>,
    pub y: Vec<(f64, f64)>,
}

/// Value and first three θ-derivatives of a trigonometric series.
fn series(coeffs: &[(f64, f64)], theta: f64) -> [f64; 4] {
    let mut out = [0.0; 4];
    for (j, &(a, b)) in coeffs.iter().enumerate() {
        let jf = j as f64;
        let (s, c) = (jf * theta).sin_cos();
        out[0] += a * c + b * s;
        out[1] += jf * (-a * s + b * c);
        out[2] += -jf * jf * (a * c + b * s);
        out[3] += jf * jf * jf * (a * s - b * c);
    }
    out
}

impl PlaneCurve {
    pub fn new(x: Vec<(f64, f64)>, y: Vec<(f64, f64)>) -> Result<Self> {
        let c = PlaneCurve { x, y };
        c.validate()?;
        Ok(c)
    }

    /// `(a cos θ, b sin θ)`
    pub fn ellipse(a: f64, b: f64) -> Result<Self> {
        Self::new(vec![(0.0, 0.0), (a, 0.0)], vec![(0.0, 0.0), (0.0, b)])
    }

    pub fn circle(r: f64) -> Result<Self> {
        Self::ellipse(r, r)
    }

    pub fn validate(&self) -> Result<()> {
        if self.x.len() < 2 && self.y.len() < 2 {
            return Err(Error::InvalidInterface("curve needs at least one nonconstant harmonic".into()));
        }
        if self.x.iter().chain(&self.y).any(|(a, b)| !a.is_finite() || !b.is_finite()) {
            return Err(Error::InvalidInterface("non-finite Fourier coefficient".into()));
        }
        if self.signed_area().abs() < 1e-14 {
            return Err(Error::InvalidInterface("curve encloses zero signed area".into()));
        }
        for i in 0..CURVE_SAMPLES {
            let th = 2.0 * std::f64::consts::PI * i as f64 / CURVE_SAMPLES as f64;
            let sp = self.speed(th);
            if sp < 1e-10 {
                return Err(Error::DegenerateParameterization { xi: vec![th], speed: sp });
            }
        }
        Ok(())
    }

    pub fn position(&self, theta: f64) -> [f64; 2] {
        [series(&self.x, theta)[0], series(&self.y, theta)[0]]
    }

    pub fn derivatives(&self, theta: f64) -> ([f64; 4], [f64; 4]) {
        (series(&self.x, theta), series(&self.y, theta))
    }

    pub fn speed(&self, theta: f64) -> f64 {
        let (x, y) = self.derivatives(theta);
        x[1].hypot(y[1])
    }

    /// `½ ∮ (x y' − y x') dθ`, positive for counterclockwise curves.
    pub fn signed_area(&self) -> f64 {
        let get = |v: &[(f64, f64)], j: usize| v.get(j).copied().unwrap_or((0.0, 0.0));
        let m = self.x.len().max(self.y.len());
        (1..m)
            .map(|j| {
                let (ax, bx) = get(&self.x, j);
                let (ay, by) = get(&self.y, j);
                j as f64 * (ax * by - bx * ay)
            })
            .sum::<f64>()
            * std::f64::consts::PI
    }

    fn orientation(&self) -> f64 {
        self.signed_area().signum()
    }

    /// Signed curvature, positive where the curve bends towards its interior.
    pub fn curvature(&self, theta: f64) -> f64 {
        let (x, y) = self.derivatives(theta);
        let sp = x[1].hypot(y[1]);
        self.orientation() * (x[1] * y[2] - y[1] * x[2]) / (sp * sp * sp)
    }

    /// Same point set traversed from `θ + shift`.
    pub fn shifted(&self, shift: f64) -> PlaneCurve {
        let tr = |v: &[(f64, f64)]| {
            v.iter()
                .enumerate()
                .map(|(j, &(a, b))| {
                    let (s, c) = (j as f64 * shift).sin_cos();
                    (a * c + b * s, -a * s + b * c)
                })
                .collect()
        };
        PlaneCurve { x: tr(&self.x), y: tr(&self.y) }
    }

    /// Rigid rotation of the plane by `angle`.
    pub fn rotated(&self, angle: f64) -> PlaneCurve {
        let (s, c) = angle.sin_cos();
        let m = self.x.len().max(self.y.len());
        let get = |v: &[(f64, f64)], j: usize| v.get(j).copied().unwrap_or((0.0, 0.0));
        let mut x = Vec::with_capacity(m);
        let mut y = Vec::with_capacity(m);
        for j in 0..m {
            let (ax, bx) = get(&self.x, j);
            let (ay, by) = get(&self.y, j);
            x.push((c * ax - s * ay, c * bx - s * by));
            y.push((s * ax + c * ay, s * bx + c * by));
        }
        PlaneCurve { x, y }
    }

    /// Same point set traversed clockwise (`θ ↦ −θ`).
    pub fn reversed(&self) -> PlaneCurve {
        let flip = |v: &[(f64, f64)]| v.iter().map(|&(a, b)| (a, -b)).collect();
        PlaneCurve { x: flip(&self.x), y: flip(&self.y) }
    }

    pub(crate) fn frame(&self, theta: f64) -> Result<Frame> {
        let (x, y) = self.derivatives(theta);
        let sp = x[1].hypot(y[1]);
        if sp < 1e-10 {
            return Err(Error::DegenerateParameterization { xi: vec![theta], speed: sp });
        }
        let o = self.orientation();
        let normal = vec![o * y[1] / sp, -o * x[1] / sp];
        let dot = x[1] * x[2] + y[1] * y[2];
        let sp3 = sp * sp * sp;
        let dnormal = vec![o * (y[2] / sp - y[1] * dot / sp3), o * (-x[2] / sp + x[1] * dot / sp3)];
        Ok(Frame {
            tangents: vec![vec![x[1], y[1]]],
            second: vec![vec![vec![x[2], y[2]]]],
            normal,
            normal_derivs: vec![dnormal],
        })
    }
}
