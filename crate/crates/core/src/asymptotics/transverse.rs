use std::f64::consts::{FRAC_1_SQRT_2, PI};

/// A Neumann eigenfunction of `−d²/dτ²` on `(−1, 1)`, normalized in
/// `L²(−1, 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransverseMode {
    /// 1-based index.
    pub l: usize,
    pub mu: f64,
}

impl TransverseMode {
    pub fn new(l: usize) -> Self {
        assert!(l >= 1, "transverse modes are 1-based");
        let m = (l - 1) as f64;
        Self { l, mu: m * m * PI * PI / 4.0 }
    }

    fn freq(&self) -> f64 {
        (self.l - 1) as f64 * PI / 2.0
    }

    pub fn value(&self, tau: f64) -> f64 {
        match self.l {
            1 => FRAC_1_SQRT_2,
            l if l % 2 == 1 => (self.freq() * tau).cos(),
            _ => (self.freq() * tau).sin(),
        }
    }

    pub fn derivative(&self, tau: f64) -> f64 {
        let w = self.freq();
        match self.l {
            1 => 0.0,
            l if l % 2 == 1 => -w * (w * tau).sin(),
            _ => w * (w * tau).cos(),
        }
    }

    pub fn second_derivative(&self, tau: f64) -> f64 {
        -self.mu * self.value(tau)
    }
}

/// `(μ_l, φ_l)` for `l = 1 ..= l_max`, with `μ_l = (l−1)²π²/4`.
pub fn transverse_eigenpairs(l_max: usize) -> Vec<TransverseMode> {
    (1..=l_max).map(TransverseMode::new).collect()
}
