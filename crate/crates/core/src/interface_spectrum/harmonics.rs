//! Real hyperspherical harmonics on `S^{n−1}(r)`.
//!
//! With `d = n − 1` coordinates, a degree-`l` harmonic is labelled by a
//! chain `l = m_0 ≥ m_1 ≥ … ≥ m_{d−1} ≥ 0` and a cos/sin choice for the
//! azimuth:
//!
//! `Y = Π_{j<d−1} sin^{m_{j+1}}(ξ_j) C^{(α_j)}_{m_j − m_{j+1}}(cos ξ_j) · trig(m_{d−1} ξ_{d−1})`
//!
//! with `α_j = m_{j+1} + (d − j − 1)/2` and Gegenbauer polynomials `C`.

use statrs::function::gamma::ln_gamma;
use std::f64::consts::PI;

/// Dimension of the space of degree-`l` harmonics on `S^{n−1}`.
pub fn harmonic_dimension(n: usize, l: usize) -> usize {
    fn binom(a: i64, b: i64) -> i64 {
        if b < 0 || a < b {
            return 0;
        }
        let mut r: i64 = 1;
        for i in 0..b {
            r = r * (a - i) / (i + 1);
        }
        r
    }
    let (n, l) = (n as i64, l as i64);
    (binom(l + n - 1, n - 1) - binom(l + n - 3, n - 1)) as usize
}

fn gegenbauer(k: usize, alpha: f64, x: f64) -> f64 {
    match k {
        0 => 1.0,
        1 => 2.0 * alpha * x,
        _ => {
            let (mut c0, mut c1) = (1.0, 2.0 * alpha * x);
            for j in 2..=k {
                let jf = j as f64;
                let c2 = (2.0 * x * (jf + alpha - 1.0) * c1 - (jf + 2.0 * alpha - 2.0) * c0) / jf;
                c0 = c1;
                c1 = c2;
            }
            c1
        }
    }
}

/// `∫_{−1}^{1} (1−x²)^{α−1/2} C_k^{(α)}(x)² dx`
fn gegenbauer_norm_sq(k: usize, alpha: f64) -> f64 {
    let kf = k as f64;
    let ln = PI.ln() + (1.0 - 2.0 * alpha) * 2f64.ln() + ln_gamma(kf + 2.0 * alpha)
        - ln_gamma(kf + 1.0)
        - (kf + alpha).ln()
        - 2.0 * ln_gamma(alpha);
    ln.exp()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SphereHarmonic {
    pub n: usize,
    pub r: f64,
    pub l: usize,
    /// `m_1, …, m_{d−1}`
    pub chain: Vec<usize>,
    pub sine: bool,
    scale: f64,
}

impl SphereHarmonic {
    /// All degree-`l` harmonics in label order (chain lexicographic, cos
    /// before sin).
    pub fn degree(n: usize, r: f64, l: usize) -> Vec<SphereHarmonic> {
        let d = n - 1;
        let mut chains: Vec<Vec<usize>> = vec![vec![]];
        for _ in 1..d {
            let mut next = Vec::new();
            for c in &chains {
                let top = c.last().copied().unwrap_or(l);
                for m in 0..=top {
                    let mut cc = c.clone();
                    cc.push(m);
                    next.push(cc);
                }
            }
            chains = next;
        }
        let mut out = Vec::new();
        for c in chains {
            let last = c.last().copied().unwrap_or(l);
            out.push(SphereHarmonic::new(n, r, l, c.clone(), false));
            if last > 0 {
                out.push(SphereHarmonic::new(n, r, l, c, true));
            }
        }
        debug_assert_eq!(out.len(), harmonic_dimension(n, l));
        out
    }

    fn new(n: usize, r: f64, l: usize, chain: Vec<usize>, sine: bool) -> Self {
        let d = n - 1;
        let ms = Self::full_chain(l, &chain);
        let mut norm_sq = if ms[d - 1] == 0 { 2.0 * PI } else { PI };
        for j in 0..d.saturating_sub(1) {
            let alpha = ms[j + 1] as f64 + (d - j - 1) as f64 / 2.0;
            norm_sq *= gegenbauer_norm_sq(ms[j] - ms[j + 1], alpha);
        }
        let scale = 1.0 / (norm_sq.sqrt() * r.powf(d as f64 / 2.0));
        SphereHarmonic { n, r, l, chain, sine, scale }
    }

    fn full_chain(l: usize, chain: &[usize]) -> Vec<usize> {
        let mut ms = vec![l];
        ms.extend_from_slice(chain);
        ms
    }

    /// Value and derivative of each coordinate factor.
    fn factors(&self, xi: &[f64]) -> Vec<(f64, f64)> {
        let d = self.n - 1;
        let ms = Self::full_chain(self.l, &self.chain);
        let mut out = Vec::with_capacity(d);
        for j in 0..d - 1 {
            let mp = ms[j + 1];
            let k = ms[j] - mp;
            let alpha = mp as f64 + (d - j - 1) as f64 / 2.0;
            let (s, c) = xi[j].sin_cos();
            let cv = gegenbauer(k, alpha, c);
            let dc = if k == 0 { 0.0 } else { 2.0 * alpha * gegenbauer(k - 1, alpha + 1.0, c) };
            let sm = s.powi(mp as i32);
            let v = sm * cv;
            let dsm = if mp == 0 { 0.0 } else { mp as f64 * s.powi(mp as i32 - 1) * c };
            let dv = dsm * cv - sm * s * dc;
            out.push((v, dv));
        }
        let m = ms[d - 1] as f64;
        let (s, c) = (m * xi[d - 1]).sin_cos();
        out.push(if self.sine { (s, m * c) } else { (c, -m * s) });
        out
    }

    pub fn value(&self, xi: &[f64]) -> f64 {
        self.scale * self.factors(xi).iter().map(|f| f.0).product::<f64>()
    }

    pub fn gradient(&self, xi: &[f64]) -> Vec<f64> {
        let f = self.factors(xi);
        (0..f.len())
            .map(|i| {
                self.scale
                    * f.iter().enumerate().map(|(j, fj)| if i == j { fj.1 } else { fj.0 }).product::<f64>()
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::gauss_on;

    #[test]
    fn dimensions() {
        assert_eq!(harmonic_dimension(2, 0), 1);
        assert_eq!(harmonic_dimension(2, 3), 2);
        assert_eq!(harmonic_dimension(3, 2), 5);
        assert_eq!(harmonic_dimension(4, 1), 4);
        assert_eq!(harmonic_dimension(4, 2), 9);
        assert_eq!(harmonic_dimension(5, 1), 5);
    }

    /// Gram matrix on `S^{n−1}(r)` with `√G₀ = r^{d} Π sin^{d−1−j} ξ_j`.
    fn gram(n: usize, r: f64, hs: &[SphereHarmonic]) -> Vec<Vec<f64>> {
        let d = n - 1;
        let polar = gauss_on(0.0, PI, 24);
        let az = gauss_on(0.0, 2.0 * PI, 32);
        let mut pts: Vec<(Vec<f64>, f64)> = vec![(vec![], r.powi(d as i32))];
        for j in 0..d {
            let rule = if j + 1 == d { &az } else { &polar };
            let mut next = Vec::new();
            for (p, w) in &pts {
                for (x, wx) in rule {
                    let mut q = p.clone();
                    q.push(*x);
                    let jac = if j + 1 == d { 1.0 } else { x.sin().powi((d - 1 - j) as i32) };
                    next.push((q, w * wx * jac));
                }
            }
            pts = next;
        }
        let mut g = vec![vec![0.0; hs.len()]; hs.len()];
        for (p, w) in &pts {
            let v: Vec<f64> = hs.iter().map(|h| h.value(p)).collect();
            for a in 0..hs.len() {
                for b in 0..hs.len() {
                    g[a][b] += w * v[a] * v[b];
                }
            }
        }
        g
    }

    #[test]
    fn harmonics_are_orthonormal() {
        for n in 2..=4 {
            let r = 1.4;
            let hs: Vec<SphereHarmonic> = (0..=3).flat_map(|l| SphereHarmonic::degree(n, r, l)).collect();
            let g = gram(n, r, &hs);
            for a in 0..hs.len() {
                for b in 0..hs.len() {
                    let e = if a == b { 1.0 } else { 0.0 };
                    assert!((g[a][b] - e).abs() < 1e-11, "n={n} ({a},{b}) = {}", g[a][b]);
                }
            }
        }
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let hs = SphereHarmonic::degree(4, 1.0, 3);
        let xi = [0.7, 1.1, 2.3];
        for h in &hs {
            let g = h.gradient(&xi);
            for i in 0..3 {
                let mut p = xi;
                let mut m = xi;
                p[i] += 1e-6;
                m[i] -= 1e-6;
                let fd = (h.value(&p) - h.value(&m)) / 2e-6;
                assert!((fd - g[i]).abs() < 1e-7, "{:?} d{i}: {fd} vs {}", h.chain, g[i]);
            }
        }
    }
}
