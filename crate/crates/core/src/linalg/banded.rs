use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Symmetric matrix stored as its lower band: row `i` holds columns
/// `i - w ..= i`.
#[derive(Debug, Clone)]
pub struct BandedSym {
    n: usize,
    w: usize,
    data: Vec<f64>,
}

impl BandedSym {
    pub fn zeros(n: usize, half_bandwidth: usize) -> Self {
        let w = half_bandwidth.min(n.saturating_sub(1));
        Self { n, w, data: vec![0.0; n * (w + 1)] }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn half_bandwidth(&self) -> usize {
        self.w
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        debug_assert!(j <= i && i - j <= self.w);
        i * (self.w + 1) + (j + self.w - i)
    }

    /// Adds `v` to entry (i, j) (and implicitly (j, i)).
    ///
    /// Panics if the entry lies outside the band.
    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let (r, c) = if i >= j { (i, j) } else { (j, i) };
        assert!(r - c <= self.w, "entry ({i}, {j}) outside band {}", self.w);
        let k = self.idx(r, c);
        self.data[k] += v;
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (r, c) = if i >= j { (i, j) } else { (j, i) };
        if r - c > self.w {
            0.0
        } else {
            self.data[self.idx(r, c)]
        }
    }

    /// `y = self * x`
    pub fn mul_vec(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.n);
        assert_eq!(y.len(), self.n);
        y.iter_mut().for_each(|v| *v = 0.0);
        for i in 0..self.n {
            let j0 = i.saturating_sub(self.w);
            let row = &self.data[i * (self.w + 1)..(i + 1) * (self.w + 1)];
            let off = self.w + j0 - i;
            let mut acc = 0.0;
            for (jj, j) in (j0..i).enumerate() {
                let a = row[off + jj];
                acc += a * x[j];
                y[j] += a * x[i];
            }
            acc += row[self.w] * x[i];
            y[i] += acc;
        }
    }

    /// `x^T self x`
    pub fn quad_form(&self, x: &[f64]) -> f64 {
        let mut y = vec![0.0; self.n];
        self.mul_vec(x, &mut y);
        x.iter().zip(&y).map(|(a, b)| a * b).sum()
    }

    /// `self + c * other`; both must share the bandwidth.
    pub fn add_scaled(&self, c: f64, other: &BandedSym) -> BandedSym {
        assert_eq!(self.n, other.n);
        assert_eq!(self.w, other.w);
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + c * b).collect();
        BandedSym { n: self.n, w: self.w, data }
    }

    pub fn scale(&mut self, c: f64) {
        self.data.iter_mut().for_each(|v| *v *= c);
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |i, j| self.get(i, j))
    }

    pub fn cholesky(&self) -> Result<BandedCholesky> {
        let (n, w) = (self.n, self.w);
        let mut l = self.data.clone();
        let stride = w + 1;
        for i in 0..n {
            let j0 = i.saturating_sub(w);
            for j in j0..=i {
                let k0 = j0.max(j.saturating_sub(w));
                let mut s = l[i * stride + j + w - i];
                for k in k0..j {
                    s -= l[i * stride + k + w - i] * l[j * stride + k + w - j];
                }
                if i == j {
                    if !(s > 0.0) || !s.is_finite() {
                        return Err(Error::NotPositiveDefinite {
                            pivot: i,
                            value: s,
                            context: "banded Cholesky".into(),
                        });
                    }
                    l[i * stride + w] = s.sqrt();
                } else {
                    l[i * stride + j + w - i] = s / l[j * stride + w];
                }
            }
        }
        Ok(BandedCholesky { n, w, l })
    }
}

/// Lower-triangular banded Cholesky factor `L` with `A = L L^T`.
#[derive(Debug, Clone)]
pub struct BandedCholesky {
    n: usize,
    w: usize,
    l: Vec<f64>,
}

impl BandedCholesky {
    pub fn solve_in_place(&self, b: &mut [f64]) {
        let (n, w) = (self.n, self.w);
        let stride = w + 1;
        assert_eq!(b.len(), n);
        for i in 0..n {
            let j0 = i.saturating_sub(w);
            let mut s = b[i];
            for k in j0..i {
                s -= self.l[i * stride + k + w - i] * b[k];
            }
            b[i] = s / self.l[i * stride + w];
        }
        for i in (0..n).rev() {
            let xi = b[i] / self.l[i * stride + w];
            b[i] = xi;
            let j0 = i.saturating_sub(w);
            for k in j0..i {
                b[k] -= self.l[i * stride + k + w - i] * xi;
            }
        }
    }

    /// Smallest diagonal pivot of `L`, squared.
    pub fn min_pivot(&self) -> f64 {
        (0..self.n)
            .map(|i| self.l[i * (self.w + 1) + self.w].powi(2))
            .fold(f64::INFINITY, f64::min)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(n: usize, w: usize) -> BandedSym {
        let mut a = BandedSym::zeros(n, w);
        for i in 0..n {
            a.add(i, i, 4.0 + i as f64 * 0.1);
            for d in 1..=w {
                if i + d < n {
                    a.add(i + d, i, -1.0 / (d as f64 + 1.0) + 0.01 * i as f64 / n as f64);
                }
            }
        }
        a
    }

    #[test]
    fn matvec_matches_dense() {
        let a = sample(17, 3);
        let x: Vec<f64> = (0..17).map(|i| (i as f64).sin()).collect();
        let mut y = vec![0.0; 17];
        a.mul_vec(&x, &mut y);
        let yd = a.to_dense() * nalgebra::DVector::from_vec(x);
        for i in 0..17 {
            assert!((y[i] - yd[i]).abs() < 1e-13);
        }
    }

    #[test]
    fn cholesky_solve_matches_dense() {
        let a = sample(40, 5);
        let b: Vec<f64> = (0..40).map(|i| 1.0 + (i as f64 * 0.3).cos()).collect();
        let mut x = b.clone();
        a.cholesky().unwrap().solve_in_place(&mut x);
        let mut r = vec![0.0; 40];
        a.mul_vec(&x, &mut r);
        for i in 0..40 {
            assert!((r[i] - b[i]).abs() < 1e-12, "{i}: {} vs {}", r[i], b[i]);
        }
    }

    #[test]
    fn indefinite_is_rejected() {
        let mut a = BandedSym::zeros(3, 1);
        a.add(0, 0, 1.0);
        a.add(1, 1, -1.0);
        a.add(2, 2, 1.0);
        assert!(matches!(a.cholesky(), Err(Error::NotPositiveDefinite { pivot: 1, .. })));
    }
}
