//! Independent eigenvalues of the radial problem by shooting.
//!
//! With `p = σ ρ^{n−1} u′` the radial equation is the first-order system
//! `u′ = p / (σ ρ^{n−1})`, `p′ = ρ^{n−1} (σΛ/ρ² − λ) u`; both `u` and `p`
//! are continuous across `ρ = r`, which is exactly the transmission
//! condition. Starting from `u = 1`, `p = 0` at `r − ε`, eigenvalues are
//! the roots of the miss `p(r + ε; λ)`.

use super::ode::{integrate, Tolerance};
use super::RadialProblem;
use crate::error::{Error, Result};

const TOL: Tolerance = Tolerance { rtol: 1e-13, atol: 1e-300 };
const MAX_GRID_POINTS: usize = 100_000;

fn miss(p: &RadialProblem, lambda: f64) -> Result<f64> {
    let d = p.n as i32 - 1;
    let rhs = |sigma: f64| {
        move |rho: f64, y: &[f64; 2]| {
            let w = rho.powi(d);
            [y[1] / (sigma * w), w * (sigma * p.lambda_ang / (rho * rho) - lambda) * y[0]]
        }
    };
    let mid = integrate(rhs(p.coeff.sigma_minus), p.r - p.epsilon, p.r, [1.0, 0.0], &TOL)?;
    let end = integrate(rhs(p.coeff.sigma_plus), p.r, p.r + p.epsilon, mid, &TOL)?;
    Ok(end[1])
}

/// Illinois-modified regula falsi on a sign-change bracket.
fn refine(p: &RadialProblem, mut a: f64, mut fa: f64, mut b: f64, mut fb: f64) -> Result<f64> {
    // a few bisections first so the secant phase starts in the linear regime
    for _ in 0..8 {
        let m = 0.5 * (a + b);
        let fm = miss(p, m)?;
        if fm == 0.0 {
            return Ok(m);
        }
        if fa.signum() == fm.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
            fb = fm;
        }
    }
    let mut side = 0i32;
    for _ in 0..200 {
        let c = (a * fb - b * fa) / (fb - fa);
        if (b - a).abs() <= 4e-15 * b.abs().max(1e-300) {
            return Ok(c);
        }
        let fc = miss(p, c)?;
        if fc == 0.0 {
            return Ok(c);
        }
        if fc.signum() == fb.signum() {
            b = c;
            fb = fc;
            if side == -1 {
                fa *= 0.5;
            }
            side = -1;
        } else {
            a = c;
            fa = fc;
            if side == 1 {
                fb *= 0.5;
            }
            side = 1;
        }
        if (b - a).abs() <= 4e-15 * c.abs() {
            return Ok(c);
        }
    }
    Ok(0.5 * (a + b))
}

/// The `count` smallest eigenvalues of `p` by shooting, scanning a uniform
/// `λ` grid of step `σ_min (π/2ε)² / 100` for sign changes.
pub fn shooting_oracle(p: &RadialProblem, count: usize) -> Result<Vec<f64>> {
    p.validate()?;
    let mut roots = Vec::with_capacity(count);
    if count == 0 {
        return Ok(roots);
    }
    let step = p.coeff.min() * (std::f64::consts::PI / (2.0 * p.epsilon)).powi(2) / 100.0;
    let mut lo = 0.0;
    if p.lambda_ang == 0.0 {
        // constants solve the problem at λ = 0
        roots.push(0.0);
        lo = step * 1e-3;
    }
    let mut f_lo = miss(p, lo)?;
    let mut points = 1usize;
    while roots.len() < count {
        if points >= MAX_GRID_POINTS {
            return Err(Error::MissedRootBracket {
                found: roots.len(),
                wanted: count,
                grid_start: 0.0,
                grid_end: lo,
                grid_points: points,
            });
        }
        let hi = lo + step;
        let f_hi = miss(p, hi)?;
        points += 1;
        if f_hi == 0.0 {
            roots.push(hi);
            lo = hi + step * 1e-3;
            f_lo = miss(p, lo)?;
            continue;
        }
        if f_lo.signum() != f_hi.signum() {
            roots.push(refine(p, lo, f_lo, hi, f_hi)?);
        }
        lo = hi;
        f_lo = f_hi;
    }
    Ok(roots)
}
