//! Fourier coefficients `α^{p,l}_k(ε) = ∫∫ Φ̃_k Φ_p φ_l √G₀ dξ dτ` of a shell
//! eigenfunction in the product basis of interface and transverse modes.
//!
//! Tail sums are exact (Parseval), not truncated: with `⟨·⟩` the mean over
//! `τ`, `Σ_{p, l≥2} α² = ∫∫ (Φ̃ − ⟨Φ̃⟩)² √G₀` and `Σ_p α^{p,1}² = ∫ 2⟨Φ̃⟩² √G₀`.

use serde::Serialize;

use super::collar::curve_points;
use super::{ShellEigenResult, ShellMode};
use crate::asymptotics::transverse_eigenpairs;
use crate::error::{Error, Result};
use crate::interface_spectrum::{InterfaceMode, Spectrum};
use crate::quadrature::gauss_on;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FourierTable {
    pub k: usize,
    pub epsilon: f64,
    /// `alpha[p−1][l−1]`
    pub alpha: Vec<Vec<f64>>,
    /// `Σ_{p ≥ 1, l ≥ 2} α²`
    pub transverse_tail: f64,
    /// `Σ_{p ≥ 1} (α^{p,1})²`
    pub interface_l1_sum: f64,
    /// `Σ (α^{p,1})²` over the interface cluster containing `k`.
    pub cluster_l1_sum: f64,
    pub cluster: (usize, usize),
}

pub fn fourier_diagnostics(
    result: &ShellEigenResult,
    spectrum: &Spectrum,
    k: usize,
    p_max: usize,
    l_max: usize,
) -> Result<FourierTable> {
    result.eigenvalue(k)?;
    if p_max == 0 || p_max > spectrum.len() {
        return Err(Error::BasisTooSmall(format!(
            "p_max = {p_max} but the interface spectrum has {} modes",
            spectrum.len()
        )));
    }
    let cluster = spectrum.cluster_of(k.min(spectrum.len()))?;
    if cluster.last > spectrum.len() || k > spectrum.len() {
        return Err(Error::BasisTooSmall(format!("interface spectrum does not cover index {k}")));
    }
    let l_cap = match &result.modes[k - 1] {
        ShellMode::Radial(m) => m.radial.coeffs().len(),
        ShellMode::Collar(c) => 2 * c.m_tau() + 1,
    };
    if l_max == 0 || l_max > l_cap {
        return Err(Error::BasisTooSmall(format!("l_max = {l_max} exceeds the {l_cap} transverse dofs")));
    }
    let pw = p_max.max(cluster.last);
    let (proj, tail, l1) = match &result.modes[k - 1] {
        ShellMode::Radial(m) => radial_projection(m, result, spectrum, pw, l_max)?,
        ShellMode::Collar(_) => collar_projection(result, k, spectrum, pw, l_max)?,
    };
    let cluster_l1_sum = (cluster.first..=cluster.last).map(|p| proj[p - 1][0].powi(2)).sum();
    Ok(FourierTable {
        k,
        epsilon: result.epsilon,
        alpha: proj.into_iter().take(p_max).collect(),
        transverse_tail: tail,
        interface_l1_sum: l1,
        cluster_l1_sum,
        cluster: (cluster.first, cluster.last),
    })
}

type Projection = (Vec<Vec<f64>>, f64, f64);

fn radial_projection(
    m: &super::RadialShellMode,
    result: &ShellEigenResult,
    spectrum: &Spectrum,
    p_count: usize,
    l_max: usize,
) -> Result<Projection> {
    let n = result.interface.ambient_dim();
    let modes = transverse_eigenpairs(l_max);
    let q = m.radial.tau_quadrature();
    let prof: Vec<f64> = q.iter().map(|(t, _)| m.radial.collar_value(*t)).collect();
    let mean = q.iter().zip(&prof).map(|((_, w), u)| w * u).sum::<f64>() / 2.0;
    let tail: f64 = q.iter().zip(&prof).map(|((_, w), u)| w * (u - mean).powi(2)).sum();
    let beta: Vec<f64> = modes
        .iter()
        .map(|md| q.iter().zip(&prof).map(|((t, w), u)| w * u * md.value(*t)).sum())
        .collect();
    let overlaps: Vec<f64> = (1..=p_count)
        .map(|p| angular_overlap(&m.harmonic, spectrum.mode(p)?, n))
        .collect::<Result<_>>()?;
    let table = overlaps.iter().map(|c| beta.iter().map(|b| c * b).collect()).collect();
    Ok((table, tail, 2.0 * mean * mean))
}

/// `∫ Y Φ √G₀ dξ` for a harmonic `Y`.
fn angular_overlap(y: &crate::interface_spectrum::SphereHarmonic, phi: &InterfaceMode, n: usize) -> Result<f64> {
    match phi {
        InterfaceMode::Harmonic(h) => Ok(if h == y { 1.0 } else { 0.0 }),
        InterfaceMode::Nodal(f) if n == 2 => {
            let mut s = 0.0;
            let panels = 4 * f.mesh().elements();
            for i in 0..panels {
                let a = std::f64::consts::TAU * i as f64 / panels as f64;
                let b = std::f64::consts::TAU * (i + 1) as f64 / panels as f64;
                for (x, w) in gauss_on(a, b, 4) {
                    s += w * y.value(&[x]) * f.value(x) * y.r;
                }
            }
            Ok(s)
        }
        InterfaceMode::Nodal(_) => Err(Error::InvalidArgument("nodal interface modes exist only for curves".into())),
    }
}

fn collar_projection(
    result: &ShellEigenResult,
    k: usize,
    spectrum: &Spectrum,
    p_count: usize,
    l_max: usize,
) -> Result<Projection> {
    let ShellMode::Collar(c) = &result.modes[k - 1] else { unreachable!() };
    let modes = transverse_eigenpairs(l_max);
    let pts = curve_points(&result.interface, c.mesh())?;
    let ht = 2.0 / c.m_tau() as f64;
    let tq: Vec<(usize, f64, f64, f64)> = (0..c.m_tau())
        .flat_map(|f| {
            crate::quadrature::element_rule().iter().map(move |&(s, w)| (f, s, -1.0 + ht * (f as f64 + s), w * ht))
        })
        .collect();
    let phi_t: Vec<Vec<f64>> = modes.iter().map(|m| tq.iter().map(|x| m.value(x.2)).collect()).collect();
    let mut table = vec![vec![0.0; l_max]; p_count];
    let (mut tail, mut l1) = (0.0, 0.0);
    for (e, epts) in pts.iter().enumerate() {
        for p in epts {
            let vals: Vec<f64> = tq.iter().map(|&(f, st, _, _)| c.value_in(e, p.s, f, st)).collect();
            let mean = tq.iter().zip(&vals).map(|(x, v)| x.3 * v).sum::<f64>() / 2.0;
            let w = p.weight * p.sqrt_g0();
            tail += w * tq.iter().zip(&vals).map(|(x, v)| x.3 * (v - mean).powi(2)).sum::<f64>();
            l1 += w * 2.0 * mean * mean;
            let beta: Vec<f64> =
                phi_t.iter().map(|ph| tq.iter().zip(&vals).zip(ph).map(|((x, v), f)| x.3 * v * f).sum()).collect();
            for (pi, row) in table.iter_mut().enumerate() {
                let phi = spectrum.mode(pi + 1)?.value(&[p.theta]);
                for (a, b) in row.iter_mut().zip(&beta) {
                    *a += w * phi * b;
                }
            }
        }
    }
    Ok((table, tail, l1))
}
