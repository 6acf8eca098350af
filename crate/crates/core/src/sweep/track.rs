//! Following an eigenvalue from one `ε` to the next.

use crate::error::{Error, Result};
use crate::interface_spectrum::{cluster_values, Cluster};
use crate::quadrature::gauss_on;
use crate::shell_solver::{ShellEigenResult, ShellMode};

fn block_of(clusters: &[Cluster], k: usize) -> Option<Cluster> {
    clusters.iter().find(|c| c.first <= k && k <= c.last).copied()
}

/// Index in `next` of the eigenvalue tracked from index `k` of `prev`.
///
/// Matching is by index. If `k` belongs to a block of equal eigenvalues,
/// the block is tracked through its smallest index. If the block structure
/// around `k` differs between the two results, a warning is logged and the
/// index itself is returned.
pub fn track_eigenvalue(prev: &ShellEigenResult, next: &ShellEigenResult, k: usize) -> Result<usize> {
    prev.eigenvalue(k)?;
    next.eigenvalue(k)?;
    let bp = block_of(&cluster_values(&prev.eigenvalues), k).expect("index checked");
    let bn = block_of(&cluster_values(&next.eigenvalues), k).expect("index checked");
    let complete = |b: &Cluster, r: &ShellEigenResult| b.last < r.len();
    if (bp.first, bp.last) != (bn.first, bn.last) && complete(&bp, prev) && complete(&bn, next) {
        log::warn!(
            "cluster structure around k={k} changed between eps={} ({}..={}) and eps={} ({}..={}); falling back to index",
            prev.epsilon,
            bp.first,
            bp.last,
            next.epsilon,
            bn.first,
            bn.last
        );
        return Ok(k);
    }
    Ok(bn.first)
}

/// Quadrature grid `(ξ, τ, weight)` on the collar of a plane interface.
fn plane_grid() -> Vec<(f64, f64, f64)> {
    let th: Vec<(f64, f64)> = (0..128)
        .flat_map(|i| {
            let h = std::f64::consts::TAU / 128.0;
            gauss_on(i as f64 * h, (i + 1) as f64 * h, 4)
        })
        .collect();
    let ta: Vec<(f64, f64)> = (0..8).flat_map(|i| gauss_on(-1.0 + 0.25 * i as f64, -0.75 + 0.25 * i as f64, 4)).collect();
    th.iter().flat_map(|&(x, wx)| ta.iter().map(move |&(t, wt)| (x, t, wx * wt))).collect()
}

fn overlap(a: &ShellMode, b: &ShellMode, grid: &[(f64, f64, f64)], sqrt_g0: &[f64]) -> f64 {
    match (a, b) {
        (ShellMode::Radial(x), ShellMode::Radial(y)) => {
            if x.harmonic != y.harmonic {
                return 0.0;
            }
            let q = gauss_on(-1.0, 1.0, 64);
            q.iter().map(|(t, w)| w * x.radial.collar_value(*t) * y.radial.collar_value(*t)).sum()
        }
        _ => grid
            .iter()
            .zip(sqrt_g0)
            .map(|(&(x, t, w), g)| w * g * a.value(&[x], t) * b.value(&[x], t))
            .sum(),
    }
}

/// Eigenfunction-overlap tracking: the index `j` in `next` maximizing
/// `|∫∫ Φ̃_k^{prev} Φ̃_j^{next} √G₀ dξ dτ|` together with that overlap. For
/// degenerate blocks the overlap with the whole block is used and the
/// block's smallest index returned. Verification path; costly.
pub fn track_by_overlap(prev: &ShellEigenResult, next: &ShellEigenResult, k: usize) -> Result<(usize, f64)> {
    prev.eigenvalue(k)?;
    if prev.interface != next.interface {
        return Err(Error::InvalidArgument("overlap tracking needs results on the same interface".into()));
    }
    let plane = prev.interface.ambient_dim() == 2;
    let grid = if plane { plane_grid() } else { Vec::new() };
    let sqrt_g0: Vec<f64> = grid
        .iter()
        .map(|(x, _, _)| crate::geometry::metric_at(&prev.interface, &[*x]).map(|m| m.sqrt_g0))
        .collect::<Result<_>>()?;
    let a = &prev.modes[k - 1];
    let blocks = cluster_values(&next.eigenvalues);
    let mut best = (0usize, -1.0f64);
    for b in &blocks {
        let o2: f64 = (b.first..=b.last).map(|j| overlap(a, &next.modes[j - 1], &grid, &sqrt_g0).powi(2)).sum();
        let o = o2.sqrt();
        if o > best.1 {
            best = (b.first, o);
        }
    }
    Ok(best)
}
