//! Laplace–Beltrami spectra on the interface, with multiplicity clusters.
//!
//! Indices `k` are 1-based throughout, matching `0 = λ₁ < λ₂ ≤ …`.

mod curve;
mod harmonics;

use std::ops::RangeInclusive;
use std::sync::Arc;

pub use curve::{curve_spectrum, CurveMesh1D, NodalFunction};
pub use harmonics::{harmonic_dimension, SphereHarmonic};

use crate::error::{Error, Result};

/// Relative gap below which neighbouring eigenvalues share a cluster.
pub const CLUSTER_REL_TOL: f64 = 1e-6;

/// A normalized interface eigenfunction, `∫ Φ² √G₀ dξ = 1`.
#[derive(Debug, Clone)]
pub enum InterfaceMode {
    Harmonic(SphereHarmonic),
    Nodal(NodalFunction),
}

impl InterfaceMode {
    pub fn value(&self, xi: &[f64]) -> f64 {
        match self {
            InterfaceMode::Harmonic(h) => h.value(xi),
            InterfaceMode::Nodal(f) => f.value(xi[0]),
        }
    }

    /// `∂Φ/∂ξ_i`
    pub fn gradient(&self, xi: &[f64]) -> Vec<f64> {
        match self {
            InterfaceMode::Harmonic(h) => h.gradient(xi),
            InterfaceMode::Nodal(f) => vec![f.derivative(xi[0])],
        }
    }
}

/// Index range `k(j) ..= k(j+1) − 1` of equal eigenvalues.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Cluster {
    pub first: usize,
    pub last: usize,
    /// Full multiplicity; exceeds `last − first + 1` when the list was
    /// truncated inside the cluster.
    pub multiplicity: usize,
}

#[derive(Debug, Clone)]
pub struct Spectrum {
    eigenvalues: Vec<f64>,
    clusters: Vec<Cluster>,
    modes: Vec<InterfaceMode>,
    mesh: Option<Arc<CurveMesh1D>>,
}

/// Groups an ascending list into clusters by the relative-gap rule.
pub fn cluster_values(values: &[f64]) -> Vec<Cluster> {
    let mut out: Vec<Cluster> = Vec::new();
    for (i, &v) in values.iter().enumerate() {
        let k = i + 1;
        match out.last_mut() {
            Some(c) if (v - values[i - 1]).abs() <= CLUSTER_REL_TOL * values[i - 1].abs().max(1.0) => {
                c.last = k;
                c.multiplicity += 1;
            }
            _ => out.push(Cluster { first: k, last: k, multiplicity: 1 }),
        }
    }
    out
}

impl Spectrum {
    pub(crate) fn new(
        eigenvalues: Vec<f64>,
        clusters: Vec<Cluster>,
        modes: Vec<InterfaceMode>,
        mesh: Option<Arc<CurveMesh1D>>,
    ) -> Self {
        debug_assert_eq!(eigenvalues.len(), modes.len());
        Self { eigenvalues, clusters, modes, mesh }
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// `λ_k`, 1-based.
    pub fn eigenvalue(&self, k: usize) -> Result<f64> {
        self.check(k)?;
        Ok(self.eigenvalues[k - 1])
    }

    pub fn mode(&self, k: usize) -> Result<&InterfaceMode> {
        self.check(k)?;
        Ok(&self.modes[k - 1])
    }

    pub fn clusters(&self) -> &[Cluster] {
        &self.clusters
    }

    /// The mesh of discrete eigenfunctions, if any.
    pub fn mesh(&self) -> Option<&Arc<CurveMesh1D>> {
        self.mesh.as_ref()
    }

    fn check(&self, k: usize) -> Result<()> {
        if k == 0 || k > self.len() {
            return Err(Error::InvalidArgument(format!("index {k} outside 1..={}", self.len())));
        }
        Ok(())
    }

    pub fn cluster_of(&self, k: usize) -> Result<Cluster> {
        self.check(k)?;
        Ok(*self.clusters.iter().find(|c| c.first <= k && k <= c.last).expect("clusters cover all indices"))
    }

    /// 0-based cluster number containing `k`.
    pub fn cluster_id(&self, k: usize) -> Result<usize> {
        self.check(k)?;
        Ok(self.clusters.iter().position(|c| c.first <= k && k <= c.last).expect("clusters cover all indices"))
    }

    /// `(k, λ_k, cluster id)` rows for reports.
    pub fn rows(&self) -> Vec<(usize, f64, usize)> {
        self.clusters
            .iter()
            .enumerate()
            .flat_map(|(cid, c)| (c.first..=c.last).map(move |k| (k, cid)))
            .map(|(k, cid)| (k, self.eigenvalues[k - 1], cid))
            .collect()
    }

    /// Relative gap to the nearest other cluster.
    pub fn relative_gap(&self, k: usize) -> Result<f64> {
        let c = self.cluster_of(k)?;
        let lam = self.eigenvalues[k - 1];
        let mut gap = f64::INFINITY;
        if c.first > 1 {
            gap = gap.min(lam - self.eigenvalues[c.first - 2]);
        }
        if c.last < self.len() {
            gap = gap.min(self.eigenvalues[c.last] - lam);
        }
        Ok(gap / lam.abs().max(1.0))
    }
}

/// The cluster containing `k`.
pub fn cluster_indices(spectrum: &Spectrum, k: usize) -> Result<RangeInclusive<usize>> {
    let c = spectrum.cluster_of(k)?;
    Ok(c.first..=c.last)
}

/// True iff the cluster containing `k` has multiplicity one.
pub fn is_simple(spectrum: &Spectrum, k: usize) -> Result<bool> {
    Ok(spectrum.cluster_of(k)?.multiplicity == 1)
}

/// Analytic spectrum of `S^{n−1}(r)`: `l(l+n−2)/r²` with multiplicity
/// equal to the dimension of degree-`l` harmonics; ordered by `l`, then by
/// harmonic label.
pub fn sphere_spectrum(n: usize, r: f64, count: usize) -> Result<Spectrum> {
    if n < 2 || !(r > 0.0) {
        return Err(Error::InvalidInterface(format!("sphere needs n >= 2 and r > 0, got n={n}, r={r}")));
    }
    if count == 0 {
        return Err(Error::InvalidArgument("need at least one eigenvalue".into()));
    }
    let mut values = Vec::with_capacity(count);
    let mut modes = Vec::with_capacity(count);
    let mut clusters = Vec::new();
    let mut l = 0usize;
    while values.len() < count {
        let lam = (l * (l + n - 2)) as f64 / (r * r);
        let members = SphereHarmonic::degree(n, r, l);
        let first = values.len() + 1;
        let mult = members.len();
        for h in members.into_iter().take(count - values.len()) {
            values.push(lam);
            modes.push(InterfaceMode::Harmonic(h));
        }
        clusters.push(Cluster { first, last: values.len(), multiplicity: mult });
        l += 1;
    }
    Ok(Spectrum::new(values, clusters, modes, None))
}
