//! Figures of merit: stored energy, average power, ergotropy, extraction
//! ratio and purity.

use serde::Serialize;

use crate::dynamics::{DensityMatrix, Trajectory};
use crate::error::{Error, Result};
use crate::units::ev_per_ps_to_watt;

/// Eigenvalues down to this are treated as numerical noise and clipped to 0.
pub const EIGEN_CLIP: f64 = 1e-6;
/// Below this fraction of the largest level energy the battery counts as empty.
pub const EMPTY_FRACTION: f64 = 1e-12;

fn check_dim(rho: &DensityMatrix, levels: &[f64]) -> Result<()> {
    if rho.dim() != levels.len() {
        return Err(Error::Dimension { expected: levels.len(), got: rho.dim() });
    }
    Ok(())
}

/// Tr[H₀ρ] − ε₁ in eV.
pub fn stored_energy(rho: &DensityMatrix, levels: &[f64]) -> Result<f64> {
    check_dim(rho, levels)?;
    let e: f64 = levels.iter().enumerate().map(|(n, eps)| eps * rho.get(n, n).re).sum();
    Ok(e - levels[0])
}

/// E/t in watts for E in eV and t in ps; 0 at t = 0.
pub fn average_power(energy_ev: f64, t_ps: f64) -> f64 {
    if t_ps <= 0.0 {
        0.0
    } else {
        ev_per_ps_to_watt(energy_ev / t_ps)
    }
}

/// Energy of the passive state: eigenvalues in descending order paired with
/// level energies in ascending order.
pub fn passive_energy(eigenvalues: &[f64], levels: &[f64]) -> Result<f64> {
    let mut r = eigenvalues.to_vec();
    for v in &mut r {
        if *v < -EIGEN_CLIP {
            return Err(Error::Numerical(format!("eigenvalue {v:e} below -{EIGEN_CLIP:e}; state is not physical")));
        }
        *v = v.max(0.0);
    }
    r.sort_by(|a, b| b.total_cmp(a));
    let mut eps = levels.to_vec();
    eps.sort_by(f64::total_cmp);
    Ok(r.iter().zip(&eps).map(|(a, b)| a * b).sum())
}

/// Maximum unitarily extractable work in eV.
pub fn ergotropy(rho: &DensityMatrix, levels: &[f64]) -> Result<f64> {
    check_dim(rho, levels)?;
    let total: f64 = levels.iter().enumerate().map(|(n, eps)| eps * rho.get(n, n).re).sum();
    Ok(total - passive_energy(&rho.eigenvalues(), levels)?)
}

/// W/E, or 1 for an empty battery (E ≤ 10⁻¹²·`e_scale`).
pub fn extraction_ratio(w: f64, e: f64, e_scale: f64) -> f64 {
    if e <= EMPTY_FRACTION * e_scale {
        1.0
    } else {
        w / e
    }
}

pub fn purity(rho: &DensityMatrix) -> f64 {
    rho.purity()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricSeries {
    pub times: Vec<f64>,
    /// `populations[n][i]` is ρₙₙ at snapshot `i`.
    pub populations: Vec<Vec<f64>>,
    pub energy: Vec<f64>,
    pub power: Vec<f64>,
    pub ergotropy: Vec<f64>,
    pub ratio: Vec<f64>,
    pub purity: Vec<f64>,
}

impl MetricSeries {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

pub fn metric_series(traj: &Trajectory, levels: &[f64]) -> Result<MetricSeries> {
    let d = levels.len();
    let e_scale = levels.iter().copied().fold(0.0, f64::max);
    let n = traj.times.len();
    let mut s = MetricSeries {
        times: traj.times.clone(),
        populations: vec![Vec::with_capacity(n); d],
        energy: Vec::with_capacity(n),
        power: Vec::with_capacity(n),
        ergotropy: Vec::with_capacity(n),
        ratio: Vec::with_capacity(n),
        purity: Vec::with_capacity(n),
    };
    for (i, (t, rho)) in traj.times.iter().zip(&traj.states).enumerate() {
        let at = |source| Error::AtSnapshot { index: i, source: Box::new(source) };
        let e = stored_energy(rho, levels).map_err(at)?;
        let w = ergotropy(rho, levels).map_err(at)?;
        for (k, pop) in s.populations.iter_mut().enumerate() {
            pop.push(rho.get(k, k).re);
        }
        s.energy.push(e);
        s.power.push(average_power(e, *t));
        s.ergotropy.push(w);
        s.ratio.push(extraction_ratio(w, e, e_scale));
        s.purity.push(purity(rho));
    }
    Ok(s)
}
