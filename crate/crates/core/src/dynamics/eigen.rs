use serde::Serialize;

use crate::error::{Error, Result};
use crate::units::HBAR_EV_PS;

/// Instantaneous eigenbasis of the three-level interaction Hamiltonian.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenSystem {
    /// Mixing angle θ with tan θ = Ω_p/Ω_s, radians.
    pub theta: f64,
    /// (λ₀, λ₊, λ₋) in eV.
    pub eigenvalues: [f64; 3],
    /// Dark, upper bright and lower bright vectors in the {|1⟩, |2⟩, |3⟩} basis.
    pub vectors: [[f64; 3]; 3],
}

impl EigenSystem {
    pub fn dark(&self) -> [f64; 3] {
        self.vectors[0]
    }
}

/// Eigensystem for Rabi frequencies in s⁻¹.
pub fn instantaneous_eigensystem(omega_p: f64, omega_s: f64) -> Result<EigenSystem> {
    if omega_p == 0.0 && omega_s == 0.0 {
        return Err(Error::Degenerate("both Rabi frequencies vanish; the eigenbasis is undefined".into()));
    }
    if omega_p < 0.0 || omega_s < 0.0 {
        return Err(Error::Domain("Rabi frequencies must be non-negative".into()));
    }
    let theta = omega_p.atan2(omega_s);
    let (s, c) = theta.sin_cos();
    let half = 0.5 * HBAR_EV_PS * 1e-12 * omega_p.hypot(omega_s);
    let r = std::f64::consts::FRAC_1_SQRT_2;
    Ok(EigenSystem {
        theta,
        eigenvalues: [0.0, half, -half],
        vectors: [[c, 0.0, -s], [r * s, r, r * c], [r * s, -r, r * c]],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::hamiltonian;
    use crate::nuclide_db::Scheme;
    use rand::{Rng, SeedableRng};
    use std::f64::consts::FRAC_PI_4;

    #[test]
    fn limits() {
        let e = instantaneous_eigensystem(0.0, 1e12).unwrap();
        assert_eq!(e.theta, 0.0);
        assert_eq!(e.dark(), [1.0, 0.0, -0.0]);
        let e = instantaneous_eigensystem(2e12, 2e12).unwrap();
        assert!((e.theta - FRAC_PI_4).abs() < 1e-15);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!((e.dark()[0] - r).abs() < 1e-15 && (e.dark()[2] + r).abs() < 1e-15);
        assert!(matches!(instantaneous_eigensystem(0.0, 0.0), Err(Error::Degenerate(_))));
    }

    #[test]
    fn matches_numeric_eigensolver() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        for _ in 0..200 {
            let wp: f64 = rng.gen_range(0.0..1e15);
            let ws: f64 = rng.gen_range(1e10..1e15);
            let es = instantaneous_eigensystem(wp, ws).unwrap();
            let h = hamiltonian(Scheme::Lambda, wp, Some(ws)).unwrap();
            let scale = es.eigenvalues[1];
            let num = h.clone().symmetric_eigen();
            for (lam, v) in es.eigenvalues.iter().zip(&es.vectors) {
                // H v = λ v
                for i in 0..3 {
                    let hv: f64 = (0..3).map(|j| h[(i, j)].re * v[j]).sum();
                    assert!((hv - lam * v[i]).abs() < 1e-10 * scale);
                }
                // Same vector as the numeric solver up to a phase.
                let k = (0..3)
                    .min_by(|&a, &b| {
                        (num.eigenvalues[a] - lam).abs().total_cmp(&(num.eigenvalues[b] - lam).abs())
                    })
                    .unwrap();
                let overlap: f64 = (0..3).map(|i| num.eigenvectors[(i, k)].conj().re * v[i]).sum::<f64>();
                let overlap_im: f64 = (0..3).map(|i| num.eigenvectors[(i, k)].conj().im * v[i]).sum::<f64>();
                assert!((overlap.hypot(overlap_im) - 1.0).abs() < 1e-10);
            }
            for a in 0..3 {
                for b in 0..3 {
                    let dot: f64 = (0..3).map(|i| es.vectors[a][i] * es.vectors[b][i]).sum();
                    assert!((dot - if a == b { 1.0 } else { 0.0 }).abs() < 1e-14);
                }
            }
        }
    }
}
