//! Interaction Hamiltonians and decoherence matrices.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::nuclide_db::{DecayModel, Scheme};
use crate::units::HBAR_EV_PS;

/// Interaction Hamiltonian in eV for Rabi frequencies in s⁻¹.
///
/// Two-level: (ħ/2)[[0, Ω_p], [Ω_p, 0]]. Three-level: (ħ/2) times the
/// tridiagonal matrix with Ω_p on the 1–2 and Ω_s on the 2–3 couplings.
pub fn hamiltonian(scheme: Scheme, omega_p: f64, omega_s: Option<f64>) -> Result<DMatrix<Complex64>> {
    if omega_p < 0.0 || omega_s.is_some_and(|s| s < 0.0) {
        return Err(Error::Domain("Rabi frequencies must be non-negative".into()));
    }
    // ħ in eV·s
    let half_hbar = 0.5 * HBAR_EV_PS * 1e-12;
    let c = |w: f64| Complex64::new(half_hbar * w, 0.0);
    match (scheme.dim(), omega_s) {
        (2, None) => {
            let mut h = DMatrix::zeros(2, 2);
            h[(0, 1)] = c(omega_p);
            h[(1, 0)] = c(omega_p);
            Ok(h)
        }
        (3, Some(ws)) => {
            let mut h = DMatrix::zeros(3, 3);
            h[(0, 1)] = c(omega_p);
            h[(1, 0)] = c(omega_p);
            h[(1, 2)] = c(ws);
            h[(2, 1)] = c(ws);
            Ok(h)
        }
        (2, Some(_)) => Err(Error::Scheme("two-level Hamiltonian takes no Stokes frequency".into())),
        _ => Err(Error::Scheme(format!("{scheme:?} Hamiltonian needs a Stokes frequency"))),
    }
}

fn branching_for(scheme: Scheme, decay: &DecayModel) -> Result<(f64, f64)> {
    // Ladder decay of |2⟩ can only feed |1⟩, so branching is optional there.
    match scheme {
        Scheme::Lambda => decay
            .branching
            .ok_or_else(|| Error::Scheme("Lambda dissipator needs branching ratios".into())),
        _ => Ok(decay.branching.unwrap_or((1.0, 0.0))),
    }
}

/// Decoherence matrix ρ_s of the master equation, in s⁻¹.
pub fn dissipator(scheme: Scheme, decay: &DecayModel, rho: &DensityMatrix) -> Result<DMatrix<Complex64>> {
    let d = scheme.dim();
    if rho.dim() != d {
        return Err(Error::Dimension { expected: d, got: rho.dim() });
    }
    let (b21, b23) = branching_for(scheme, decay)?;
    let mut out = DMatrix::zeros(d, d);
    dissipator_into(scheme, decay.gamma, b21, b23, rho.matrix(), &mut out);
    Ok(out)
}

/// Writes the decay term for state `r` into `out` (same units as `gamma`).
fn dissipator_into(
    scheme: Scheme,
    gamma: f64,
    b21: f64,
    b23: f64,
    r: &DMatrix<Complex64>,
    out: &mut DMatrix<Complex64>,
) {
    let g = 0.5 * gamma;
    let p22 = r[(1, 1)];
    match scheme {
        Scheme::TwoLevel => {
            out[(0, 0)] = 2.0 * g * p22;
            out[(0, 1)] = -g * r[(0, 1)];
            out[(1, 0)] = -g * r[(1, 0)];
            out[(1, 1)] = -2.0 * g * p22;
        }
        Scheme::Lambda | Scheme::Ladder | Scheme::AtomicLadder => {
            let lambda = scheme == Scheme::Lambda;
            out[(0, 0)] = 2.0 * g * if lambda { b21 } else { 1.0 } * p22;
            out[(0, 1)] = -g * r[(0, 1)];
            out[(1, 0)] = -g * r[(1, 0)];
            out[(1, 1)] = -2.0 * g * p22;
            out[(1, 2)] = -g * r[(1, 2)];
            out[(2, 1)] = -g * r[(2, 1)];
            out[(2, 2)] = if lambda { 2.0 * g * b23 * p22 } else { Complex64::new(0.0, 0.0) };
        }
    }
}

/// Master-equation right-hand side on the packed real state, with all rates
/// in ps⁻¹. Stack-only; called on every integrator stage.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Rhs {
    pub dim: usize,
    pub gamma: f64,
    /// Population fed to |1⟩ and |3⟩ per unit ρ₂₂ decay.
    pub feed: (f64, f64),
}

impl Rhs {
    pub fn new(scheme: Scheme, decay: &DecayModel, gamma_per_ps: f64) -> Result<Self> {
        let (b21, b23) = branching_for(scheme, decay)?;
        let feed = match scheme {
            Scheme::Lambda => (b21, b23),
            _ => (1.0, 0.0),
        };
        Ok(Rhs { dim: scheme.dim(), gamma: gamma_per_ps, feed })
    }

    /// dρ/dt = −i[h, ρ] + ρ_s with h = H/ħ, the Rabi frequencies in ps⁻¹.
    pub fn eval(&self, wp: f64, ws: f64, y: &[f64], dy: &mut [f64]) {
        let d = self.dim;
        let mut r = [[Complex64::new(0.0, 0.0); 3]; 3];
        for i in 0..d {
            r[i][i] = Complex64::new(y[i], 0.0);
        }
        let mut k = d;
        for i in 0..d {
            for j in i + 1..d {
                let c = Complex64::new(y[k], y[k + 1]);
                r[i][j] = c;
                r[j][i] = c.conj();
                k += 2;
            }
        }
        let mut h = [[0.0f64; 3]; 3];
        h[0][1] = 0.5 * wp;
        h[1][0] = 0.5 * wp;
        if d == 3 {
            h[1][2] = 0.5 * ws;
            h[2][1] = 0.5 * ws;
        }
        // −i(hρ − ρh); h is real symmetric
        let mut out = [[Complex64::new(0.0, 0.0); 3]; 3];
        for i in 0..d {
            for j in i..d {
                let mut c = Complex64::new(0.0, 0.0);
                for m in 0..d {
                    c += h[i][m] * r[m][j] - r[i][m] * h[m][j];
                }
                out[i][j] = Complex64::new(c.im, -c.re);
            }
        }
        let g = 0.5 * self.gamma;
        let p22 = r[1][1].re;
        out[0][0].re += 2.0 * g * self.feed.0 * p22;
        out[1][1].re -= 2.0 * g * p22;
        out[0][1] -= g * r[0][1];
        if d == 3 {
            out[2][2].re += 2.0 * g * self.feed.1 * p22;
            out[1][2] -= g * r[1][2];
        }

        for i in 0..d {
            dy[i] = out[i][i].re;
        }
        let mut k = d;
        for i in 0..d {
            for j in i + 1..d {
                dy[k] = out[i][j].re;
                dy[k + 1] = out[i][j].im;
                k += 2;
            }
        }
    }
}
