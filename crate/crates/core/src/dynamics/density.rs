use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on the anti-Hermitian part accepted when building from a raw matrix.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Most negative eigenvalue tolerated in a physical state.
pub const POSITIVITY_TOL: f64 = 1e-8;

/// Battery state, a 2×2 or 3×3 Hermitian matrix with unit (or slightly
/// leaked) trace.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    m: DMatrix<Complex64>,
}

impl DensityMatrix {
    /// |k⟩⟨k| in dimension `dim`.
    pub fn pure_level(dim: usize, k: usize) -> Self {
        assert!(k < dim, "level {k} outside dimension {dim}");
        let mut m = DMatrix::zeros(dim, dim);
        m[(k, k)] = Complex64::new(1.0, 0.0);
        DensityMatrix { m }
    }

    pub fn ground(dim: usize) -> Self {
        Self::pure_level(dim, 0)
    }

    /// |ψ⟩⟨ψ| for a (not necessarily normalised) amplitude vector.
    pub fn from_pure(psi: &[Complex64]) -> Self {
        let n: f64 = psi.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        let d = psi.len();
        let m = DMatrix::from_fn(d, d, |i, j| psi[i] * psi[j].conj() / (n * n));
        DensityMatrix { m }
    }

    /// Wraps a Hermitian matrix; the anti-Hermitian residue must stay below
    /// [`HERMITIAN_TOL`] and is symmetrised away.
    pub fn from_matrix(m: DMatrix<Complex64>) -> Result<Self> {
        if !m.is_square() || !(2..=3).contains(&m.nrows()) {
            return Err(Error::Dimension { expected: 3, got: m.nrows().max(m.ncols()) });
        }
        let dev = hermiticity_error(&m);
        if dev > HERMITIAN_TOL {
            return Err(Error::Numerical(format!("matrix is not Hermitian (deviation {dev:e})")));
        }
        let m = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
        Ok(DensityMatrix { m })
    }

    /// Builds from the packed real vector used by the integrator: diagonal
    /// first, then Re/Im of the strict upper triangle in row-major order.
    pub fn from_packed(dim: usize, y: &[f64]) -> Self {
        let mut m = DMatrix::zeros(dim, dim);
        for i in 0..dim {
            m[(i, i)] = Complex64::new(y[i], 0.0);
        }
        let mut k = dim;
        for i in 0..dim {
            for j in i + 1..dim {
                let c = Complex64::new(y[k], y[k + 1]);
                m[(i, j)] = c;
                m[(j, i)] = c.conj();
                k += 2;
            }
        }
        DensityMatrix { m }
    }

    pub fn to_packed(&self) -> Vec<f64> {
        let d = self.dim();
        let mut y: Vec<f64> = (0..d).map(|i| self.m[(i, i)].re).collect();
        for i in 0..d {
            for j in i + 1..d {
                y.push(self.m[(i, j)].re);
                y.push(self.m[(i, j)].im);
            }
        }
        y
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.m
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.m[(i, j)]
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.m[(i, i)].re).sum()
    }

    /// Diagonal entries ρₙₙ.
    pub fn populations(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.m[(i, i)].re).collect()
    }

    /// Eigenvalues in descending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self.m.clone().symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(|a, b| b.total_cmp(a));
        ev
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().last().copied().unwrap_or(0.0)
    }

    pub fn hermiticity_error(&self) -> f64 {
        hermiticity_error(&self.m)
    }

    /// Tr ρ².
    pub fn purity(&self) -> f64 {
        self.m.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Upper-triangle entries in row-major order, as (re, im).
    pub fn upper_triangle(&self) -> Vec<Complex64> {
        let d = self.dim();
        let mut v = Vec::with_capacity(d * (d + 1) / 2);
        for i in 0..d {
            for j in i..d {
                v.push(self.m[(i, j)]);
            }
        }
        v
    }
}

pub(crate) fn hermiticity_error(m: &DMatrix<Complex64>) -> f64 {
    let mut dev: f64 = 0.0;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

/// Serialisable view used in JSON dumps: rows of [re, im] pairs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DensityRows(pub Vec<Vec<[f64; 2]>>);

impl From<&DensityMatrix> for DensityRows {
    fn from(r: &DensityMatrix) -> Self {
        let d = r.dim();
        DensityRows((0..d).map(|i| (0..d).map(|j| [r.m[(i, j)].re, r.m[(i, j)].im]).collect()).collect())
    }
}
