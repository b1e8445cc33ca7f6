//! Matrix functions through the spectral theorem, and their first derivative
//! through the divided-difference (Daleckii-Krein) formula:
//!
//! ```text
//! Df(A)[C] = U (F ⊙ (U^H C U)) U^H,   F_ij = f[λ_i, λ_j]
//! ```
//!
//! where `A = U diag(λ) U^H` and `f[x, y] = (f(x) - f(y)) / (x - y)` with
//! `f[x, x] = f'(x)`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::function::FunctionSeed;
use crate::hermitian::{eigh, HermitianMatrix, SpectralDecomposition};

/// Below `CONFLUENT_TOL * max(1, |x|, |y|)` the quotient is replaced by `f'` at the midpoint.
pub const CONFLUENT_TOL: f64 = 1e-7;

/// First divided differences over an eigenvalue list.
#[derive(Debug, Clone, PartialEq)]
pub struct LoewnerMatrix {
    n: usize,
    entries: Vec<f64>,
}

impl LoewnerMatrix {
    pub fn new(seed: &FunctionSeed, eigenvalues: &[f64]) -> Result<Self> {
        for &x in eigenvalues {
            check_spectrum(seed, x)?;
        }
        let n = eigenvalues.len();
        let mut entries = vec![0.0; n * n];
        for i in 0..n {
            entries[i * n + i] = seed.eval_prime(eigenvalues[i]);
            for j in (i + 1)..n {
                let d = quotient(seed, eigenvalues[i], eigenvalues[j]);
                entries[i * n + j] = d;
                entries[j * n + i] = d;
            }
        }
        Ok(Self { n, entries })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    /// Entrywise product with a complex matrix of the same size.
    pub fn hadamard(&self, m: &[Complex64]) -> Vec<Complex64> {
        m.iter().zip(&self.entries).map(|(z, &d)| z * d).collect()
    }
}

fn check_spectrum(seed: &FunctionSeed, eigenvalue: f64) -> Result<()> {
    if seed.in_domain(eigenvalue) {
        Ok(())
    } else {
        Err(Error::SpectrumOutOfDomain {
            eigenvalue,
            gamma: seed.gamma(),
        })
    }
}

fn quotient(seed: &FunctionSeed, x: f64, y: f64) -> f64 {
    if (x - y).abs() > CONFLUENT_TOL * 1f64.max(x.abs()).max(y.abs()) {
        (seed.eval(x) - seed.eval(y)) / (x - y)
    } else {
        seed.eval_prime(0.5 * (x + y))
    }
}

/// `f[x, y]`, symmetric in its arguments.
pub fn divided_difference(seed: &FunctionSeed, x: f64, y: f64) -> Result<f64> {
    seed.check_domain(x)?;
    seed.check_domain(y)?;
    Ok(quotient(seed, x, y))
}

/// `f(A) = U f(Λ) U^H`.
pub fn apply(seed: &FunctionSeed, a: &HermitianMatrix) -> Result<HermitianMatrix> {
    apply_decomposed(seed, &eigh(a)?)
}

pub fn apply_decomposed(seed: &FunctionSeed, d: &SpectralDecomposition) -> Result<HermitianMatrix> {
    check_spectrum(seed, d.min())?;
    Ok(d.map_eigenvalues(|x| seed.eval(x)))
}

/// Directional derivative `lim (f(A + tC) - f(A)) / t` as `t -> 0`.
pub fn frechet(seed: &FunctionSeed, a: &HermitianMatrix, c: &HermitianMatrix) -> Result<HermitianMatrix> {
    if a.dim() != c.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            actual: c.dim(),
        });
    }
    let d = eigh(a)?;
    let loewner = LoewnerMatrix::new(seed, d.eigenvalues())?;
    Ok(d.from_eigenbasis(&loewner.hadamard(&d.to_eigenbasis(c))))
}
