//! Dense complex Hermitian matrices, the cyclic Jacobi eigensolver, and the
//! semidefinite order predicates built on it.
//!
//! Matrices are stored row-major. Every [`HermitianMatrix`] is exactly
//! self-adjoint: the constructor checks the input against a relative
//! tolerance and then replaces it by `(A + A^H) / 2`.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance on `|a_ij - conj(a_ji)|` accepted at construction.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Jacobi stops once the off-diagonal Frobenius norm drops below this times `||A||_F`.
pub const JACOBI_TOL: f64 = 1e-12;
pub const JACOBI_MAX_SWEEPS: usize = 30;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixWire", into = "MatrixWire")]
pub struct HermitianMatrix {
    n: usize,
    entries: Vec<Complex64>,
}

/// `{"n": int, "entries": [[[re, im], ...], ...]}`, row-major.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct MatrixWire {
    n: usize,
    entries: Vec<Vec<[f64; 2]>>,
}

impl TryFrom<MatrixWire> for HermitianMatrix {
    type Error = Error;

    fn try_from(wire: MatrixWire) -> Result<Self> {
        if wire.entries.len() != wire.n {
            return Err(Error::DimensionMismatch {
                expected: wire.n,
                actual: wire.entries.len(),
            });
        }
        let mut flat = Vec::with_capacity(wire.n * wire.n);
        for row in &wire.entries {
            if row.len() != wire.n {
                return Err(Error::DimensionMismatch {
                    expected: wire.n,
                    actual: row.len(),
                });
            }
            flat.extend(row.iter().map(|&[re, im]| Complex64::new(re, im)));
        }
        HermitianMatrix::new(wire.n, flat)
    }
}

impl From<HermitianMatrix> for MatrixWire {
    fn from(m: HermitianMatrix) -> Self {
        let entries = m
            .entries
            .chunks(m.n)
            .map(|row| row.iter().map(|z| [z.re + 0.0, z.im + 0.0]).collect())
            .collect();
        MatrixWire { n: m.n, entries }
    }
}

impl HermitianMatrix {
    /// Builds a Hermitian matrix from `n * n` row-major entries.
    ///
    /// Rejects inputs whose asymmetry exceeds `HERMITIAN_TOL * max|entry|`,
    /// then symmetrizes exactly.
    pub fn new(n: usize, entries: Vec<Complex64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyMatrix);
        }
        if entries.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                actual: entries.len(),
            });
        }
        if let Some(k) = entries.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite {
                row: k / n,
                col: k % n,
            });
        }
        let scale = entries.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let tol = HERMITIAN_TOL * scale;
        for i in 0..n {
            for j in i..n {
                let deviation = (entries[i * n + j] - entries[j * n + i].conj()).norm();
                if deviation > tol {
                    return Err(Error::NotHermitian {
                        row: i,
                        col: j,
                        deviation,
                    });
                }
            }
        }
        Ok(Self::symmetrized(n, entries))
    }

    /// Replaces `m` by `(m + m^H) / 2` without any tolerance check.
    pub(crate) fn symmetrized(n: usize, mut m: Vec<Complex64>) -> Self {
        for i in 0..n {
            m[i * n + i] = Complex64::new(m[i * n + i].re, 0.0);
            for j in (i + 1)..n {
                let avg = (m[i * n + j] + m[j * n + i].conj()) * 0.5;
                m[i * n + j] = avg;
                m[j * n + i] = avg.conj();
            }
        }
        Self { n, entries: m }
    }

    pub fn from_real(n: usize, entries: &[f64]) -> Result<Self> {
        Self::new(n, entries.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let flat: Vec<f64> = rows.iter().flatten().copied().collect();
        Self::from_real(n, &flat)
    }

    pub fn zeros(n: usize) -> Self {
        assert!(n > 0, "dimension must be positive");
        Self {
            n,
            entries: vec![ZERO; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::scalar(n, 1.0)
    }

    pub fn scalar(n: usize, c: f64) -> Self {
        Self::diagonal(&vec![c; n])
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let n = values.len();
        let mut m = Self::zeros(n);
        for (i, &v) in values.iter().enumerate() {
            m.entries[i * n + i] = Complex64::new(v, 0.0);
        }
        m
    }

    /// The rank-one projector-like matrix `v v^H`.
    pub fn outer(v: &[Complex64]) -> Self {
        let n = v.len();
        let mut m = Vec::with_capacity(n * n);
        for vi in v {
            for vj in v {
                m.push(vi * vj.conj());
            }
        }
        Self::symmetrized(n, m)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.n + col]
    }

    /// Row-major entries.
    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                actual: other.n,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Self { n: self.n, entries })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a - b)
            .collect();
        Ok(Self { n: self.n, entries })
    }

    pub fn scale(&self, c: f64) -> Self {
        Self {
            n: self.n,
            entries: self.entries.iter().map(|z| z * c).collect(),
        }
    }

    /// `self + c I`.
    pub fn shift(&self, c: f64) -> Self {
        let mut out = self.clone();
        for i in 0..self.n {
            out.entries[i * self.n + i] += c;
        }
        out
    }

    /// Plain matrix product; the result is in general not Hermitian.
    pub fn matmul(&self, other: &Self) -> Result<Vec<Complex64>> {
        self.check_dim(other)?;
        Ok(matmul(self.n, &self.entries, &other.entries))
    }

    /// `||AB - BA||_F`.
    pub fn commutator_norm(&self, other: &Self) -> Result<f64> {
        let ab = self.matmul(other)?;
        let ba = other.matmul(self)?;
        Ok(ab
            .iter()
            .zip(&ba)
            .map(|(x, y)| (x - y).norm_sqr())
            .sum::<f64>()
            .sqrt())
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.n, "vector length must match dimension");
        self.entries
            .chunks(self.n)
            .map(|row| row.iter().zip(v).map(|(a, x)| a * x).sum())
            .collect()
    }

    /// `<A w, w>`, which is real for Hermitian `A`.
    pub fn quadratic_form(&self, w: &[Complex64]) -> f64 {
        let aw = self.mul_vec(w);
        aw.iter().zip(w).map(|(a, x)| (a * x.conj()).re).sum()
    }

    /// `V A V^H` for a unitary `V` given row-major.
    pub fn conjugate_by(&self, v: &[Complex64]) -> Self {
        let n = self.n;
        assert_eq!(v.len(), n * n, "unitary must be n x n");
        let av = matmul_adj_right(n, &matmul(n, v, &self.entries), v);
        Self::symmetrized(n, av)
    }
}

pub(crate) fn matmul(n: usize, a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![ZERO; n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i * n + k];
            if aik == ZERO {
                continue;
            }
            for j in 0..n {
                out[i * n + j] += aik * b[k * n + j];
            }
        }
    }
    out
}

/// `a * b^H`.
pub(crate) fn matmul_adj_right(n: usize, a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![ZERO; n * n];
    for i in 0..n {
        for j in 0..n {
            out[i * n + j] = (0..n).map(|k| a[i * n + k] * b[j * n + k].conj()).sum();
        }
    }
    out
}

/// `a^H * b`.
pub(crate) fn matmul_adj_left(n: usize, a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![ZERO; n * n];
    for k in 0..n {
        for i in 0..n {
            let aki = a[k * n + i].conj();
            if aki == ZERO {
                continue;
            }
            for j in 0..n {
                out[i * n + j] += aki * b[k * n + j];
            }
        }
    }
    out
}

/// Eigenvalues in ascending order with a unitary frame of eigenvectors.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomposition {
    eigenvalues: Vec<f64>,
    /// Row-major; column `k` is the eigenvector for `eigenvalues[k]`.
    frame: Vec<Complex64>,
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Row-major unitary whose columns are eigenvectors.
    pub fn frame(&self) -> &[Complex64] {
        &self.frame
    }

    pub fn eigenvector(&self, k: usize) -> Vec<Complex64> {
        let n = self.dim();
        (0..n).map(|i| self.frame[i * n + k]).collect()
    }

    pub fn min(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues[self.dim() - 1]
    }

    /// `lambda_max - lambda_min`.
    pub fn width(&self) -> f64 {
        self.max() - self.min()
    }

    /// `U diag(g(lambda)) U^H`.
    pub fn map_eigenvalues(&self, g: impl Fn(f64) -> f64) -> HermitianMatrix {
        let n = self.dim();
        let mut scaled = self.frame.clone();
        for k in 0..n {
            let gk = g(self.eigenvalues[k]);
            for i in 0..n {
                scaled[i * n + k] *= gk;
            }
        }
        HermitianMatrix::symmetrized(n, matmul_adj_right(n, &scaled, &self.frame))
    }

    /// `U diag(lambda) U^H`.
    pub fn reconstruct(&self) -> HermitianMatrix {
        self.map_eigenvalues(|x| x)
    }

    /// `U^H C U`, the matrix of `C` in the eigenbasis.
    pub fn to_eigenbasis(&self, c: &HermitianMatrix) -> Vec<Complex64> {
        let n = self.dim();
        matmul_adj_left(n, &self.frame, &matmul(n, &c.entries, &self.frame))
    }

    /// `U M U^H`, symmetrized.
    pub fn from_eigenbasis(&self, m: &[Complex64]) -> HermitianMatrix {
        let n = self.dim();
        HermitianMatrix::symmetrized(n, matmul_adj_right(n, &matmul(n, &self.frame, m), &self.frame))
    }
}

fn off_diagonal_norm(n: usize, a: &[Complex64]) -> f64 {
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[i * n + j].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Cyclic complex Jacobi eigensolver.
///
/// Each rotation first removes the phase of `a_pq` with `diag(1, e^{-i phi})`
/// and then applies the classical real Jacobi rotation, so the combined
/// unitary annihilates the `(p, q)` pair.
pub fn eigh(a: &HermitianMatrix) -> Result<SpectralDecomposition> {
    let n = a.n;
    let mut m = a.entries.clone();
    let mut v = vec![ZERO; n * n];
    for i in 0..n {
        v[i * n + i] = ONE;
    }
    let threshold = JACOBI_TOL * a.frobenius_norm();

    let mut converged = off_diagonal_norm(n, &m) <= threshold;
    let mut sweeps = 0;
    while !converged && sweeps < JACOBI_MAX_SWEEPS {
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(n, &mut m, &mut v, p, q);
            }
        }
        sweeps += 1;
        converged = off_diagonal_norm(n, &m) <= threshold;
    }
    if !converged {
        return Err(Error::NoConvergence {
            sweeps,
            residual: off_diagonal_norm(n, &m),
        });
    }
    // Convergence is quadratic near the end; one more sweep takes the
    // residual from the stopping threshold down to roundoff.
    if sweeps > 0 {
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(n, &mut m, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[i * n + i].re.total_cmp(&m[j * n + j].re));
    let eigenvalues = order.iter().map(|&k| m[k * n + k].re).collect();
    let mut frame = vec![ZERO; n * n];
    for (new, &old) in order.iter().enumerate() {
        for i in 0..n {
            frame[i * n + new] = v[i * n + old];
        }
    }
    Ok(SpectralDecomposition { eigenvalues, frame })
}

fn rotate(n: usize, m: &mut [Complex64], v: &mut [Complex64], p: usize, q: usize) {
    let apq = m[p * n + q];
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    let app = m[p * n + p].re;
    let aqq = m[q * n + q].re;
    // a_pq is negligible against both diagonal entries: zero it directly.
    if app.abs() + 1e3 * r == app.abs() && aqq.abs() + 1e3 * r == aqq.abs() {
        m[p * n + q] = ZERO;
        m[q * n + p] = ZERO;
        return;
    }
    let phase = apq / r;
    let theta = (aqq - app) / (2.0 * r);
    let t = if theta >= 0.0 {
        1.0 / (theta + (theta * theta + 1.0).sqrt())
    } else {
        -1.0 / (-theta + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    // U restricted to (p, q): [[c, s], [-s e^{-i phi}, c e^{-i phi}]].
    let ph = phase.conj();
    let u_pp = Complex64::new(c, 0.0);
    let u_pq = Complex64::new(s, 0.0);
    let u_qp = ph * (-s);
    let u_qq = ph * c;

    // M <- M U (columns p, q).
    for k in 0..n {
        let mkp = m[k * n + p];
        let mkq = m[k * n + q];
        m[k * n + p] = mkp * u_pp + mkq * u_qp;
        m[k * n + q] = mkp * u_pq + mkq * u_qq;
    }
    // M <- U^H M (rows p, q).
    for k in 0..n {
        let mpk = m[p * n + k];
        let mqk = m[q * n + k];
        m[p * n + k] = u_pp.conj() * mpk + u_qp.conj() * mqk;
        m[q * n + k] = u_pq.conj() * mpk + u_qq.conj() * mqk;
    }
    m[p * n + q] = ZERO;
    m[q * n + p] = ZERO;
    m[p * n + p] = Complex64::new(app - t * r, 0.0);
    m[q * n + q] = Complex64::new(aqq + t * r, 0.0);

    for k in 0..n {
        let vkp = v[k * n + p];
        let vkq = v[k * n + q];
        v[k * n + p] = vkp * u_pp + vkq * u_qp;
        v[k * n + q] = vkp * u_pq + vkq * u_qq;
    }
}

/// Smallest eigenvalue; `A` is PSD iff this is `>= 0` up to tolerance.
pub fn min_eigenvalue(a: &HermitianMatrix) -> Result<f64> {
    Ok(eigh(a)?.min())
}

/// `(G + G^H) / 2` with independent `N(0, spread^2)` real and imaginary parts.
///
/// The generator is ChaCha8 seeded from `seed`, so output is identical
/// across platforms for identical arguments.
pub fn random_hermitian(n: usize, seed: u64, spread: f64) -> HermitianMatrix {
    assert!(n > 0, "dimension must be positive");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g: Vec<Complex64> = (0..n * n)
        .map(|_| {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            Complex64::new(spread * re, spread * im)
        })
        .collect();
    HermitianMatrix::symmetrized(n, g)
}

/// Random unitary from the eigenframe of a random Hermitian matrix.
pub fn random_unitary(n: usize, seed: u64) -> Vec<Complex64> {
    let h = random_hermitian(n, seed, 1.0);
    eigh(&h)
        .expect("Jacobi converges on well-scaled random input")
        .frame
}
