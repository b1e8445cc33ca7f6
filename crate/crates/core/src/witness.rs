//! Two-dimensional non-monotonicity witnesses.
//!
//! For `A = diag(x, y)` with `x != y`, the all-ones matrix `B` and an
//! admissible `f`, the derivative of `t -> f(A + tB)` at zero is
//!
//! ```text
//! L = [[f'(x), f[x,y]], [f[x,y], f'(y)]]
//! ```
//!
//! and `det L = f'(x) f'(y) - f[x,y]^2 < 0`. A unit eigenvector `w` for the
//! negative eigenvalue of `L` gives `<f(A + tB) w, w> < <f(A) w, w>` for all
//! small `t > 0`. The engine finds such a `t0` and records the margin
//! `delta = <f(A) w, w> - <f(A + t0 B) w, w>`.

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::calculus::{apply, divided_difference};
use crate::error::{Error, Result};
use crate::function::FunctionSeed;
use crate::hermitian::HermitianMatrix;

/// `negative_direction` refuses matrices whose smallest eigenvalue is above this.
pub const NEGATIVE_EIG_TOL: f64 = -1e-14;
/// Number of halvings tried when searching for `t0`.
pub const T0_LEVELS: usize = 61;
/// Points in the geometric refinement grid on `[t0 / 2, 2 t0]`.
pub const T0_REFINE_POINTS: usize = 33;

/// Real symmetric 2x2 matrix `[[xx, xy], [xy, yy]]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sym2 {
    pub xx: f64,
    pub xy: f64,
    pub yy: f64,
}

impl Sym2 {
    pub fn det(&self) -> f64 {
        self.xx * self.yy - self.xy * self.xy
    }

    pub fn to_array(&self) -> [[f64; 2]; 2] {
        [[self.xx, self.xy], [self.xy, self.yy]]
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let half_trace = 0.5 * (self.xx + self.yy);
        let radius = (0.5 * (self.xx - self.yy)).hypot(self.xy);
        half_trace - radius
    }

    /// `<M w, w>` for complex `w = (lambda, mu)`.
    pub fn quadratic_form(&self, lambda: Complex64, mu: Complex64) -> f64 {
        self.xx * lambda.norm_sqr() + self.yy * mu.norm_sqr() + 2.0 * self.xy * (lambda.conj() * mu).re
    }
}

/// The linearization `L` of `t -> f(diag(x, y) + t * ones)` at `t = 0`.
pub fn build_l(seed: &FunctionSeed, x: f64, y: f64) -> Result<Sym2> {
    seed.check_domain(x)?;
    seed.check_domain(y)?;
    if x == y {
        return Err(Error::DegeneratePair(x));
    }
    Ok(Sym2 {
        xx: seed.eval_prime(x),
        xy: divided_difference(seed, x, y)?,
        yy: seed.eval_prime(y),
    })
}

/// Unit eigenvector `(lambda, mu)` for the smallest eigenvalue of `l`, with
/// its largest-magnitude component real and positive (first one on ties).
pub fn negative_direction(l: &Sym2) -> Result<(Complex64, Complex64, f64)> {
    let eig = l.min_eigenvalue();
    if !(eig < NEGATIVE_EIG_TOL) {
        return Err(Error::NoNegativeDirection(eig));
    }
    // Two candidate kernel vectors of L - eig I; keep the better conditioned one.
    let (a, b) = if l.xy == 0.0 {
        if l.xx <= l.yy {
            (1.0, 0.0)
        } else {
            (0.0, 1.0)
        }
    } else {
        let first = (l.xy, eig - l.xx);
        let second = (eig - l.yy, l.xy);
        if first.0.hypot(first.1) >= second.0.hypot(second.1) {
            first
        } else {
            second
        }
    };
    let norm = a.hypot(b);
    let (mut a, mut b) = (a / norm, b / norm);
    let lead = if a.abs() >= b.abs() { a } else { b };
    if lead < 0.0 {
        a = -a;
        b = -b;
    }
    Ok((Complex64::new(a, 0.0), Complex64::new(b, 0.0), eig))
}

/// The 2x2 model `(A, B, w)` used by the witness search.
struct Model {
    seed: FunctionSeed,
    a: HermitianMatrix,
    ones: HermitianMatrix,
    w: [Complex64; 2],
    base: f64,
}

impl Model {
    fn new(seed: &FunctionSeed, x: f64, y: f64, lambda: Complex64, mu: Complex64) -> Result<Self> {
        let a = HermitianMatrix::diagonal(&[x, y]);
        let ones = HermitianMatrix::from_real(2, &[1.0; 4])?;
        let w = [lambda, mu];
        let base = apply(seed, &a)?.quadratic_form(&w);
        Ok(Self {
            seed: seed.clone(),
            a,
            ones,
            w,
            base,
        })
    }

    /// `<f(A) w, w> - <f(A + tB) w, w>`.
    fn margin(&self, t: f64) -> Result<f64> {
        let moved = self.a.add(&self.ones.scale(t))?;
        Ok(self.base - apply(&self.seed, &moved)?.quadratic_form(&self.w))
    }
}

/// `<f(diag(x, y)) w, w> - <f(diag(x, y) + t * ones) w, w>` with `w = (lambda, mu)`.
pub fn margin_at(seed: &FunctionSeed, x: f64, y: f64, lambda: Complex64, mu: Complex64, t: f64) -> Result<f64> {
    Model::new(seed, x, y, lambda, mu)?.margin(t)
}

/// Searches `t_init * 2^-k`, `k = 0..60`, for the first positive margin and
/// then keeps the best point of a 33-point geometric grid on `[t0/2, 2 t0]`.
///
/// Returns `(t0, delta)` with `delta > 0`.
pub fn find_t0(seed: &FunctionSeed, x: f64, y: f64, lambda: Complex64, mu: Complex64) -> Result<(f64, f64)> {
    let norm = lambda.norm_sqr() + mu.norm_sqr();
    if (norm - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidArgument(format!(
            "direction must be a unit vector, |lambda|^2 + |mu|^2 = {norm}"
        )));
    }
    let model = Model::new(seed, x, y, lambda, mu)?;
    let t_init = (x - y).abs().max(1.0);

    let mut found = None;
    for k in 0..T0_LEVELS {
        let t = t_init * (-(k as f64)).exp2();
        let delta = model.margin(t)?;
        if delta > 0.0 {
            found = Some((t, delta));
            break;
        }
    }
    let (coarse, mut best) = found.ok_or(Error::WitnessSearchFailed { x, y })?;

    let mut best_t = coarse;
    let steps = (T0_REFINE_POINTS - 1) as f64;
    for j in 0..T0_REFINE_POINTS {
        let t = coarse * (2.0 * j as f64 / steps - 1.0).exp2();
        let delta = model.margin(t)?;
        if delta > best {
            best = delta;
            best_t = t;
        }
    }
    Ok((best_t, best))
}

/// A certificate that `f` is not monotone at `diag(x, y)`:
/// `diag(x, y) <= diag(x, y) + t0 * ones` but
/// `<f(diag(x, y) + t0 * ones) w, w> = <f(diag(x, y)) w, w> - delta`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness2 {
    pub x: f64,
    pub y: f64,
    #[serde(with = "complex_pair")]
    pub lambda: Complex64,
    #[serde(with = "complex_pair")]
    pub mu: Complex64,
    pub t0: f64,
    pub delta: f64,
    #[serde(rename = "L_det")]
    pub l_det: f64,
}

impl Witness2 {
    /// Recomputes the margin from the stored fields.
    pub fn recompute_delta(&self, seed: &FunctionSeed) -> Result<f64> {
        margin_at(seed, self.x, self.y, self.lambda, self.mu, self.t0)
    }
}

pub fn witness_2x2(seed: &FunctionSeed, x: f64, y: f64) -> Result<Witness2> {
    let l = build_l(seed, x, y)?;
    let (lambda, mu, _) = negative_direction(&l)?;
    let (t0, delta) = find_t0(seed, x, y, lambda, mu)?;
    Ok(Witness2 {
        x,
        y,
        lambda,
        mu,
        t0,
        delta,
        l_det: l.det(),
    })
}

/// `[re, im]` encoding for a single complex number.
pub(crate) mod complex_pair {
    use super::*;

    pub fn serialize<S: Serializer>(z: &Complex64, s: S) -> std::result::Result<S::Ok, S::Error> {
        [z.re + 0.0, z.im + 0.0].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Complex64, D::Error> {
        let [re, im] = <[f64; 2]>::deserialize(d)?;
        Ok(Complex64::new(re, im))
    }
}

/// `[[re, im], ...]` encoding for complex vectors.
pub(crate) mod complex_vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[Complex64], s: S) -> std::result::Result<S::Ok, S::Error> {
        v.iter()
            .map(|z| [z.re + 0.0, z.im + 0.0])
            .collect::<Vec<_>>()
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Complex64>, D::Error> {
        let raw = Vec::<[f64; 2]>::deserialize(d)?;
        Ok(raw.into_iter().map(|[re, im]| Complex64::new(re, im)).collect())
    }
}
