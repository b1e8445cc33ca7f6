//! Centrality of a Hermitian matrix decided through local monotonicity.
//!
//! In the algebra of `n x n` complex matrices the central self-adjoint
//! elements are the real multiples of the identity. For a scalar `A` every
//! `B >= A` commutes with `A` and an increasing `f` gives `f(B) >= f(A)`.
//! For a non-scalar `A` we take the extreme eigenvalues `x < y` with
//! eigenvectors `u, v`. The plane `span{u, v}` reduces both `A` and
//! `B = (u + v)(u + v)^H`, and on it the pair looks exactly like
//! `(diag(x, y), ones)`, so the two-dimensional witness transfers verbatim:
//! `A <= A + t0 B` while `<f(A + t0 B) w, w> = <f(A) w, w> - delta` for
//! `w = lambda u + mu v`.
//!
//! No approximate eigenvectors or representation theory are needed here:
//! finite-dimensional spectra consist of exact eigenvalues and the identity
//! representation is irreducible on the full matrix algebra.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::calculus::{apply, apply_decomposed};
use crate::error::{Error, Result};
use crate::function::FunctionSeed;
use crate::hermitian::{eigh, min_eigenvalue, HermitianMatrix, SpectralDecomposition};
use crate::witness::{complex_vec, witness_2x2, Witness2};

/// Relative width below which a spectrum counts as a single point.
pub const CENTRAL_REL_TOL: f64 = 1e-9;
/// Allowed negativity of `min eig(B)` for a perturbation to count as PSD.
pub const PSD_TOL: f64 = 1e-12;
/// Allowed mismatch between a certificate's stated and recomputed margin.
pub const DELTA_TOL: f64 = 1e-9;
/// Allowed negativity of `min eig(f(B) - f(A))` for commuting ordered pairs.
pub const MONOTONE_TOL: f64 = 1e-10;
/// Relative commutator bound for the commuting check.
pub const COMMUTE_REL_TOL: f64 = 1e-10;

/// `CENTRAL_REL_TOL * max(1, |lambda_max|)`.
pub fn central_tolerance(d: &SpectralDecomposition) -> f64 {
    CENTRAL_REL_TOL * d.max().abs().max(1.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralPair {
    pub x: f64,
    pub y: f64,
    pub u: Vec<Complex64>,
    pub v: Vec<Complex64>,
}

/// The extreme eigenpairs `(lambda_min, u)` and `(lambda_max, v)`.
pub fn spectral_pair(d: &SpectralDecomposition) -> Result<SpectralPair> {
    let width = d.width();
    let tolerance = central_tolerance(d);
    if width <= tolerance {
        return Err(Error::NumericallyScalar { width, tolerance });
    }
    let last = d.dim() - 1;
    Ok(SpectralPair {
        x: d.min(),
        y: d.max(),
        u: d.eigenvector(0),
        v: d.eigenvector(last),
    })
}

/// Evidence that `A <= A + t0 B` but `f(A) <= f(A + t0 B)` fails.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ViolationCertificate {
    #[serde(rename = "B")]
    pub b: HermitianMatrix,
    pub t0: f64,
    #[serde(with = "complex_vec")]
    pub w: Vec<Complex64>,
    pub delta: f64,
    /// Smallest eigenvalue of `f(A + t0 B) - f(A)`.
    pub neg_eig: f64,
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Central,
    NonCentral,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CentralityVerdict {
    pub verdict: Verdict,
    pub certificate: Option<ViolationCertificate>,
    pub spectral_width: f64,
}

impl CentralityVerdict {
    pub fn is_central(&self) -> bool {
        self.verdict == Verdict::Central
    }
}

/// `<(f(A) - f(A + t0 B)) w, w>` and `min eig(f(A + t0 B) - f(A))`.
fn evaluate(
    seed: &FunctionSeed,
    fa: &HermitianMatrix,
    a: &HermitianMatrix,
    b: &HermitianMatrix,
    t0: f64,
    w: &[Complex64],
) -> Result<(f64, f64)> {
    let fab = apply(seed, &a.add(&b.scale(t0))?)?;
    let diff = fab.sub(fa)?;
    Ok((-diff.quadratic_form(w), min_eigenvalue(&diff)?))
}

/// Decides whether `A` is central and, if not, builds a certificate that
/// `f` is not monotone at `A`.
pub fn decide(seed: &FunctionSeed, a: &HermitianMatrix) -> Result<CentralityVerdict> {
    decide_with_witness(seed, a).map(|(verdict, _)| verdict)
}

/// As [`decide`], also returning the two-dimensional witness that was lifted.
pub fn decide_with_witness(seed: &FunctionSeed, a: &HermitianMatrix) -> Result<(CentralityVerdict, Option<Witness2>)> {
    let d = eigh(a)?;
    let fa = apply_decomposed(seed, &d)?;
    let spectral_width = d.width();
    let pair = match spectral_pair(&d) {
        Ok(pair) => pair,
        Err(Error::NumericallyScalar { .. }) => {
            return Ok((
                CentralityVerdict {
                    verdict: Verdict::Central,
                    certificate: None,
                    spectral_width,
                },
                None,
            ))
        }
        Err(e) => return Err(e),
    };

    let witness = witness_2x2(seed, pair.x, pair.y)?;
    let sum: Vec<Complex64> = pair.u.iter().zip(&pair.v).map(|(u, v)| u + v).collect();
    let b = HermitianMatrix::outer(&sum);
    let w: Vec<Complex64> = pair
        .u
        .iter()
        .zip(&pair.v)
        .map(|(u, v)| witness.lambda * u + witness.mu * v)
        .collect();

    let (delta, neg_eig) = evaluate(seed, &fa, a, &b, witness.t0, &w)?;
    if !(neg_eig < 0.0 && delta > 0.0) {
        return Err(Error::CertificateRejected(format!(
            "lifted witness gives delta = {delta:e}, min eigenvalue = {neg_eig:e}"
        )));
    }
    let certificate = ViolationCertificate {
        b,
        t0: witness.t0,
        w,
        delta,
        neg_eig,
        x: pair.x,
        y: pair.y,
    };
    Ok((
        CentralityVerdict {
            verdict: Verdict::NonCentral,
            certificate: Some(certificate),
            spectral_width,
        },
        Some(witness),
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateCheck {
    pub valid: bool,
    pub reasons: Vec<String>,
}

/// Re-checks a certificate from scratch: `B` is PSD, `f(A + t0 B) - f(A)`
/// has a negative eigenvalue, and the stated `delta` matches the form at `w`.
pub fn verify_certificate(seed: &FunctionSeed, a: &HermitianMatrix, cert: &ViolationCertificate) -> CertificateCheck {
    let mut reasons = Vec::new();
    if let Err(e) = check_certificate(seed, a, cert, &mut reasons) {
        reasons.push(e.to_string());
    }
    CertificateCheck {
        valid: reasons.is_empty(),
        reasons,
    }
}

fn check_certificate(
    seed: &FunctionSeed,
    a: &HermitianMatrix,
    cert: &ViolationCertificate,
    reasons: &mut Vec<String>,
) -> Result<()> {
    let n = a.dim();
    if cert.b.dim() != n || cert.w.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: if cert.b.dim() != n { cert.b.dim() } else { cert.w.len() },
        });
    }
    if !cert.t0.is_finite() {
        reasons.push(format!("t0 = {} is not finite", cert.t0));
        return Ok(());
    }

    let b_min = min_eigenvalue(&cert.b)?;
    if b_min < -PSD_TOL {
        reasons.push(format!("perturbation is not PSD: min eigenvalue of B is {b_min:e}"));
    }
    if cert.t0 < 0.0 {
        reasons.push(format!("t0 = {} is negative, so A <= A + t0 B fails", cert.t0));
    }

    let fa = apply(seed, a)?;
    let (delta, neg_eig) = evaluate(seed, &fa, a, &cert.b, cert.t0, &cert.w)?;
    if !(neg_eig < 0.0) {
        reasons.push(format!(
            "f(A + t0 B) - f(A) is PSD: min eigenvalue {neg_eig:e}"
        ));
    }
    if !((delta - cert.delta).abs() <= DELTA_TOL) {
        reasons.push(format!(
            "stated delta {:e} differs from recomputed {delta:e}",
            cert.delta
        ));
    }
    Ok(())
}

/// Checks `f(A) <= f(B)` for a commuting ordered pair `A <= B`.
pub fn monotone_commuting_check(seed: &FunctionSeed, a: &HermitianMatrix, b: &HermitianMatrix) -> Result<bool> {
    let comm = a.commutator_norm(b)?;
    if comm > COMMUTE_REL_TOL * a.frobenius_norm() * b.frobenius_norm() {
        return Err(Error::NotCommuting(comm));
    }
    let gap = min_eigenvalue(&b.sub(a)?)?;
    if gap < -MONOTONE_TOL {
        return Err(Error::NotOrdered(gap));
    }
    let diff = apply(seed, b)?.sub(&apply(seed, a)?)?;
    Ok(min_eigenvalue(&diff)? >= -MONOTONE_TOL)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermitian::{random_hermitian, random_unitary};

    #[test]
    fn pair_of_diagonal() {
        let d = eigh(&HermitianMatrix::diagonal(&[1.0, 3.0])).unwrap();
        let p = spectral_pair(&d).unwrap();
        assert_eq!((p.x, p.y), (1.0, 3.0));
        assert_eq!(p.u, vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]);
        assert_eq!(p.v, vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)]);

        let d = eigh(&HermitianMatrix::diagonal(&[1.0, 2.0, 5.0])).unwrap();
        let p = spectral_pair(&d).unwrap();
        assert_eq!((p.x, p.y), (1.0, 5.0));
        assert_eq!(p.v[2], Complex64::new(1.0, 0.0));
        assert_eq!(p.u[0], Complex64::new(1.0, 0.0));

        let d = eigh(&HermitianMatrix::scalar(3, 2.0)).unwrap();
        assert!(matches!(spectral_pair(&d), Err(Error::NumericallyScalar { .. })));
    }

    #[test]
    fn scalar_is_central() {
        let v = decide(&FunctionSeed::exp(), &HermitianMatrix::scalar(3, 2.0)).unwrap();
        assert!(v.is_central());
        assert!(v.certificate.is_none());
        assert_eq!(v.spectral_width, 0.0);
    }

    #[test]
    fn diag_one_three_square() {
        let sq = FunctionSeed::pow(2.0).unwrap();
        let a = HermitianMatrix::diagonal(&[1.0, 3.0]);
        let v = decide(&sq, &a).unwrap();
        assert_eq!(v.verdict, Verdict::NonCentral);
        let c = v.certificate.as_ref().unwrap();
        assert_eq!(c.b, HermitianMatrix::from_real(2, &[1.0; 4]).unwrap());
        assert!(c.delta > 0.0 && c.neg_eig < 0.0);

        // (A + t0 B)^2 - A^2 evaluated by plain products.
        let moved = a.add(&c.b.scale(c.t0)).unwrap();
        let sq_moved = moved.matmul(&moved).unwrap();
        let sq_a = a.matmul(&a).unwrap();
        let diff: Vec<Complex64> = sq_moved.iter().zip(&sq_a).map(|(p, q)| p - q).collect();
        let diff = HermitianMatrix::new(2, diff).unwrap();
        assert!(min_eigenvalue(&diff).unwrap() < 0.0);
        assert!((diff.quadratic_form(&c.w) + c.delta).abs() < 1e-12);
        assert!(verify_certificate(&sq, &a, c).valid);
    }

    #[test]
    fn repeated_eigenvalue_exp() {
        let e = FunctionSeed::exp();
        let a = HermitianMatrix::diagonal(&[1.0, 1.0, 5.0]);
        let v = decide(&e, &a).unwrap();
        let c = v.certificate.unwrap();
        assert_eq!((c.x, c.y), (1.0, 5.0));
        let check = verify_certificate(&e, &a, &c);
        assert!(check.valid, "{:?}", check.reasons);
    }

    #[test]
    fn tampered_certificates_fail() {
        let e = FunctionSeed::exp();
        let a = random_hermitian(4, 21, 1.0);
        let c = decide(&e, &a).unwrap().certificate.unwrap();

        let mut zero_step = c.clone();
        zero_step.t0 = 0.0;
        let r = verify_certificate(&e, &a, &zero_step);
        assert!(!r.valid);

        let mut flipped = c.clone();
        flipped.b = c.b.scale(-1.0);
        let r = verify_certificate(&e, &a, &flipped);
        assert!(!r.valid);
        assert!(r.reasons.iter().any(|s| s.contains("not PSD")));

        let mut wrong_delta = c.clone();
        wrong_delta.delta *= 2.0;
        assert!(!verify_certificate(&e, &a, &wrong_delta).valid);

        let other = random_hermitian(3, 1, 1.0);
        assert!(!verify_certificate(&e, &other, &c).valid);
    }

    #[test]
    fn certificate_out_of_domain_is_invalid_not_panic() {
        let sq = FunctionSeed::pow(2.0).unwrap();
        let a = HermitianMatrix::diagonal(&[1.0, 3.0]);
        let c = decide(&sq, &a).unwrap().certificate.unwrap();
        let r = verify_certificate(&sq, &HermitianMatrix::diagonal(&[-1.0, 3.0]), &c);
        assert!(!r.valid);
    }

    #[test]
    fn decide_rejects_out_of_domain() {
        let r = decide(&FunctionSeed::pow(2.0).unwrap(), &HermitianMatrix::diagonal(&[-1.0, 2.0]));
        assert!(matches!(r, Err(Error::SpectrumOutOfDomain { .. })));
    }

    #[test]
    fn ogasawara_pair() {
        let a = HermitianMatrix::from_real(2, &[1.0, 1.0, 1.0, 1.0]).unwrap();
        let b = HermitianMatrix::from_real(2, &[2.0, 1.0, 1.0, 1.0]).unwrap();
        assert!(min_eigenvalue(&b.sub(&a).unwrap()).unwrap() >= 0.0);
        let sq = |m: &HermitianMatrix| HermitianMatrix::new(2, m.matmul(m).unwrap()).unwrap();
        let gap = sq(&b).sub(&sq(&a)).unwrap();
        assert_eq!(gap, HermitianMatrix::from_real(2, &[3.0, 1.0, 1.0, 0.0]).unwrap());
        assert!(min_eigenvalue(&gap).unwrap() < 0.0);

        // [[1,1],[1,1]] has a zero eigenvalue, outside the pow domain (0, inf).
        let p2 = FunctionSeed::pow(2.0).unwrap();
        assert!(matches!(decide(&p2, &a), Err(Error::SpectrumOutOfDomain { .. })));
        let e = FunctionSeed::exp();
        let c = decide(&e, &a).unwrap().certificate.unwrap();
        assert!(verify_certificate(&e, &a, &c).valid);
        let shifted = a.shift(0.5);
        let c = decide(&p2, &shifted).unwrap().certificate.unwrap();
        assert!(verify_certificate(&p2, &shifted, &c).valid);
    }

    #[test]
    fn commuting_examples() {
        let sq = FunctionSeed::pow(2.0).unwrap();
        assert!(monotone_commuting_check(
            &sq,
            &HermitianMatrix::diagonal(&[1.0, 2.0]),
            &HermitianMatrix::diagonal(&[2.0, 3.0])
        )
        .unwrap());

        let e = FunctionSeed::exp();
        let p = HermitianMatrix::outer(&[Complex64::new(1.0, 0.0), Complex64::new(0.5, -2.0)]);
        let a = HermitianMatrix::scalar(2, 0.3);
        assert!(monotone_commuting_check(&e, &a, &a.add(&p.scale(0.7)).unwrap()).unwrap());

        let v = random_unitary(4, 3);
        let a = HermitianMatrix::diagonal(&[-1.0, 0.0, 0.5, 2.0]).conjugate_by(&v);
        let b = HermitianMatrix::diagonal(&[-0.5, 0.0, 1.5, 2.1]).conjugate_by(&v);
        assert!(monotone_commuting_check(&e, &a, &b).unwrap());
    }

    #[test]
    fn commuting_preconditions() {
        let e = FunctionSeed::exp();
        let a = HermitianMatrix::diagonal(&[1.0, 2.0]);
        let b = HermitianMatrix::from_real(2, &[3.0, 1.0, 1.0, 3.0]).unwrap();
        assert!(matches!(monotone_commuting_check(&e, &a, &b), Err(Error::NotCommuting(_))));
        let lower = HermitianMatrix::diagonal(&[0.0, 3.0]);
        assert!(matches!(monotone_commuting_check(&e, &a, &lower), Err(Error::NotOrdered(_))));
    }

    #[test]
    fn verdict_json_shape() {
        let v = decide(&FunctionSeed::exp(), &HermitianMatrix::diagonal(&[0.0, 1.0])).unwrap();
        let json: serde_json::Value = serde_json::to_value(&v).unwrap();
        assert_eq!(json["verdict"], "NonCentral");
        let cert = &json["certificate"];
        for key in ["B", "t0", "w", "delta", "neg_eig", "x", "y"] {
            assert!(cert.get(key).is_some(), "missing {key}");
        }
        assert_eq!(cert["B"]["n"], 2);
        let back: CentralityVerdict = serde_json::from_value(json).unwrap();
        assert_eq!(back, v);
    }
}
