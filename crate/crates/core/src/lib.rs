//! Centrality of Hermitian matrices through local monotonicity of matrix
//! functions.
//!
//! For `f` with `f' > 0`, `f'` strictly increasing and `log f'` concave on
//! `(gamma, inf)` (for example `exp`, or `x^p` with `p > 1`), a Hermitian
//! matrix `A` with spectrum in the domain is a multiple of the identity if
//! and only if `A <= B` always implies `f(A) <= f(B)`. [`decide`] makes the
//! non-trivial direction constructive: for non-scalar `A` it returns a
//! [`ViolationCertificate`] `(B, t0, w, delta)` with `B >= 0` and
//! `<f(A + t0 B) w, w> = <f(A) w, w> - delta < <f(A) w, w>`, which
//! [`verify_certificate`] re-checks independently.
//!
//! Modules, bottom up:
//!
//! * [`hermitian`]: matrices, Jacobi eigensolver, order predicates, sampling.
//! * [`function`]: function seeds and sampled admissibility checks.
//! * [`calculus`]: `f(A)`, divided differences, Fréchet derivatives.
//! * [`witness`]: the 2x2 witness `(lambda, mu, t0, delta)`.
//! * [`centrality`]: lifting the witness to `n x n` and verifying it.

pub mod calculus;
pub mod centrality;
pub mod error;
pub mod function;
pub mod hermitian;
pub mod witness;

pub use calculus::{apply, divided_difference, frechet, LoewnerMatrix};
pub use centrality::{
    decide, monotone_commuting_check, spectral_pair, verify_certificate, CentralityVerdict,
    CertificateCheck, SpectralPair, Verdict, ViolationCertificate,
};
pub use error::{Error, Result};
pub use function::{
    builtin_seed, chain_inequality_check, verify_conditions, ChainCheck, ConditionReport,
    FunctionSeed,
};
pub use hermitian::{eigh, min_eigenvalue, random_hermitian, HermitianMatrix, SpectralDecomposition};
pub use num_complex::Complex64;
pub use witness::{build_l, find_t0, negative_direction, witness_2x2, Sym2, Witness2};
