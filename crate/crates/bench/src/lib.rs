//! Benchmark fixtures shared by the criterion targets.

use opmono::{min_eigenvalue, random_hermitian, HermitianMatrix};

/// Random Hermitian matrix shifted so its spectrum starts at 1.
pub fn positive_instance(n: usize, seed: u64) -> HermitianMatrix {
    let a = random_hermitian(n, seed, 1.0);
    let lo = min_eigenvalue(&a).expect("eigensolver converges on random input");
    a.shift(1.0 - lo)
}
