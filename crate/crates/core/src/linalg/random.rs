//! Seeded random generators.
//!
//! The generator is ChaCha8, a counter-based stream cipher: a `(seed, stream)`
//! pair fully determines the output on every platform, so Monte Carlo drivers
//! shard work by assigning each trial its own stream.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::linalg::matrix::{inner, norm, ComplexMatrix};
use crate::scalar::{Real, C};

/// User-facing seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub struct RngSeed(pub u64);

impl RngSeed {
    pub fn rng(self) -> SeededRng {
        SeededRng::new(self.0)
    }

    pub fn stream(self, stream: u64) -> SeededRng {
        SeededRng::with_stream(self.0, stream)
    }
}

#[derive(Debug, Clone)]
pub struct SeededRng(ChaCha8Rng);

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        Self(ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn with_stream(seed: u64, stream: u64) -> Self {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        r.set_stream(stream);
        Self(r)
    }

    pub fn gaussian(&mut self) -> f64 {
        self.0.sample(StandardNormal)
    }

    /// Uniform in `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.0.random::<f64>()
    }

    pub fn below(&mut self, n: usize) -> usize {
        self.0.random_range(0..n)
    }

    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.uniform() < p
    }

    /// Circular complex Gaussian with `E|z|^2 = 1`.
    pub fn complex_gaussian<T: Real>(&mut self) -> C<T> {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        C::new(T::lit(self.gaussian() * s), T::lit(self.gaussian() * s))
    }

    pub fn unit_vector3(&mut self) -> [f64; 3] {
        loop {
            let v = [self.gaussian(), self.gaussian(), self.gaussian()];
            let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
            if n > 1e-12 {
                return [v[0] / n, v[1] / n, v[2] / n];
            }
        }
    }
}

pub fn gaussian_matrix<T: Real>(rows: usize, cols: usize, rng: &mut SeededRng) -> ComplexMatrix<T> {
    ComplexMatrix::from_fn(rows, cols, |_, _| rng.complex_gaussian())
}

/// Uniformly distributed unit vector (normalized complex Gaussian).
pub fn random_state<T: Real>(dim: usize, rng: &mut SeededRng) -> Vec<C<T>> {
    assert!(dim >= 1, "dimension must be positive");
    loop {
        let v: Vec<C<T>> = (0..dim).map(|_| rng.complex_gaussian()).collect();
        let n = norm(&v);
        if n > T::lit(1e-30) {
            return v.into_iter().map(|z| z / n).collect();
        }
    }
}

/// Haar unitary: Gram-Schmidt QR of a complex Gaussian matrix. The R factor
/// has a positive real diagonal, which is the phase fix that makes Q Haar.
pub fn random_unitary<T: Real>(dim: usize, rng: &mut SeededRng) -> ComplexMatrix<T> {
    let g = gaussian_matrix::<T>(dim, dim, rng);
    let cols: Vec<Vec<C<T>>> = (0..dim).map(|j| g.column(j)).collect();
    ComplexMatrix::from_columns(&gram_schmidt(cols))
}

/// Modified Gram-Schmidt with one reorthogonalization pass; input assumed
/// linearly independent.
pub(crate) fn gram_schmidt<T: Real>(cols: Vec<Vec<C<T>>>) -> Vec<Vec<C<T>>> {
    let mut q: Vec<Vec<C<T>>> = Vec::with_capacity(cols.len());
    for mut v in cols {
        for _ in 0..2 {
            for u in &q {
                let proj = inner(u, &v);
                for (x, y) in v.iter_mut().zip(u) {
                    *x -= proj * *y;
                }
            }
        }
        let n = norm(&v);
        q.push(v.into_iter().map(|z| z / n).collect());
    }
    q
}

/// `G G† / tr(G G†)` for a square complex Gaussian `G`.
pub fn random_density<T: Real>(dim: usize, rng: &mut SeededRng) -> ComplexMatrix<T> {
    random_density_rank(dim, dim, rng)
}

/// Density matrix of rank at most `rank` (Gaussian `dim x rank` factor).
pub fn random_density_rank<T: Real>(dim: usize, rank: usize, rng: &mut SeededRng) -> ComplexMatrix<T> {
    let g = gaussian_matrix::<T>(dim, rank.max(1), rng);
    let rho = &g * &g.adjoint();
    let tr = rho.trace().re;
    rho.scale_real(T::one() / tr).hermitian_part()
}

/// Hermitian matrix with independent complex Gaussian entries, `(G + G†)/2`.
pub fn random_hermitian<T: Real>(dim: usize, rng: &mut SeededRng) -> ComplexMatrix<T> {
    gaussian_matrix::<T>(dim, dim, rng).hermitian_part()
}

/// GUE sample normalized so the spectrum fills the semicircle on `[-2, 2]`
/// independently of `dim` (off-diagonal `E|H_ij|^2 = 1/dim`).
pub fn gue<T: Real>(dim: usize, rng: &mut SeededRng) -> ComplexMatrix<T> {
    let g = gaussian_matrix::<T>(dim, dim, rng);
    let s = T::lit((2.0 / dim as f64).sqrt());
    g.scale_real(s).hermitian_part()
}

/// Orthogonal projector of the given rank onto a Haar-random subspace.
pub fn random_projector<T: Real>(dim: usize, rank: usize, rng: &mut SeededRng) -> ComplexMatrix<T> {
    let u = random_unitary::<T>(dim, rng);
    let mut p = ComplexMatrix::zeros(dim, dim);
    for k in 0..rank.min(dim) {
        p = &p + &ComplexMatrix::ket_bra(&u.column(k));
    }
    p.hermitian_part()
}
