//! Hermitian eigendecomposition by cyclic complex Jacobi rotations.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::linalg::matrix::ComplexMatrix;
use crate::scalar::{Real, C};

const MAX_SWEEPS: usize = 64;

/// Spectral decomposition `M = V diag(values) V†`.
#[derive(Debug, Clone)]
pub struct Eigen<T: Real> {
    /// Ascending.
    pub values: Vec<T>,
    /// Unitary; column `k` belongs to `values[k]`.
    pub vectors: ComplexMatrix<T>,
}

impl<T: Real> Eigen<T> {
    pub fn vector(&self, k: usize) -> Vec<C<T>> {
        self.vectors.column(k)
    }

    /// `V f(Λ) V†` for a complex-valued spectral function.
    pub fn apply(&self, f: impl Fn(T) -> C<T>) -> ComplexMatrix<T> {
        let n = self.values.len();
        let fv: Vec<C<T>> = self.values.iter().map(|&l| f(l)).collect();
        let v = &self.vectors;
        ComplexMatrix::from_fn(n, n, |i, j| {
            let mut acc = C::new(T::zero(), T::zero());
            for k in 0..n {
                acc += v[(i, k)] * fv[k] * v[(j, k)].conj();
            }
            acc
        })
    }

    pub fn reconstruct(&self) -> ComplexMatrix<T> {
        self.apply(|l| C::new(l, T::zero()))
    }

    /// Orthogonal projector onto the eigenvectors selected by `keep`.
    pub fn spectral_projector(&self, keep: impl Fn(T) -> bool) -> ComplexMatrix<T> {
        self.apply(|l| if keep(l) { C::new(T::one(), T::zero()) } else { C::new(T::zero(), T::zero()) })
    }
}

/// Eigendecomposition of a Hermitian matrix.
///
/// Only the Hermitian part `(M + M†)/2` is used. Eigenvalues come back
/// ascending; inside a degenerate cluster the eigenvectors are ordered
/// lexicographically by their entries after fixing each vector's phase so its
/// first non-negligible entry is real and positive.
pub fn eigh<T: Real>(m: &ComplexMatrix<T>) -> Result<Eigen<T>> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "eigendecomposition of a {}x{} matrix",
            m.rows(),
            m.cols()
        )));
    }
    if !m.is_finite() {
        return Err(Error::NonFinite);
    }
    let n = m.rows();
    let mut a = m.hermitian_part();
    let mut v = ComplexMatrix::<T>::identity(n);
    let eps = T::epsilon();
    let scale = a.frobenius();

    let mut converged = n <= 1 || scale == T::zero();
    let mut sweep = 0;
    while !converged {
        if sweep == MAX_SWEEPS {
            return Err(Error::NoConvergence { sweeps: MAX_SWEEPS });
        }
        sweep += 1;
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut a, &mut v, p, q, eps * scale);
            }
        }
        let mut off = T::zero();
        for p in 0..n {
            for q in p + 1..n {
                off += a[(p, q)].norm_sqr();
            }
        }
        converged = off.sqrt() <= eps * scale * T::lit(0.1);
    }

    let mut pairs: Vec<(T, Vec<C<T>>)> = (0..n)
        .map(|k| (a[(k, k)].re, fix_phase(v.column(k))))
        .collect();
    sort_spectrum(&mut pairs, scale);
    let values = pairs.iter().map(|p| p.0).collect();
    let cols: Vec<_> = pairs.into_iter().map(|p| p.1).collect();
    Ok(Eigen {
        values,
        vectors: ComplexMatrix::from_columns(&cols),
    })
}

fn rotate<T: Real>(a: &mut ComplexMatrix<T>, v: &mut ComplexMatrix<T>, p: usize, q: usize, floor: T) {
    let n = a.rows();
    let apq = a[(p, q)];
    let mag = apq.norm();
    if mag == T::zero() {
        return;
    }
    if mag <= floor * T::lit(1e-3) {
        a[(p, q)] = C::new(T::zero(), T::zero());
        a[(q, p)] = C::new(T::zero(), T::zero());
        return;
    }
    // Phase step: make a_pq real positive.
    let w = apq / mag;
    let wc = w.conj();
    for k in 0..n {
        a[(q, k)] *= w;
    }
    for k in 0..n {
        a[(k, q)] *= wc;
    }
    for k in 0..n {
        v[(k, q)] *= wc;
    }

    // Real symmetric Jacobi rotation on (p, q).
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let theta = (aqq - app) / (T::lit(2.0) * mag);
    let t = if theta.abs() > T::lit(1e150) {
        T::lit(0.5) / theta
    } else {
        let sgn = if theta >= T::zero() { T::one() } else { -T::one() };
        sgn / (theta.abs() + (theta * theta + T::one()).sqrt())
    };
    let c = T::one() / (t * t + T::one()).sqrt();
    let s = t * c;
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * c - akq * s;
        a[(k, q)] = akp * s + akq * c;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = apk * c - aqk * s;
        a[(q, k)] = apk * s + aqk * c;
    }
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * c - vkq * s;
        v[(k, q)] = vkp * s + vkq * c;
    }
    a[(p, q)] = C::new(T::zero(), T::zero());
    a[(q, p)] = C::new(T::zero(), T::zero());
    a[(p, p)] = C::new(a[(p, p)].re, T::zero());
    a[(q, q)] = C::new(a[(q, q)].re, T::zero());
}

/// Rotate the global phase so the first entry above `sqrt(eps)` is real positive.
pub(crate) fn fix_phase<T: Real>(mut col: Vec<C<T>>) -> Vec<C<T>> {
    let thresh = T::epsilon().sqrt();
    if let Some(lead) = col.iter().find(|z| z.norm() > thresh).copied() {
        let ph = lead.conj() / lead.norm();
        for z in &mut col {
            *z *= ph;
        }
    }
    col
}

fn lex_cmp<T: Real>(a: &[C<T>], b: &[C<T>]) -> Ordering {
    let tol = T::lit(1e-9);
    for (x, y) in a.iter().zip(b) {
        for (u, w) in [(x.re, y.re), (x.im, y.im)] {
            if (u - w).abs() > tol {
                return u.partial_cmp(&w).unwrap_or(Ordering::Equal);
            }
        }
    }
    Ordering::Equal
}

fn sort_spectrum<T: Real>(pairs: &mut [(T, Vec<C<T>>)], scale: T) {
    pairs.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap_or(Ordering::Equal));
    let tie = T::lit(1e-10).max(T::epsilon() * T::lit(100.0)) * scale.max(T::one());
    let mut start = 0;
    while start < pairs.len() {
        let mut end = start + 1;
        while end < pairs.len() && pairs[end].0 - pairs[end - 1].0 <= tie {
            end += 1;
        }
        if end - start > 1 {
            pairs[start..end].sort_by(|x, y| lex_cmp(&x.1, &y.1));
        }
        start = end;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::matrix::pauli;
    use crate::linalg::random::{random_hermitian, SeededRng};

    #[test]
    fn identity_has_unit_spectrum() {
        let e = eigh(&ComplexMatrix::<f64>::identity(2)).unwrap();
        assert_eq!(e.values, vec![1.0, 1.0]);
    }

    #[test]
    fn sigma_z_ordering() {
        let [_, _, z] = pauli::<f64>();
        let e = eigh(&z).unwrap();
        assert!((e.values[0] + 1.0).abs() < 1e-15 && (e.values[1] - 1.0).abs() < 1e-15);
        assert!((e.vector(0)[1].re - 1.0).abs() < 1e-15);
        assert!((e.vector(1)[0].re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn degenerate_cluster_is_ordered_lexicographically() {
        let m = ComplexMatrix::<f64>::from_real_diagonal(&[2.0, 1.0, 2.0]);
        let e = eigh(&m).unwrap();
        assert_eq!(e.values, vec![1.0, 2.0, 2.0]);
        // e_3 = (0,0,1) sorts before e_1 = (1,0,0).
        assert!((e.vector(1)[2].re - 1.0).abs() < 1e-15);
        assert!((e.vector(2)[0].re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn random_reconstruction_f64() {
        let mut rng = SeededRng::new(11);
        let h = random_hermitian::<f64>(6, &mut rng);
        let e = eigh(&h).unwrap();
        assert!(e.reconstruct().max_diff(&h) < 1e-10);
        let vv = &e.vectors.adjoint() * &e.vectors;
        assert!(vv.max_diff(&ComplexMatrix::identity(6)) < 1e-12);
    }

    #[test]
    fn random_reconstruction_f32() {
        let mut rng = SeededRng::new(12);
        let h = random_hermitian::<f32>(5, &mut rng);
        let e = eigh(&h).unwrap();
        assert!(e.reconstruct().max_diff(&h) < 1e-4);
    }

    #[test]
    fn non_finite_input_rejected() {
        let mut m = ComplexMatrix::<f64>::identity(2);
        m[(0, 1)] = C::new(f64::INFINITY, 0.0);
        assert!(matches!(eigh(&m), Err(Error::NonFinite)));
    }
}
