//! One-sided Jacobi SVD and the rank/null-space utilities built on it.

use crate::error::{Error, Result};
use crate::linalg::matrix::{inner, norm, ComplexMatrix};
use crate::scalar::{czero, Real, C};

/// Thin SVD `A = U diag(sigma) V†` with singular values descending.
#[derive(Debug, Clone)]
pub struct Svd<T: Real> {
    /// Left singular vectors (`rows` entries each), one per singular value.
    pub u: Vec<Vec<C<T>>>,
    pub sigma: Vec<T>,
    /// Right singular vectors (`cols` entries each).
    pub v: Vec<Vec<C<T>>>,
}

impl<T: Real> Svd<T> {
    /// Number of singular values above `rel_tol * sigma_max`.
    pub fn rank(&self, rel_tol: T) -> usize {
        let smax = self.sigma.first().copied().unwrap_or(T::zero());
        if smax <= T::zero() {
            return 0;
        }
        self.sigma.iter().filter(|&&s| s > rel_tol * smax).count()
    }
}

/// Hestenes one-sided Jacobi: orthogonalize the columns pairwise until every
/// pair is numerically orthogonal.
pub fn svd<T: Real>(a: &ComplexMatrix<T>) -> Result<Svd<T>> {
    if !a.is_finite() {
        return Err(Error::NonFinite);
    }
    let (m, n) = (a.rows(), a.cols());
    let mut cols: Vec<Vec<C<T>>> = (0..n).map(|j| a.column(j)).collect();
    let mut v: Vec<Vec<C<T>>> = (0..n).map(|j| crate::linalg::matrix::basis_vector(n, j)).collect();
    let eps = T::epsilon();
    // Columns below this squared norm are numerically zero.
    let floor = (eps * a.frobenius()).powi(2);
    let mut sweeps = 0;
    loop {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha: T = cols[p].iter().map(|z| z.norm_sqr()).sum();
                let beta: T = cols[q].iter().map(|z| z.norm_sqr()).sum();
                let gamma = inner(&cols[p], &cols[q]);
                let g = gamma.norm();
                if g <= eps * (alpha * beta).sqrt() || g == T::zero() || alpha.min(beta) <= floor {
                    continue;
                }
                rotated = true;
                // q <- e^{-i phi} q makes <p|q> real, then a real rotation.
                let w = gamma.conj() / g;
                let zeta = (beta - alpha) / (T::lit(2.0) * g);
                let sgn = if zeta >= T::zero() { T::one() } else { -T::one() };
                let t = sgn / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = c * t;
                for k in 0..m {
                    let xp = cols[p][k];
                    let xq = cols[q][k] * w;
                    cols[p][k] = xp * c - xq * s;
                    cols[q][k] = xp * s + xq * c;
                }
                for k in 0..n {
                    let xp = v[p][k];
                    let xq = v[q][k] * w;
                    v[p][k] = xp * c - xq * s;
                    v[q][k] = xp * s + xq * c;
                }
            }
        }
        sweeps += 1;
        if !rotated {
            break;
        }
        if sweeps > 80 {
            return Err(Error::NoConvergence { sweeps });
        }
    }
    let mut triples: Vec<(T, Vec<C<T>>, Vec<C<T>>)> = cols
        .into_iter()
        .zip(v)
        .map(|(c, vv)| {
            let s = norm(&c);
            let u = if s > T::zero() {
                c.into_iter().map(|z| z / s).collect()
            } else {
                vec![czero(); m]
            };
            (s, u, vv)
        })
        .collect();
    triples.sort_by(|x, y| y.0.partial_cmp(&x.0).unwrap_or(std::cmp::Ordering::Equal));
    let mut out = Svd { u: vec![], sigma: vec![], v: vec![] };
    for (s, u, vv) in triples {
        out.sigma.push(s);
        out.u.push(u);
        out.v.push(vv);
    }
    Ok(out)
}

/// Orthonormal basis of the span of `vectors`; numerical rank counts singular
/// values above `rank_tol * sigma_max`. Empty input spans the zero subspace.
pub fn subspace_basis<T: Real>(vectors: &[Vec<C<T>>], rank_tol: T) -> Result<Vec<Vec<C<T>>>> {
    if vectors.is_empty() {
        return Ok(Vec::new());
    }
    let dim = vectors[0].len();
    if vectors.iter().any(|v| v.len() != dim) {
        return Err(Error::DimensionMismatch("vectors of different lengths".into()));
    }
    let a = ComplexMatrix::from_columns(vectors);
    let s = svd(&a)?;
    let r = s.rank(rank_tol);
    Ok(s.u.into_iter().take(r).map(crate::linalg::eig::fix_phase).collect())
}

/// Minimum-norm least-squares solution of `A x ≈ b`, truncating singular values
/// below `rel_tol * sigma_max`.
pub fn least_squares<T: Real>(a: &ComplexMatrix<T>, b: &[C<T>], rel_tol: T) -> Result<Vec<C<T>>> {
    if b.len() != a.rows() {
        return Err(Error::DimensionMismatch("least-squares right-hand side".into()));
    }
    let s = svd(a)?;
    let r = s.rank(rel_tol);
    let mut x = vec![czero(); a.cols()];
    for k in 0..r {
        let coeff = inner(&s.u[k], b) / s.sigma[k];
        for (xi, vi) in x.iter_mut().zip(&s.v[k]) {
            *xi += coeff * *vi;
        }
    }
    Ok(x)
}

/// Rank of a Hermitian positive semidefinite matrix by diagonally pivoted
/// Cholesky; pivots below `rel_tol * max_diag` terminate the factorization.
pub fn psd_rank<T: Real>(m: &ComplexMatrix<T>, rel_tol: T) -> Result<usize> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch("rank of a non-square matrix".into()));
    }
    let n = m.rows();
    let mut a = m.hermitian_part();
    let max_diag = (0..n).map(|i| a[(i, i)].re).fold(T::zero(), T::max);
    if max_diag <= T::zero() {
        return Ok(0);
    }
    let thresh = rel_tol * max_diag;
    let mut perm: Vec<usize> = (0..n).collect();
    for k in 0..n {
        // Pivot: largest remaining diagonal.
        let (piv, pval) = (k..n)
            .map(|i| (i, a[(perm[i], perm[i])].re))
            .fold((k, T::neg_infinity()), |acc, x| if x.1 > acc.1 { x } else { acc });
        if pval <= thresh {
            return Ok(k);
        }
        perm.swap(k, piv);
        let pk = perm[k];
        let l = pval.sqrt();
        let col: Vec<C<T>> = (k + 1..n).map(|i| a[(perm[i], pk)] / l).collect();
        for (ii, i) in (k + 1..n).enumerate() {
            for (jj, j) in (k + 1..n).enumerate() {
                let (pi, pj) = (perm[i], perm[j]);
                a[(pi, pj)] -= col[ii] * col[jj].conj();
            }
        }
    }
    Ok(n)
}

/// Null-space dimension of a PSD matrix.
pub fn psd_nullity<T: Real>(m: &ComplexMatrix<T>, rel_tol: T) -> Result<usize> {
    Ok(m.rows() - psd_rank(m, rel_tol)?)
}
