//! Tensor products and partial traces.
//!
//! Composite indices are row-major with the first factor most significant:
//! for `A ⊗ B` the index is `i_a * dim_b + i_b`.

use crate::error::{Error, Result};
use crate::linalg::matrix::ComplexMatrix;
use crate::linalg::types::DensityMatrix;
use crate::scalar::{czero, Real, C};

/// Kronecker product.
pub fn tensor<T: Real>(a: &ComplexMatrix<T>, b: &ComplexMatrix<T>) -> ComplexMatrix<T> {
    let (br, bc) = (b.rows(), b.cols());
    ComplexMatrix::from_fn(a.rows() * br, a.cols() * bc, |i, j| {
        a[(i / br, j / bc)] * b[(i % br, j % bc)]
    })
}

/// Kronecker product of vectors.
pub fn tensor_vec<T: Real>(a: &[C<T>], b: &[C<T>]) -> Vec<C<T>> {
    a.iter().flat_map(|x| b.iter().map(move |y| *x * *y)).collect()
}

pub fn tensor_all<T: Real>(factors: &[ComplexMatrix<T>]) -> ComplexMatrix<T> {
    factors
        .iter()
        .skip(1)
        .fold(factors[0].clone(), |acc, f| tensor(&acc, f))
}

/// Which factor of a bipartite system survives the trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Keep {
    A,
    B,
}

/// Split every composite index into (kept index, traced index).
fn index_split(dims: &[usize], keep: &[usize]) -> Result<(usize, Vec<(usize, usize)>)> {
    let total: usize = dims.iter().product();
    for w in keep.windows(2) {
        if w[0] >= w[1] {
            return Err(Error::PreconditionFailed("kept subsystems must be strictly increasing".into()));
        }
    }
    if keep.iter().any(|&k| k >= dims.len()) {
        return Err(Error::DimensionMismatch(format!(
            "subsystem index out of range for {} subsystems",
            dims.len()
        )));
    }
    let kept_dim: usize = keep.iter().map(|&k| dims[k]).product();
    let mut split = Vec::with_capacity(total);
    let mut digits = vec![0usize; dims.len()];
    for _ in 0..total {
        let (mut ki, mut ti) = (0, 0);
        for (s, &d) in dims.iter().enumerate() {
            if keep.contains(&s) {
                ki = ki * d + digits[s];
            } else {
                ti = ti * d + digits[s];
            }
        }
        split.push((ki, ti));
        for s in (0..dims.len()).rev() {
            digits[s] += 1;
            if digits[s] < dims[s] {
                break;
            }
            digits[s] = 0;
        }
    }
    Ok((kept_dim, split))
}

fn check_dims(n: usize, dims: &[usize]) -> Result<()> {
    let total: usize = dims.iter().product();
    if dims.is_empty() || dims.contains(&0) || total != n {
        return Err(Error::DimensionMismatch(format!(
            "subsystem dimensions {dims:?} do not multiply to {n}"
        )));
    }
    Ok(())
}

/// Trace out every subsystem not listed in `keep` (sorted, ascending).
pub fn partial_trace_keep<T: Real>(
    rho: &ComplexMatrix<T>,
    dims: &[usize],
    keep: &[usize],
) -> Result<ComplexMatrix<T>> {
    if !rho.is_square() {
        return Err(Error::DimensionMismatch("partial trace of a non-square matrix".into()));
    }
    check_dims(rho.rows(), dims)?;
    let (kd, split) = index_split(dims, keep)?;
    let traced_dim = rho.rows() / kd;
    let mut groups: Vec<Vec<(usize, usize)>> = vec![Vec::with_capacity(kd); traced_dim];
    for (full, &(k, t)) in split.iter().enumerate() {
        groups[t].push((full, k));
    }
    let mut out = ComplexMatrix::zeros(kd, kd);
    for g in &groups {
        for &(fi, ki) in g {
            for &(fj, kj) in g {
                out[(ki, kj)] += rho[(fi, fj)];
            }
        }
    }
    Ok(out)
}

/// Reduced density matrix of a pure state without forming `|psi><psi|`.
pub fn reduced_from_pure<T: Real>(psi: &[C<T>], dims: &[usize], keep: &[usize]) -> Result<ComplexMatrix<T>> {
    check_dims(psi.len(), dims)?;
    let (kd, split) = index_split(dims, keep)?;
    let traced_dim = psi.len() / kd;
    let mut slab = vec![vec![czero::<T>(); kd]; traced_dim];
    for (full, &(k, t)) in split.iter().enumerate() {
        slab[t][k] = psi[full];
    }
    let mut out = ComplexMatrix::zeros(kd, kd);
    for row in &slab {
        for i in 0..kd {
            if row[i].re == T::zero() && row[i].im == T::zero() {
                continue;
            }
            for j in 0..kd {
                out[(i, j)] += row[i] * row[j].conj();
            }
        }
    }
    Ok(out)
}

/// Bipartite partial trace on a validated density matrix.
pub fn partial_trace<T: Real>(rho: &DensityMatrix<T>, dims: (usize, usize), keep: Keep) -> Result<DensityMatrix<T>> {
    let k = match keep {
        Keep::A => [0usize],
        Keep::B => [1usize],
    };
    let m = partial_trace_keep(rho.matrix(), &[dims.0, dims.1], &k)?;
    DensityMatrix::new(m.hermitian_part())
}
