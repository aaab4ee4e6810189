//! GNS representation of a finite-dimensional C*-algebra induced by a state.

use serde::Serialize;

use crate::algebra::{state_value, AlgebraElement, AlgebraState, BlockAlgebra};
use crate::error::{Error, Result};
use crate::linalg::{eigh, inner, norm, psd_nullity, tensor, ComplexMatrix, StateVector};
use crate::scalar::{czero, Real, C};
use crate::tolerance::Tolerances;

#[derive(Debug, Clone)]
pub struct GnsRepresentation<T: Real> {
    algebra: BlockAlgebra,
    hilbert_dim: usize,
    /// Matrix units whose classes form a basis of the quotient space.
    basis_labels: Vec<usize>,
    /// `π(e_u)` for every matrix unit `e_u`, in algebra basis order.
    rep_map: Vec<ComplexMatrix<T>>,
    cyclic_vector: StateVector<T>,
}

impl<T: Real> GnsRepresentation<T> {
    pub fn hilbert_dim(&self) -> usize {
        self.hilbert_dim
    }

    pub fn algebra(&self) -> &BlockAlgebra {
        &self.algebra
    }

    pub fn basis_labels(&self) -> &[usize] {
        &self.basis_labels
    }

    pub fn rep_map(&self) -> &[ComplexMatrix<T>] {
        &self.rep_map
    }

    pub fn cyclic_vector(&self) -> &StateVector<T> {
        &self.cyclic_vector
    }

    /// `π(x) = Σ_u x_u π(e_u)`.
    pub fn represent(&self, x: &AlgebraElement<T>) -> Result<ComplexMatrix<T>> {
        if x.block_dims() != self.algebra.block_dims() {
            return Err(Error::AlgebraMismatch);
        }
        let d = self.hilbert_dim;
        let mut out = ComplexMatrix::zeros(d, d);
        for (c, p) in x.coefficients().iter().zip(&self.rep_map) {
            if *c != czero() {
                out = &out + &p.scale(*c);
            }
        }
        Ok(out)
    }

    /// Largest residual of `π(e_u e_v) = π(e_u)π(e_v)` and `π(e_u*) = π(e_u)†`
    /// over the matrix-unit basis.
    pub fn homomorphism_residual(&self) -> T {
        let basis = self.algebra.basis();
        let mut worst = T::zero();
        for (i, &u) in basis.iter().enumerate() {
            let eu = self.algebra.matrix_unit::<T>(u);
            let star = self.represent(&eu.star()).expect("same algebra");
            worst = worst.max(star.max_diff(&self.rep_map[i].adjoint()));
            for (j, &v) in basis.iter().enumerate() {
                if u.block != v.block {
                    worst = worst.max((&self.rep_map[i] * &self.rep_map[j]).max_abs());
                    continue;
                }
                let prod = eu.mul(&self.algebra.matrix_unit(v)).expect("same algebra");
                let lhs = self.represent(&prod).expect("same algebra");
                worst = worst.max(lhs.max_diff(&(&self.rep_map[i] * &self.rep_map[j])));
            }
        }
        worst
    }

    /// Largest `|<ξ|π(e_u)|ξ> - φ(e_u)|` over the basis.
    pub fn state_residual(&self, state: &AlgebraState<T>) -> Result<T> {
        let xi = self.cyclic_vector.amplitudes();
        let mut worst = T::zero();
        for (i, &u) in self.algebra.basis().iter().enumerate() {
            let phi = state_value(state, &self.algebra.matrix_unit(u))?;
            worst = worst.max((self.rep_map[i].sandwich(xi, xi) - phi).norm());
        }
        Ok(worst)
    }

    /// Numerical rank of `{π(e_u) ξ}`.
    pub fn cyclic_rank(&self, rank_tol: T) -> Result<usize> {
        let xi = self.cyclic_vector.amplitudes();
        let images: Vec<Vec<C<T>>> = self.rep_map.iter().map(|p| p.matvec(xi)).collect();
        Ok(crate::linalg::subspace_basis(&images, rank_tol)?.len())
    }
}

/// Build `(H_φ, π_φ, ξ_φ)` from the Gram form `G[x][y] = φ(x* y)` on matrix units.
pub fn gns_construct<T: Real>(
    algebra: &BlockAlgebra,
    state: &AlgebraState<T>,
    tol: &Tolerances,
) -> Result<GnsRepresentation<T>> {
    if !state.compatible_with(algebra) {
        return Err(Error::InvalidState("state does not match the algebra's blocks".into()));
    }
    let basis = algebra.basis();
    let units: Vec<AlgebraElement<T>> = basis.iter().map(|&u| algebra.matrix_unit(u)).collect();
    let dim = basis.len();

    let mut gram = ComplexMatrix::zeros(dim, dim);
    for x in 0..dim {
        let xs = units[x].star();
        for y in 0..dim {
            gram[(x, y)] = state_value(state, &xs.mul(&units[y])?)?;
        }
    }
    let eig = eigh(&gram)?;
    let lmax = eig.values.last().copied().unwrap_or(T::zero());
    if !(lmax > T::zero()) {
        return Err(Error::InvalidState("Gram form vanishes".into()));
    }
    let thresh = T::lit(tol.gram) * lmax;
    let kept: Vec<usize> = (0..dim).filter(|&k| eig.values[k] > thresh).collect();
    let r = kept.len();

    // u(c) = Λ^{1/2} V_r† c, and its right inverse V_r Λ^{-1/2}.
    let sq: Vec<T> = kept.iter().map(|&k| eig.values[k].sqrt()).collect();
    let to_h = ComplexMatrix::from_fn(r, dim, |i, j| eig.vectors[(j, kept[i])].conj() * sq[i]);
    let from_h = ComplexMatrix::from_fn(dim, r, |i, j| eig.vectors[(i, kept[j])] / sq[j]);

    let mut rep_map = Vec::with_capacity(dim);
    for x in &units {
        // Left-multiplication matrix L_x in the matrix-unit basis.
        let cols: Vec<Vec<C<T>>> = units.iter().map(|e| x.mul(e).map(|p| p.coefficients())).collect::<Result<_>>()?;
        let lx = ComplexMatrix::from_columns(&cols);
        rep_map.push(&(&to_h * &lx) * &from_h);
    }

    let xi = to_h.matvec(&algebra.unit::<T>().coefficients());
    let cyclic_vector = StateVector::normalize(xi)?;

    // Greedy choice of matrix units whose classes span H.
    let mut basis_labels = Vec::with_capacity(r);
    let mut ortho: Vec<Vec<C<T>>> = Vec::with_capacity(r);
    for (k, x) in units.iter().enumerate() {
        if ortho.len() == r {
            break;
        }
        let mut v = to_h.matvec(&x.coefficients());
        let scale = norm(&v);
        for q in &ortho {
            let c = inner(q, &v);
            for (vi, qi) in v.iter_mut().zip(q) {
                *vi -= *qi * c;
            }
        }
        let n = norm(&v);
        if n > T::lit(1e-8) * scale.max(T::min_positive_value()) && n > T::zero() {
            ortho.push(v.iter().map(|z| *z / n).collect());
            basis_labels.push(k);
        }
    }

    Ok(GnsRepresentation {
        algebra: algebra.clone(),
        hilbert_dim: r,
        basis_labels,
        rep_map,
        cyclic_vector,
    })
}

/// Dimension of `{M : M π(x) = π(x) M}` over the basis, as the null space of
/// `Σ_x C_x† C_x` with `C_x = I ⊗ π(x)ᵀ − π(x) ⊗ I` acting on row-major `vec M`.
pub fn commutant_dimension<T: Real>(rep: &GnsRepresentation<T>, tol: &Tolerances) -> Result<usize> {
    let d = rep.hilbert_dim;
    let id = ComplexMatrix::<T>::identity(d);
    let mut acc = ComplexMatrix::zeros(d * d, d * d);
    for a in &rep.rep_map {
        if a.max_abs() == T::zero() {
            continue;
        }
        let at = a.transpose();
        let ad = a.adjoint();
        let ac = a.conj();
        // C†C = I⊗conj(A)Aᵀ − A⊗conj(A) − A†⊗Aᵀ + A†A⊗I
        let t1 = tensor(&id, &(&ac * &at));
        let t2 = tensor(a, &ac);
        let t3 = tensor(&ad, &at);
        let t4 = tensor(&(&ad * a), &id);
        acc = &(&(&acc + &t1) - &(&t2 + &t3)) + &t4;
    }
    if acc.max_abs() == T::zero() {
        return Ok(d * d);
    }
    psd_nullity(&acc, T::lit(tol.commutation))
}

/// Pure iff one block carries all the weight with a rank-one density.
pub fn purity_check<T: Real>(state: &AlgebraState<T>, tol: &Tolerances) -> Result<bool> {
    let weight_tol = T::lit(1e-12);
    let active: Vec<usize> = (0..state.weights().len())
        .filter(|&k| state.weights()[k] > weight_tol)
        .collect();
    if active.len() != 1 || (state.weights()[active[0]] - T::one()).abs() > weight_tol {
        return Ok(false);
    }
    let eig = state.densities()[active[0]].eig()?;
    let lmax = eig.values.last().copied().unwrap_or(T::zero());
    let rank = eig.values.iter().filter(|&&l| l > T::lit(tol.rank) * lmax).count();
    Ok(rank == 1)
}

#[derive(Debug, Clone, Serialize)]
pub struct GnsReport {
    pub hilbert_dim: usize,
    pub commutant_dim: usize,
    pub irreducible: bool,
    pub pure: bool,
    pub max_residual: f64,
}

pub fn gns_report<T: Real>(algebra: &BlockAlgebra, state: &AlgebraState<T>, tol: &Tolerances) -> Result<GnsReport> {
    let rep = gns_construct(algebra, state, tol)?;
    let commutant_dim = commutant_dimension(&rep, tol)?;
    let residual = rep.homomorphism_residual().max(rep.state_residual(state)?);
    Ok(GnsReport {
        hilbert_dim: rep.hilbert_dim,
        commutant_dim,
        irreducible: commutant_dim == 1,
        pure: purity_check(state, tol)?,
        max_residual: residual.to_f64_lossy(),
    })
}
