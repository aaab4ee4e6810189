use crate::error::{Error, Result};
use crate::linalg::{basis_vector, eigh, normalized, random_state, subspace_basis, ComplexMatrix, SeededRng};
use crate::scalar::{Real, C};
use crate::tolerance::Tolerances;

/// Closed subspace of `C^d` held as an orthonormal basis.
#[derive(Debug, Clone)]
pub struct Subspace<T: Real> {
    ambient: usize,
    basis: Vec<Vec<C<T>>>,
}

impl<T: Real> Subspace<T> {
    pub fn zero(ambient: usize) -> Self {
        Self { ambient, basis: Vec::new() }
    }

    pub fn full(ambient: usize) -> Self {
        Self {
            ambient,
            basis: (0..ambient).map(|k| basis_vector(ambient, k)).collect(),
        }
    }

    /// Span of arbitrary vectors; rank decided by singular values.
    pub fn span(ambient: usize, vectors: &[Vec<C<T>>], rank_tol: T) -> Result<Self> {
        if vectors.iter().any(|v| v.len() != ambient) {
            return Err(Error::DimensionMismatch(format!("vectors must have length {ambient}")));
        }
        Ok(Self {
            ambient,
            basis: subspace_basis(vectors, rank_tol)?,
        })
    }

    /// Span of coordinate vectors `e_k`.
    pub fn coordinate(ambient: usize, axes: &[usize]) -> Self {
        Self {
            ambient,
            basis: axes.iter().map(|&k| basis_vector(ambient, k)).collect(),
        }
    }

    /// Line through `v`; the zero subspace when `v` vanishes.
    pub fn line(v: &[C<T>]) -> Self {
        Self {
            ambient: v.len(),
            basis: normalized(v).into_iter().collect(),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<C<T>>] {
        &self.basis
    }

    pub fn projector(&self) -> ComplexMatrix<T> {
        let mut p = ComplexMatrix::zeros(self.ambient, self.ambient);
        for v in &self.basis {
            for i in 0..self.ambient {
                for j in 0..self.ambient {
                    p[(i, j)] += v[i] * v[j].conj();
                }
            }
        }
        p
    }

    pub fn contains(&self, v: &[C<T>], tol: T) -> bool {
        let pv = self.projector().matvec(v);
        pv.iter().zip(v).all(|(a, b)| (*a - *b).norm() <= tol)
    }
}

/// Three subspaces for which distributivity fails, with both sides of the law.
#[derive(Debug, Clone)]
pub struct DistributivityWitness<T: Real> {
    pub a: Subspace<T>,
    pub b: Subspace<T>,
    pub c: Subspace<T>,
    /// `a ∧ (b ∨ c)`
    pub lhs: Subspace<T>,
    /// `(a ∧ b) ∨ (a ∧ c)`
    pub rhs: Subspace<T>,
}

/// Lattice operations on subspaces of `C^d` with fixed tolerances.
#[derive(Debug, Clone, Copy)]
#[derive(Default)]
pub struct SubspaceLattice {
    pub tol: Tolerances,
}


const GENERATED_LIMIT: usize = 96;

impl SubspaceLattice {
    pub fn new(tol: Tolerances) -> Self {
        Self { tol }
    }

    fn same_dim<T: Real>(a: &Subspace<T>, b: &Subspace<T>) -> Result<()> {
        if a.ambient != b.ambient {
            return Err(Error::DimensionMismatch(format!(
                "subspaces of C^{} and C^{}",
                a.ambient, b.ambient
            )));
        }
        Ok(())
    }

    /// Eigenvectors of `m` whose eigenvalue lies below `cut`.
    fn low_eigenspace<T: Real>(m: &ComplexMatrix<T>, cut: T) -> Result<Vec<Vec<C<T>>>> {
        let e = eigh(m)?;
        Ok((0..e.values.len()).filter(|&k| e.values[k] <= cut).map(|k| e.vector(k)).collect())
    }

    /// Intersection: null space of `(I − P_a) + (I − P_b)`.
    pub fn meet<T: Real>(&self, a: &Subspace<T>, b: &Subspace<T>) -> Result<Subspace<T>> {
        Self::same_dim(a, b)?;
        let d = a.ambient;
        let id = ComplexMatrix::<T>::identity(d);
        let m = &(&id - &a.projector()) + &(&id - &b.projector());
        Ok(Subspace {
            ambient: d,
            basis: Self::low_eigenspace(&m, T::lit(self.tol.rank))?,
        })
    }

    /// Closed linear sum.
    pub fn join<T: Real>(&self, a: &Subspace<T>, b: &Subspace<T>) -> Result<Subspace<T>> {
        Self::same_dim(a, b)?;
        let all: Vec<Vec<C<T>>> = a.basis.iter().chain(&b.basis).cloned().collect();
        Subspace::span(a.ambient, &all, T::lit(self.tol.rank))
    }

    pub fn ortho<T: Real>(&self, a: &Subspace<T>) -> Result<Subspace<T>> {
        Ok(Subspace {
            ambient: a.ambient,
            basis: Self::low_eigenspace(&a.projector(), T::lit(0.5))?,
        })
    }

    /// `a ⪯ b` iff `P_b P_a = P_a`.
    pub fn leq<T: Real>(&self, a: &Subspace<T>, b: &Subspace<T>) -> Result<bool> {
        Self::same_dim(a, b)?;
        let pa = a.projector();
        Ok((&b.projector() * &pa).max_diff(&pa) < T::lit(self.tol.orthogonality))
    }

    pub fn equal<T: Real>(&self, a: &Subspace<T>, b: &Subspace<T>) -> Result<bool> {
        Self::same_dim(a, b)?;
        Ok(a.rank() == b.rank() && a.projector().max_diff(&b.projector()) < T::lit(self.tol.orthogonality))
    }

    /// `Φ_b(a) = b ∧ (a ∨ b′)`.
    pub fn sasaki_projection<T: Real>(&self, a: &Subspace<T>, b: &Subspace<T>) -> Result<Subspace<T>> {
        let bp = self.ortho(b)?;
        self.meet(b, &self.join(a, &bp)?)
    }

    /// `b′ ∨ (a ∧ b)`.
    pub fn sasaki_hook<T: Real>(&self, a: &Subspace<T>, b: &Subspace<T>) -> Result<Subspace<T>> {
        let bp = self.ortho(b)?;
        self.join(&bp, &self.meet(a, b)?)
    }

    /// Three coplanar lines `e_1`, `e_2`, `e_1 + e_2` in `C^dim`.
    pub fn non_distributivity_witness<T: Real>(&self, dim: usize) -> Result<DistributivityWitness<T>> {
        if dim < 2 {
            return Err(Error::PreconditionFailed("a witness needs dimension at least 2".into()));
        }
        let e1 = basis_vector::<T>(dim, 0);
        let e2 = basis_vector::<T>(dim, 1);
        let sum: Vec<C<T>> = e1.iter().zip(&e2).map(|(x, y)| *x + *y).collect();
        let (a, b, c) = (Subspace::line(&e1), Subspace::line(&e2), Subspace::line(&sum));
        let (lhs, rhs) = self.distributive_sides(&a, &b, &c)?;
        Ok(DistributivityWitness { a, b, c, lhs, rhs })
    }

    /// `(a ∧ (b ∨ c), (a ∧ b) ∨ (a ∧ c))`.
    pub fn distributive_sides<T: Real>(
        &self,
        a: &Subspace<T>,
        b: &Subspace<T>,
        c: &Subspace<T>,
    ) -> Result<(Subspace<T>, Subspace<T>)> {
        let lhs = self.meet(a, &self.join(b, c)?)?;
        let rhs = self.join(&self.meet(a, b)?, &self.meet(a, c)?)?;
        Ok((lhs, rhs))
    }

    /// Commuting projectors; when they commute the sublattice generated by
    /// `{a, b}` is also checked to be distributive.
    pub fn is_compatible<T: Real>(&self, a: &Subspace<T>, b: &Subspace<T>) -> Result<bool> {
        Self::same_dim(a, b)?;
        let (pa, pb) = (a.projector(), b.projector());
        if (&pa * &pb).max_diff(&(&pb * &pa)) >= T::lit(self.tol.commutation) {
            return Ok(false);
        }
        let generated = self.generated(&[a.clone(), b.clone()])?;
        for x in &generated {
            for y in &generated {
                for z in &generated {
                    let (l, r) = self.distributive_sides(x, y, z)?;
                    if !self.equal(&l, &r)? {
                        return Ok(false);
                    }
                }
            }
        }
        Ok(true)
    }

    /// Closure of `gens` under meet, join and orthocomplement.
    pub fn generated<T: Real>(&self, gens: &[Subspace<T>]) -> Result<Vec<Subspace<T>>> {
        let mut elems: Vec<Subspace<T>> = Vec::new();
        let push = |s: Subspace<T>, elems: &mut Vec<Subspace<T>>| -> Result<bool> {
            for e in elems.iter() {
                if self.equal(e, &s)? {
                    return Ok(false);
                }
            }
            elems.push(s);
            Ok(true)
        };
        for g in gens {
            push(g.clone(), &mut elems)?;
        }
        loop {
            let n = elems.len();
            let mut fresh = Vec::new();
            for i in 0..n {
                fresh.push(self.ortho(&elems[i])?);
                for j in i + 1..n {
                    fresh.push(self.meet(&elems[i], &elems[j])?);
                    fresh.push(self.join(&elems[i], &elems[j])?);
                }
            }
            let mut grew = false;
            for f in fresh {
                grew |= push(f, &mut elems)?;
                if elems.len() > GENERATED_LIMIT {
                    return Err(Error::PreconditionFailed(format!(
                        "generated sublattice exceeds {GENERATED_LIMIT} elements"
                    )));
                }
            }
            if !grew {
                return Ok(elems);
            }
        }
    }

    /// `‖P_{(a∧b′)∨b} − P_a‖_max` for `b ⪯ a`.
    pub fn check_orthomodularity<T: Real>(&self, a: &Subspace<T>, b: &Subspace<T>) -> Result<T> {
        if !self.leq(b, a)? {
            return Err(Error::PreconditionFailed("orthomodularity requires b ⪯ a".into()));
        }
        let lhs = self.join(&self.meet(a, &self.ortho(b)?)?, b)?;
        Ok(lhs.projector().max_diff(&a.projector()))
    }
}

/// Span of `rank` random vectors in `C^ambient`.
pub fn random_subspace<T: Real>(ambient: usize, rank: usize, rng: &mut SeededRng) -> Subspace<T> {
    let vectors: Vec<Vec<C<T>>> = (0..rank).map(|_| random_state(ambient, rng)).collect();
    Subspace::span(ambient, &vectors, T::lit(1e-10)).expect("lengths match")
}
