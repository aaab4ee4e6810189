//! Matrices with enforced physical invariants.

use crate::error::{Error, Result};
use crate::linalg::eig::{eigh, Eigen};
use crate::linalg::matrix::{norm, ComplexMatrix};
use crate::scalar::{Real, C};
use crate::tolerance::Tolerances;

/// Self-adjoint operator (observable, Hamiltonian).
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator<T: Real>(ComplexMatrix<T>);

impl<T: Real> HermitianOperator<T> {
    pub fn new(m: ComplexMatrix<T>) -> Result<Self> {
        Self::with_tol(m, &Tolerances::default())
    }

    pub fn with_tol(m: ComplexMatrix<T>, tol: &Tolerances) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "operator must be square, got {}x{}",
                m.rows(),
                m.cols()
            )));
        }
        if !m.is_finite() {
            return Err(Error::NonFinite);
        }
        if !m.is_hermitian(T::lit(tol.hermiticity)) {
            return Err(Error::NotHermitian {
                deviation: m.hermiticity_deviation().to_f64_lossy(),
            });
        }
        Ok(Self(m.hermitian_part()))
    }

    pub fn matrix(&self) -> &ComplexMatrix<T> {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix<T> {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    pub fn eig(&self) -> Result<Eigen<T>> {
        eigh(&self.0)
    }

    /// `<psi|A|psi>`, real by construction.
    pub fn expectation(&self, psi: &[C<T>]) -> T {
        self.0.sandwich(psi, psi).re
    }
}

/// Orthogonal projector `P = P² = P†`.
#[derive(Debug, Clone, PartialEq)]
pub struct Projector<T: Real>(HermitianOperator<T>);

impl<T: Real> Projector<T> {
    pub fn new(m: ComplexMatrix<T>) -> Result<Self> {
        Self::with_tol(m, &Tolerances::default())
    }

    pub fn with_tol(m: ComplexMatrix<T>, tol: &Tolerances) -> Result<Self> {
        let h = HermitianOperator::with_tol(m, tol)?;
        let p = h.matrix();
        let dev = (p * p).max_diff(p);
        let itol = T::lit(tol.idempotency);
        if dev > itol {
            return Err(Error::NotProjector { deviation: dev.to_f64_lossy() });
        }
        let e = h.eig()?;
        let off = e
            .values
            .iter()
            .map(|&l| l.abs().min((l - T::one()).abs()))
            .fold(T::zero(), T::max);
        if off > itol {
            return Err(Error::NotProjector { deviation: off.to_f64_lossy() });
        }
        Ok(Self(h))
    }

    /// Projector onto the span of the given orthonormal vectors.
    pub fn from_orthonormal(vectors: &[Vec<C<T>>], dim: usize) -> Result<Self> {
        let mut p = ComplexMatrix::zeros(dim, dim);
        for v in vectors {
            if v.len() != dim {
                return Err(Error::DimensionMismatch("projector vector length".into()));
            }
            p = &p + &ComplexMatrix::ket_bra(v);
        }
        Self::new(p)
    }

    pub fn identity(dim: usize) -> Self {
        Self(HermitianOperator(ComplexMatrix::identity(dim)))
    }

    pub fn matrix(&self) -> &ComplexMatrix<T> {
        self.0.matrix()
    }

    pub fn operator(&self) -> &HermitianOperator<T> {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    /// `tr P`, which is the rank.
    pub fn trace(&self) -> T {
        self.matrix().trace().re
    }

    pub fn rank(&self) -> usize {
        self.trace().round().to_usize().unwrap_or(0)
    }

    /// `1 - P`.
    pub fn complement(&self) -> Self {
        let n = self.dim();
        Self(HermitianOperator(&ComplexMatrix::identity(n) - self.matrix()))
    }
}

/// Positive, unit-trace Hermitian operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix<T: Real>(HermitianOperator<T>);

impl<T: Real> DensityMatrix<T> {
    pub fn new(m: ComplexMatrix<T>) -> Result<Self> {
        Self::with_tol(m, &Tolerances::default())
    }

    pub fn with_tol(m: ComplexMatrix<T>, tol: &Tolerances) -> Result<Self> {
        let h = HermitianOperator::with_tol(m, tol)?;
        let tr = h.matrix().trace().re;
        if (tr - T::one()).abs() > T::lit(tol.trace) {
            return Err(Error::NotDensity(format!("trace {tr}")));
        }
        let min = h.eig()?.values.first().copied().unwrap_or(T::zero());
        if min < -T::lit(tol.psd) {
            return Err(Error::NotDensity(format!("minimum eigenvalue {min}")));
        }
        Ok(Self(h))
    }

    pub fn from_pure(psi: &StateVector<T>) -> Self {
        Self(HermitianOperator(ComplexMatrix::ket_bra(psi.amplitudes()).hermitian_part()))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self(HermitianOperator(
            ComplexMatrix::identity(dim).scale_real(T::one() / T::lit(dim as f64)),
        ))
    }

    /// `P / tr P`.
    pub fn from_projector(p: &Projector<T>) -> Result<Self> {
        let tr = p.trace();
        if tr <= T::lit(0.5) {
            return Err(Error::ZeroProjector);
        }
        Ok(Self(HermitianOperator(p.matrix().scale_real(T::one() / tr))))
    }

    pub fn matrix(&self) -> &ComplexMatrix<T> {
        self.0.matrix()
    }

    pub fn operator(&self) -> &HermitianOperator<T> {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn eig(&self) -> Result<Eigen<T>> {
        self.0.eig()
    }

    /// `tr(rho A)`.
    pub fn expectation(&self, a: &ComplexMatrix<T>) -> C<T> {
        let r = self.matrix();
        let n = r.rows();
        let mut acc = C::new(T::zero(), T::zero());
        for i in 0..n {
            for k in 0..n {
                acc += r[(i, k)] * a[(k, i)];
            }
        }
        acc
    }

    pub fn purity(&self) -> T {
        self.expectation(self.matrix()).re
    }
}

/// Unit-norm state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector<T: Real>(Vec<C<T>>);

impl<T: Real> StateVector<T> {
    pub fn new(amplitudes: Vec<C<T>>) -> Result<Self> {
        Self::with_tol(amplitudes, &Tolerances::default())
    }

    pub fn with_tol(amplitudes: Vec<C<T>>, tol: &Tolerances) -> Result<Self> {
        if amplitudes.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::NonFinite);
        }
        let n = norm(&amplitudes);
        if (n - T::one()).abs() > T::lit(tol.norm) {
            return Err(Error::NotNormalized { norm: n.to_f64_lossy() });
        }
        Ok(Self(amplitudes))
    }

    /// Normalize any non-zero vector.
    pub fn normalize(amplitudes: Vec<C<T>>) -> Result<Self> {
        let n = norm(&amplitudes);
        if !(n > T::zero()) || !n.is_finite() {
            return Err(Error::NotNormalized { norm: n.to_f64_lossy() });
        }
        Ok(Self(amplitudes.into_iter().map(|z| z / n).collect()))
    }

    pub fn basis(dim: usize, k: usize) -> Self {
        Self(crate::linalg::matrix::basis_vector(dim, k))
    }

    pub fn amplitudes(&self) -> &[C<T>] {
        &self.0
    }

    pub fn into_amplitudes(self) -> Vec<C<T>> {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn density(&self) -> DensityMatrix<T> {
        DensityMatrix::from_pure(self)
    }
}
