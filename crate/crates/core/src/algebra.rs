//! Finite-dimensional C*-algebras as direct sums of full complex matrix blocks.
//!
//! An element is a tuple of blocks `x = ⊕ x_k`, a state is a tuple of weights
//! and block density matrices with `ω(x) = Σ p_k tr(ρ_k x_k)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::io::MatrixFile;
use crate::linalg::{
    eigh, gaussian_matrix, random_density_rank, random_state, ComplexMatrix,
    DensityMatrix, SeededRng,
};
use crate::scalar::{cr, czero, Real, C};
use crate::tolerance::Tolerances;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockAlgebra {
    #[serde(rename = "blocks")]
    block_dims: Vec<usize>,
}

/// A matrix unit `e_{ij}` living in block `block`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MatrixUnit {
    pub block: usize,
    pub row: usize,
    pub col: usize,
}

impl BlockAlgebra {
    pub fn new(block_dims: Vec<usize>) -> Result<Self> {
        if block_dims.is_empty() || block_dims.contains(&0) {
            return Err(Error::InvalidState(format!(
                "block dimensions must be a non-empty list of positive sizes, got {block_dims:?}"
            )));
        }
        Ok(Self { block_dims })
    }

    /// Full matrix algebra `M_n`.
    pub fn full(n: usize) -> Result<Self> {
        Self::new(vec![n])
    }

    pub fn block_dims(&self) -> &[usize] {
        &self.block_dims
    }

    /// Linear dimension `Σ n_k²`.
    pub fn dim(&self) -> usize {
        self.block_dims.iter().map(|n| n * n).sum()
    }

    /// Size of the defining representation `Σ n_k`.
    pub fn hilbert_dim(&self) -> usize {
        self.block_dims.iter().sum()
    }

    /// Matrix-unit basis, blocks in order, row-major inside each block.
    pub fn basis(&self) -> Vec<MatrixUnit> {
        let mut out = Vec::with_capacity(self.dim());
        for (block, &n) in self.block_dims.iter().enumerate() {
            for row in 0..n {
                for col in 0..n {
                    out.push(MatrixUnit { block, row, col });
                }
            }
        }
        out
    }

    pub fn unit<T: Real>(&self) -> AlgebraElement<T> {
        AlgebraElement {
            block_dims: self.block_dims.clone(),
            blocks: self.block_dims.iter().map(|&n| ComplexMatrix::identity(n)).collect(),
        }
    }

    pub fn zero<T: Real>(&self) -> AlgebraElement<T> {
        AlgebraElement {
            block_dims: self.block_dims.clone(),
            blocks: self.block_dims.iter().map(|&n| ComplexMatrix::zeros(n, n)).collect(),
        }
    }

    pub fn matrix_unit<T: Real>(&self, u: MatrixUnit) -> AlgebraElement<T> {
        let mut x = self.zero();
        x.blocks[u.block][(u.row, u.col)] = C::new(T::one(), T::zero());
        x
    }

    pub fn element<T: Real>(&self, blocks: Vec<ComplexMatrix<T>>) -> Result<AlgebraElement<T>> {
        AlgebraElement::new(self, blocks)
    }

    /// Element from coordinates in the matrix-unit basis.
    pub fn from_coefficients<T: Real>(&self, coeffs: &[C<T>]) -> Result<AlgebraElement<T>> {
        if coeffs.len() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "{} coefficients for an algebra of dimension {}",
                coeffs.len(),
                self.dim()
            )));
        }
        let mut x = self.zero();
        for (c, u) in coeffs.iter().zip(self.basis()) {
            x.blocks[u.block][(u.row, u.col)] = *c;
        }
        Ok(x)
    }

    /// Element with independent complex Gaussian entries.
    pub fn random_element<T: Real>(&self, rng: &mut SeededRng) -> AlgebraElement<T> {
        AlgebraElement {
            block_dims: self.block_dims.clone(),
            blocks: self.block_dims.iter().map(|&n| gaussian_matrix(n, n, rng)).collect(),
        }
    }

    /// Random state: Dirichlet-like weights and random-rank block densities.
    pub fn random_state<T: Real>(&self, rng: &mut SeededRng) -> AlgebraState<T> {
        let raw: Vec<f64> = self.block_dims.iter().map(|_| -rng.uniform().max(1e-300).ln()).collect();
        let total: f64 = raw.iter().sum();
        let weights = raw.iter().map(|w| T::lit(w / total)).collect();
        let densities = self
            .block_dims
            .iter()
            .map(|&n| {
                let rank = 1 + rng.below(n);
                DensityMatrix::new(random_density_rank(n, rank, rng)).expect("random density is valid")
            })
            .collect();
        AlgebraState { weights, densities }
    }

    /// Pure state concentrated on one block.
    pub fn random_pure_state<T: Real>(&self, rng: &mut SeededRng) -> AlgebraState<T> {
        let k = rng.below(self.block_dims.len());
        let weights = (0..self.block_dims.len())
            .map(|i| if i == k { T::one() } else { T::zero() })
            .collect();
        let densities = self
            .block_dims
            .iter()
            .enumerate()
            .map(|(i, &n)| {
                if i == k {
                    DensityMatrix::from_pure(
                        &crate::linalg::StateVector::new(random_state(n, rng)).expect("unit vector"),
                    )
                } else {
                    DensityMatrix::maximally_mixed(n)
                }
            })
            .collect();
        AlgebraState { weights, densities }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraElement<T: Real> {
    block_dims: Vec<usize>,
    blocks: Vec<ComplexMatrix<T>>,
}

impl<T: Real> AlgebraElement<T> {
    pub fn new(algebra: &BlockAlgebra, blocks: Vec<ComplexMatrix<T>>) -> Result<Self> {
        if blocks.len() != algebra.block_dims.len() {
            return Err(Error::AlgebraMismatch);
        }
        for (b, &n) in blocks.iter().zip(&algebra.block_dims) {
            if b.rows() != n || b.cols() != n {
                return Err(Error::AlgebraMismatch);
            }
        }
        Ok(Self {
            block_dims: algebra.block_dims.clone(),
            blocks,
        })
    }

    pub fn blocks(&self) -> &[ComplexMatrix<T>] {
        &self.blocks
    }

    pub fn block_dims(&self) -> &[usize] {
        &self.block_dims
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.block_dims != other.block_dims {
            return Err(Error::AlgebraMismatch);
        }
        Ok(())
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&ComplexMatrix<T>, &ComplexMatrix<T>) -> ComplexMatrix<T>) -> Result<Self> {
        self.check(other)?;
        Ok(Self {
            block_dims: self.block_dims.clone(),
            blocks: self.blocks.iter().zip(&other.blocks).map(|(a, b)| f(a, b)).collect(),
        })
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    /// Involution `x*`: blockwise conjugate transpose.
    pub fn star(&self) -> Self {
        Self {
            block_dims: self.block_dims.clone(),
            blocks: self.blocks.iter().map(ComplexMatrix::adjoint).collect(),
        }
    }

    pub fn scale(&self, s: C<T>) -> Self {
        Self {
            block_dims: self.block_dims.clone(),
            blocks: self.blocks.iter().map(|b| b.scale(s)).collect(),
        }
    }

    pub fn max_diff(&self, other: &Self) -> T {
        self.blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| a.max_diff(b))
            .fold(T::zero(), T::max)
    }

    /// `x = x*` within `tol` (relative to the largest entry).
    pub fn is_symmetric(&self, tol: T) -> bool {
        self.blocks.iter().all(|b| b.is_hermitian(tol))
    }

    /// Block-diagonal matrix in the defining representation.
    pub fn to_direct_sum(&self) -> ComplexMatrix<T> {
        ComplexMatrix::direct_sum(&self.blocks)
    }

    /// Coordinates in the matrix-unit basis.
    pub fn coefficients(&self) -> Vec<C<T>> {
        self.blocks.iter().flat_map(|b| b.data().iter().copied()).collect()
    }
}

/// State in block-diagonal form.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraState<T: Real> {
    weights: Vec<T>,
    densities: Vec<DensityMatrix<T>>,
}

impl<T: Real> AlgebraState<T> {
    pub fn new(weights: Vec<T>, densities: Vec<DensityMatrix<T>>) -> Result<Self> {
        if weights.len() != densities.len() || weights.is_empty() {
            return Err(Error::InvalidState("one weight per block density is required".into()));
        }
        if weights.iter().any(|&p| !(p >= T::zero()) || !p.is_finite()) {
            return Err(Error::InvalidState("weights must be non-negative".into()));
        }
        let total: T = weights.iter().copied().sum();
        if (total - T::one()).abs() > T::lit(1e-12).max(T::epsilon() * T::lit(16.0)) {
            return Err(Error::InvalidState(format!("weights sum to {total}")));
        }
        Ok(Self { weights, densities })
    }

    /// Single-block state.
    pub fn single(rho: DensityMatrix<T>) -> Self {
        Self {
            weights: vec![T::one()],
            densities: vec![rho],
        }
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn densities(&self) -> &[DensityMatrix<T>] {
        &self.densities
    }

    pub fn compatible_with(&self, algebra: &BlockAlgebra) -> bool {
        self.densities.len() == algebra.block_dims.len()
            && self.densities.iter().zip(&algebra.block_dims).all(|(d, &n)| d.dim() == n)
    }

    fn check_shape(&self, dims: &[usize]) -> Result<()> {
        if self.densities.len() != dims.len() || self.densities.iter().zip(dims).any(|(d, &n)| d.dim() != n) {
            return Err(Error::AlgebraMismatch);
        }
        Ok(())
    }
}

/// `ω(x) = Σ p_k tr(ρ_k x_k)`.
pub fn state_value<T: Real>(omega: &AlgebraState<T>, x: &AlgebraElement<T>) -> Result<C<T>> {
    omega.check_shape(&x.block_dims)?;
    Ok(omega
        .weights
        .iter()
        .zip(&omega.densities)
        .zip(&x.blocks)
        .fold(czero(), |acc, ((&p, rho), xb)| acc + rho.expectation(xb) * p))
}

/// C*-norm: square root of the spectral radius of `x* x`, maximized over blocks.
pub fn cstar_norm<T: Real>(x: &AlgebraElement<T>) -> T {
    x.blocks
        .iter()
        .map(|b| {
            let g = &b.adjoint() * b;
            eigh(&g)
                .map(|e| e.values.last().copied().unwrap_or(T::zero()).max(T::zero()))
                .unwrap_or(T::nan())
        })
        .fold(T::zero(), T::max)
        .sqrt()
}

/// One point of the spectrum together with the block it came from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralPoint<T: Real> {
    pub value: C<T>,
    pub block: usize,
}

/// Spectrum of an element normal in every block.
pub fn element_spectrum<T: Real>(x: &AlgebraElement<T>) -> Result<Vec<SpectralPoint<T>>> {
    let tol = T::lit(1e-10).max(T::epsilon() * T::lit(100.0));
    let mut out = Vec::new();
    for (k, b) in x.blocks.iter().enumerate() {
        let bd = b.adjoint();
        let comm = (b * &bd).max_diff(&(&bd * b));
        if comm > tol * b.max_abs().powi(2).max(T::one()) {
            return Err(Error::NotNormal { block: k });
        }
        // Common eigenbasis of the commuting Hermitian parts via a generic mix.
        let h1 = b.hermitian_part();
        let h2 = (b - &bd).scale(C::new(T::zero(), -T::lit(0.5)));
        let mix = &h1 + &h2.scale_real(T::lit(0.6180339887498949));
        let e = eigh(&mix)?;
        for j in 0..e.values.len() {
            let v = e.vector(j);
            out.push(SpectralPoint {
                value: b.sandwich(&v, &v),
                block: k,
            });
        }
    }
    Ok(out)
}

/// Distinct real outcomes of a symmetric element, clustered at `cluster_tol`.
pub fn distinct_outcomes<T: Real>(x: &AlgebraElement<T>, cluster_tol: T) -> Result<Vec<T>> {
    if !x.is_symmetric(T::lit(1e-10).max(T::epsilon() * T::lit(100.0))) {
        return Err(Error::NotSymmetric);
    }
    let mut vals: Vec<T> = Vec::new();
    for b in &x.blocks {
        vals.extend(eigh(b)?.values);
    }
    vals.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let mut out: Vec<T> = Vec::new();
    for v in vals {
        match out.last() {
            Some(&last) if (v - last).abs() <= cluster_tol => {}
            _ => out.push(v),
        }
    }
    Ok(out)
}

/// `ω(Π_z)` with `Π_z` the spectral projector of `x` onto eigenvalues within
/// `cluster_tol` of `z`.
pub fn outcome_probability<T: Real>(
    omega: &AlgebraState<T>,
    x: &AlgebraElement<T>,
    z: T,
    cluster_tol: T,
) -> Result<T> {
    if !x.is_symmetric(T::lit(1e-10).max(T::epsilon() * T::lit(100.0))) {
        return Err(Error::NotSymmetric);
    }
    omega.check_shape(&x.block_dims)?;
    let mut prob = T::zero();
    for ((&p, rho), b) in omega.weights.iter().zip(&omega.densities).zip(&x.blocks) {
        let e = eigh(b)?;
        let proj = e.spectral_projector(|l| (l - z).abs() <= cluster_tol);
        prob += p * rho.expectation(&proj).re;
    }
    Ok(prob)
}

/// Largest deviation between a cross-sector superposition and the
/// corresponding mixture, over `samples` random block-diagonal observables.
///
/// `|ψ> = ⊕ c_k |ψ_k>`; the deviation is `|<ψ|a|ψ> - Σ |c_k|² <ψ_k|a_k|ψ_k>|`.
pub fn superselection_indistinguishability<T: Real>(
    algebra: &BlockAlgebra,
    coefficients: &[C<T>],
    block_pures: &[Vec<C<T>>],
    samples: usize,
    rng: &mut SeededRng,
) -> Result<T> {
    let psi = superposition(algebra, coefficients, block_pures)?;
    let mut worst = T::zero();
    for _ in 0..samples {
        let a = algebra.random_element::<T>(rng);
        let full = a.to_direct_sum();
        let sup = full.sandwich(&psi, &psi);
        let mix = mixture_value(&a.blocks, coefficients, block_pures);
        worst = worst.max((sup - mix).norm());
    }
    Ok(worst)
}

/// Same comparison when every operator on `⊕ C^{n_k}` is allowed, including
/// the off-diagonal intertwiners. Returns the larger of the projector witness
/// `|ψ><ψ|` and `samples` random full matrices.
pub fn full_algebra_deviation<T: Real>(
    algebra: &BlockAlgebra,
    coefficients: &[C<T>],
    block_pures: &[Vec<C<T>>],
    samples: usize,
    rng: &mut SeededRng,
) -> Result<T> {
    let psi = superposition(algebra, coefficients, block_pures)?;
    let n = algebra.hilbert_dim();
    let diag_blocks = |m: &ComplexMatrix<T>| -> Vec<ComplexMatrix<T>> {
        let mut off = 0;
        algebra
            .block_dims
            .iter()
            .map(|&d| {
                let b = m.submatrix(off, off, d, d);
                off += d;
                b
            })
            .collect()
    };
    let witness = ComplexMatrix::ket_bra(&psi);
    let mut worst = (witness.sandwich(&psi, &psi) - mixture_value(&diag_blocks(&witness), coefficients, block_pures)).norm();
    for _ in 0..samples {
        let a = gaussian_matrix::<T>(n, n, rng);
        let dev = (a.sandwich(&psi, &psi) - mixture_value(&diag_blocks(&a), coefficients, block_pures)).norm();
        worst = worst.max(dev);
    }
    Ok(worst)
}

fn superposition<T: Real>(algebra: &BlockAlgebra, coefficients: &[C<T>], block_pures: &[Vec<C<T>>]) -> Result<Vec<C<T>>> {
    let k = algebra.block_dims.len();
    if coefficients.len() != k || block_pures.len() != k {
        return Err(Error::AlgebraMismatch);
    }
    let total: T = coefficients.iter().map(|c| c.norm_sqr()).sum();
    if (total - T::one()).abs() > T::lit(1e-10) {
        return Err(Error::NotNormalized { norm: total.sqrt().to_f64_lossy() });
    }
    let mut psi = Vec::with_capacity(algebra.hilbert_dim());
    for ((c, v), &n) in coefficients.iter().zip(block_pures).zip(&algebra.block_dims) {
        if v.len() != n {
            return Err(Error::DimensionMismatch("block pure state length".into()));
        }
        psi.extend(v.iter().map(|z| *z * *c));
    }
    Ok(psi)
}

fn mixture_value<T: Real>(blocks: &[ComplexMatrix<T>], coefficients: &[C<T>], block_pures: &[Vec<C<T>>]) -> C<T> {
    blocks
        .iter()
        .zip(coefficients)
        .zip(block_pures)
        .fold(czero(), |acc, ((b, c), v)| acc + b.sandwich(v, v) * c.norm_sqr())
}

/// Algebra file: `{"blocks": [n_1, ...]}`.
pub type AlgebraFile = BlockAlgebra;

/// State file: `{"weights": [...], "densities": [matrix, ...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StateFile {
    pub weights: Vec<f64>,
    pub densities: Vec<MatrixFile>,
}

impl StateFile {
    pub fn to_state<T: Real>(&self, tol: &Tolerances) -> Result<AlgebraState<T>> {
        let densities = self
            .densities
            .iter()
            .map(|m| DensityMatrix::with_tol(m.to_matrix()?, tol))
            .collect::<Result<Vec<_>>>()?;
        AlgebraState::new(self.weights.iter().map(|&w| T::lit(w)).collect(), densities)
    }

    pub fn from_state<T: Real>(s: &AlgebraState<T>) -> Self {
        Self {
            weights: s.weights.iter().map(|w| w.to_f64_lossy()).collect(),
            densities: s.densities.iter().map(|d| MatrixFile::from(d.matrix())).collect(),
        }
    }
}

/// Real scalar as an algebra coefficient.
pub fn real<T: Real>(x: f64) -> C<T> {
    cr(T::lit(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{pauli, StateVector};

    fn m2() -> BlockAlgebra {
        BlockAlgebra::full(2).unwrap()
    }

    #[test]
    fn rejects_empty_and_zero_blocks() {
        assert!(BlockAlgebra::new(vec![]).is_err());
        assert!(BlockAlgebra::new(vec![2, 0]).is_err());
    }

    #[test]
    fn unit_and_involution_axioms() {
        let alg = BlockAlgebra::new(vec![2, 1, 3]).unwrap();
        let mut rng = SeededRng::new(30);
        let x = alg.random_element::<f64>(&mut rng);
        let y = alg.random_element::<f64>(&mut rng);
        assert!(x.mul(&alg.unit()).unwrap().max_diff(&x) < 1e-15);
        assert_eq!(x.star().star(), x);
        let lhs = x.mul(&y).unwrap().star();
        let rhs = y.star().mul(&x.star()).unwrap();
        assert!(lhs.max_diff(&rhs) < 1e-13);
    }

    #[test]
    fn mismatched_algebras_are_rejected() {
        let a = BlockAlgebra::new(vec![2]).unwrap();
        let b = BlockAlgebra::new(vec![1, 1]).unwrap();
        assert!(matches!(a.unit::<f64>().mul(&b.unit()), Err(Error::AlgebraMismatch)));
    }

    #[test]
    fn state_values() {
        let alg = m2();
        let rho = DensityMatrix::from_pure(&StateVector::<f64>::basis(2, 0));
        let omega = AlgebraState::single(rho);
        assert!((state_value(&omega, &alg.unit()).unwrap().re - 1.0).abs() < 1e-15);
        let [_, _, z] = pauli::<f64>();
        let sz = alg.element(vec![z]).unwrap();
        assert!((state_value(&omega, &sz).unwrap().re - 1.0).abs() < 1e-15);

        let mut rng = SeededRng::new(31);
        let big = BlockAlgebra::new(vec![2, 3]).unwrap();
        let w = big.random_state::<f64>(&mut rng);
        let x = big.random_element::<f64>(&mut rng);
        let a = state_value(&w, &x.star()).unwrap();
        let b = state_value(&w, &x).unwrap().conj();
        assert!((a - b).norm() < 1e-13);
    }

    #[test]
    fn norms() {
        let alg = m2();
        assert!((cstar_norm(&alg.unit::<f64>()) - 1.0).abs() < 1e-15);
        let [x, _, _] = pauli::<f64>();
        assert!((cstar_norm(&alg.element(vec![x]).unwrap()) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn spectra() {
        let alg = BlockAlgebra::new(vec![2, 1]).unwrap();
        let [_, _, z] = pauli::<f64>();
        let x = alg
            .element(vec![z, ComplexMatrix::from_real_rows(&[vec![5.0]])])
            .unwrap();
        let mut vals: Vec<f64> = element_spectrum::<f64>(&x).unwrap().iter().map(|p| p.value.re).collect();
        vals.sort_by(f64::total_cmp);
        assert!((vals[0] + 1.0).abs() < 1e-14 && (vals[1] - 1.0).abs() < 1e-14 && (vals[2] - 5.0).abs() < 1e-14);

        let p = alg
            .element(vec![ComplexMatrix::from_real_diagonal(&[1.0, 0.0]), ComplexMatrix::from_real_rows(&[vec![1.0]])])
            .unwrap();
        for s in element_spectrum::<f64>(&p).unwrap() {
            assert!(s.value.im.abs() < 1e-14);
            assert!(s.value.re.abs() < 1e-14 || (s.value.re - 1.0).abs() < 1e-14);
        }

        let nilpotent = alg
            .element(vec![ComplexMatrix::from_real_rows(&[vec![0.0, 1.0], vec![0.0, 0.0]]), ComplexMatrix::<f64>::zeros(1, 1)])
            .unwrap();
        assert!(matches!(element_spectrum(&nilpotent), Err(Error::NotNormal { block: 0 })));
    }

    #[test]
    fn one_plus_xstar_x_is_invertible() {
        let alg = BlockAlgebra::new(vec![3, 2]).unwrap();
        let mut rng = SeededRng::new(32);
        let x = alg.random_element::<f64>(&mut rng);
        let y = alg.unit().add(&x.star().mul(&x).unwrap()).unwrap();
        for s in element_spectrum(&y).unwrap() {
            assert!(s.value.re >= 1.0 - 1e-12);
        }
    }

    #[test]
    fn outcome_probabilities() {
        let alg = m2();
        let [_, _, z] = pauli::<f64>();
        let sz = alg.element(vec![z]).unwrap();
        let up = AlgebraState::single(DensityMatrix::from_pure(&StateVector::basis(2, 0)));
        assert!((outcome_probability(&up, &sz, 1.0, 1e-8).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(outcome_probability(&up, &sz, 0.3, 1e-8).unwrap(), 0.0);
        let s = 0.5f64.sqrt();
        let plus = AlgebraState::single(DensityMatrix::from_pure(
            &StateVector::new(vec![C::new(s, 0.0), C::new(s, 0.0)]).unwrap(),
        ));
        assert!((outcome_probability(&plus, &sz, 1.0, 1e-8).unwrap() - 0.5).abs() < 1e-15);
        assert!((outcome_probability(&plus, &sz, -1.0, 1e-8).unwrap() - 0.5).abs() < 1e-15);
        let not_sym = alg.element(vec![ComplexMatrix::from_real_rows(&[vec![0.0, 1.0], vec![0.0, 0.0]])]).unwrap();
        assert!(matches!(outcome_probability(&plus, &not_sym, 0.0, 1e-8), Err(Error::NotSymmetric)));
    }

    #[test]
    fn superselection_contrast() {
        let mut rng = SeededRng::new(33);
        let one = BlockAlgebra::new(vec![3]).unwrap();
        let v = random_state::<f64>(3, &mut rng);
        let d = superselection_indistinguishability(&one, &[real(1.0)], &[v], 100, &mut rng).unwrap();
        assert!(d < 1e-14);

        let two = BlockAlgebra::new(vec![2, 2]).unwrap();
        let s = 0.5f64.sqrt();
        let c = [real(s), real(s)];
        let pures = vec![random_state::<f64>(2, &mut rng), random_state::<f64>(2, &mut rng)];
        let d = superselection_indistinguishability(&two, &c, &pures, 1000, &mut rng).unwrap();
        assert!(d < 1e-10);
        let full = full_algebra_deviation(&two, &c, &pures, 100, &mut rng).unwrap();
        assert!(full >= 0.5 - 1e-12);
    }

    #[test]
    fn state_validation() {
        let d = DensityMatrix::<f64>::maximally_mixed(1);
        assert!(AlgebraState::new(vec![0.6, 0.6], vec![d.clone(), d.clone()]).is_err());
        assert!(AlgebraState::new(vec![-0.5, 1.5], vec![d.clone(), d.clone()]).is_err());
        assert!(AlgebraState::new(vec![0.5, 0.5], vec![d.clone(), d]).is_ok());
    }
}
