//! Frame functions and the Born rule: evaluation, fitting a density matrix to
//! sampled ray values, conditional probabilities, the two reversibility
//! protocols, the projection postulate, and unitary evolution.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::io::ComplexEntry;
use crate::linalg::{
    inner, least_squares, matrix_exp, ComplexMatrix, DensityMatrix, HermitianOperator, Projector, SeededRng,
    StateVector,
};
use crate::scalar::C;

type C64 = C<f64>;

/// Independent Monte Carlo shards; fixed so results do not depend on the
/// number of worker threads.
const SHARDS: u64 = 64;

/// Ray values of a candidate frame function.
#[derive(Debug, Clone)]
pub struct FrameSample {
    rays: Vec<StateVector<f64>>,
    values: Vec<f64>,
}

impl FrameSample {
    pub fn new(rays: Vec<StateVector<f64>>, values: Vec<f64>) -> Result<Self> {
        if rays.len() != values.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} rays but {} values",
                rays.len(),
                values.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !(-1e-12..=1.0 + 1e-12).contains(*v)) {
            return Err(Error::InvalidState(format!("frame value {v} outside [0, 1]")));
        }
        if let Some(r) = rays.first() {
            if rays.iter().any(|x| x.dim() != r.dim()) {
                return Err(Error::DimensionMismatch("rays of different dimensions".into()));
            }
        }
        Ok(Self { rays, values })
    }

    /// Sample a frame function `e ↦ <e|ρ|e>` on the given rays.
    pub fn from_density(rho: &DensityMatrix<f64>, rays: Vec<StateVector<f64>>) -> Result<Self> {
        let values = rays.iter().map(|r| frame_from_density(rho, r)).collect::<Result<Vec<_>>>()?;
        Self::new(rays, values.into_iter().map(|v| v.clamp(0.0, 1.0)).collect())
    }

    pub fn rays(&self) -> &[StateVector<f64>] {
        &self.rays
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.rays.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rays.is_empty()
    }
}

/// `{"rays": [[entry...]...], "values": [...]}`; rays are normalized on load.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FrameSampleFile {
    pub rays: Vec<Vec<ComplexEntry>>,
    pub values: Vec<f64>,
}

impl FrameSampleFile {
    pub fn to_sample(&self) -> Result<FrameSample> {
        let rays = self
            .rays
            .iter()
            .map(|r| StateVector::normalize(r.iter().map(|e| e.to_complex()).collect()))
            .collect::<Result<Vec<_>>>()?;
        FrameSample::new(rays, self.values.clone())
    }

    pub fn from_sample(s: &FrameSample) -> Self {
        Self {
            rays: s
                .rays
                .iter()
                .map(|r| r.amplitudes().iter().map(|z| ComplexEntry::from_complex(*z)).collect())
                .collect(),
            values: s.values.clone(),
        }
    }
}

/// `ψ(e) = <e|ρ|e>`.
pub fn frame_from_density(rho: &DensityMatrix<f64>, ray: &StateVector<f64>) -> Result<f64> {
    if rho.dim() != ray.dim() {
        return Err(Error::DimensionMismatch(format!(
            "{}-dimensional state and {}-dimensional ray",
            rho.dim(),
            ray.dim()
        )));
    }
    let e = ray.amplitudes();
    Ok(rho.matrix().sandwich(e, e).re)
}

#[derive(Debug, Clone, Serialize)]
pub struct FrameFit {
    #[serde(skip)]
    pub rho: DensityMatrix<f64>,
    /// Mean squared residual of the unconstrained Hermitian least-squares fit.
    pub fit_residual: f64,
    /// Squared Frobenius distance moved by the projection onto density matrices.
    pub projection_distance: f64,
    /// `fit_residual + projection_distance`.
    pub residual: f64,
    pub consistent: bool,
}

/// Least-squares Hermitian form `X` with `<e|X|e> ≈ value`, projected to the
/// trace-one positive cone.
pub fn fit_density_from_frame(samples: &FrameSample, dim: usize, gleason_tol: f64) -> Result<FrameFit> {
    let n = dim * dim;
    if samples.len() < n {
        return Err(Error::InsufficientSamples {
            needed: n,
            got: samples.len(),
        });
    }
    if samples.rays.iter().any(|r| r.dim() != dim) {
        return Err(Error::DimensionMismatch(format!("rays must live in C^{dim}")));
    }
    // Parameters: X_kk (real), then Re X_jk and Im X_jk for j < k.
    let mut pairs = Vec::new();
    for j in 0..dim {
        for k in j + 1..dim {
            pairs.push((j, k));
        }
    }
    let design = ComplexMatrix::from_fn(samples.len(), n, |row, col| {
        let e = samples.rays[row].amplitudes();
        let v = if col < dim {
            e[col].norm_sqr()
        } else {
            let (j, k) = pairs[(col - dim) / 2];
            let w = e[j].conj() * e[k];
            if (col - dim).is_multiple_of(2) {
                2.0 * w.re
            } else {
                -2.0 * w.im
            }
        };
        C64::new(v, 0.0)
    });
    let rhs: Vec<C64> = samples.values.iter().map(|&v| C64::new(v, 0.0)).collect();
    let x = least_squares(&design, &rhs, 1e-12)?;
    let fitted = design.matvec(&x);
    let fit_residual = fitted.iter().zip(&rhs).map(|(a, b)| (a.re - b.re).powi(2)).sum::<f64>() / samples.len() as f64;

    let mut xm = ComplexMatrix::<f64>::zeros(dim, dim);
    for k in 0..dim {
        xm[(k, k)] = C64::new(x[k].re, 0.0);
    }
    for (p, &(j, k)) in pairs.iter().enumerate() {
        let z = C64::new(x[dim + 2 * p].re, x[dim + 2 * p + 1].re);
        xm[(j, k)] = z;
        xm[(k, j)] = z.conj();
    }
    let rho = project_to_density(&xm)?;
    let diff = rho.matrix() - &xm;
    let projection_distance = diff.frobenius().powi(2);
    let residual = fit_residual + projection_distance;
    Ok(FrameFit {
        rho,
        fit_residual,
        projection_distance,
        residual,
        consistent: residual < gleason_tol,
    })
}

/// Clip negative eigenvalues and renormalize; the maximally mixed state when
/// nothing positive survives.
fn project_to_density(x: &ComplexMatrix<f64>) -> Result<DensityMatrix<f64>> {
    let e = crate::linalg::eigh(x)?;
    let total: f64 = e.values.iter().map(|l| l.max(0.0)).sum();
    if total <= 1e-300 {
        return Ok(DensityMatrix::maximally_mixed(x.rows()));
    }
    let clipped = e.apply(|l| C64::new(l.max(0.0) / total, 0.0));
    DensityMatrix::new(clipped)
}

/// `tr(P_A P_B) / tr(P_A)`.
pub fn conditional_probability(pa: &Projector<f64>, pb: &Projector<f64>) -> Result<f64> {
    if pa.dim() != pb.dim() {
        return Err(Error::DimensionMismatch("projectors of different dimensions".into()));
    }
    let ta = pa.trace();
    if ta < 0.5 {
        return Err(Error::ZeroProjector);
    }
    Ok(((pa.matrix() * pb.matrix()).trace().re / ta).clamp(0.0, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProtocolResult {
    pub trials: u64,
    /// Trials entering the estimate (those conditioned on; all for the forward protocol).
    pub conditioned: u64,
    pub successes: u64,
    pub empirical_prob: f64,
    pub analytic_prob: f64,
    /// Binomial standard error at the analytic probability.
    pub std_error: f64,
}

impl ProtocolResult {
    fn from_counts(trials: u64, conditioned: u64, successes: u64, analytic: f64) -> Self {
        let empirical = if conditioned == 0 { f64::NAN } else { successes as f64 / conditioned as f64 };
        let std_error = if conditioned == 0 {
            f64::INFINITY
        } else {
            (analytic * (1.0 - analytic) / conditioned as f64).sqrt()
        };
        Self {
            trials,
            conditioned,
            successes,
            empirical_prob: empirical,
            analytic_prob: analytic,
            std_error,
        }
    }

    /// Deviation in units of the standard error.
    pub fn z_score(&self) -> f64 {
        let d = (self.empirical_prob - self.analytic_prob).abs();
        if d == 0.0 {
            0.0
        } else {
            d / self.std_error
        }
    }
}

fn shard_sizes(trials: u64) -> Vec<(u64, u64)> {
    (0..SHARDS)
        .map(|s| (s, trials / SHARDS + u64::from(s < trials % SHARDS)))
        .filter(|&(_, n)| n > 0)
        .collect()
}

/// Alice prepares `ρ_A = P_A / tr P_A`; Bob tests `P_B` by Born sampling.
pub fn protocol_forward(pa: &Projector<f64>, pb: &Projector<f64>, trials: u64, seed: u64) -> Result<ProtocolResult> {
    let p = conditional_probability(pa, pb)?;
    let successes: u64 = shard_sizes(trials)
        .into_par_iter()
        .map(|(shard, n)| {
            let mut rng = SeededRng::with_stream(seed, shard);
            (0..n).filter(|_| rng.bernoulli(p)).count() as u64
        })
        .sum();
    Ok(ProtocolResult::from_counts(trials, trials, successes, p))
}

/// Bob starts from `I/N` and tests `P_B`, leaving `ρ_B` or `ρ_¬B`; Alice then
/// tests `P_A`. Conditional on Alice's TRUE, the fraction of runs where Bob's
/// outcome was TRUE.
pub fn protocol_backward(pa: &Projector<f64>, pb: &Projector<f64>, trials: u64, seed: u64) -> Result<ProtocolResult> {
    let analytic = conditional_probability(pa, pb)?;
    let n = pa.dim() as f64;
    let tb = pb.trace();
    let p_b = tb / n;
    let overlap = (pa.matrix() * pb.matrix()).trace().re;
    let p_a_given_b = if tb > 0.5 { (overlap / tb).clamp(0.0, 1.0) } else { 0.0 };
    let p_a_given_not_b = if n - tb > 0.5 {
        ((pa.trace() - overlap) / (n - tb)).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let (conditioned, successes) = shard_sizes(trials)
        .into_par_iter()
        .map(|(shard, m)| {
            let mut rng = SeededRng::with_stream(seed, SHARDS + shard);
            let (mut cond, mut succ) = (0u64, 0u64);
            for _ in 0..m {
                let b = rng.bernoulli(p_b);
                let a = rng.bernoulli(if b { p_a_given_b } else { p_a_given_not_b });
                if a {
                    cond += 1;
                    succ += u64::from(b);
                }
            }
            (cond, succ)
        })
        .reduce(|| (0, 0), |x, y| (x.0 + y.0, x.1 + y.1));
    Ok(ProtocolResult::from_counts(trials, conditioned, successes, analytic))
}

/// Projection postulate: `(PρP / tr(Pρ), tr(Pρ))`.
pub fn luders_update(rho: &DensityMatrix<f64>, p: &Projector<f64>) -> Result<(DensityMatrix<f64>, f64)> {
    if rho.dim() != p.dim() {
        return Err(Error::DimensionMismatch("state and projector dimensions differ".into()));
    }
    let prob = rho.expectation(p.matrix()).re;
    if prob < 1e-14 {
        return Err(Error::ZeroProbability(prob));
    }
    let post = &(p.matrix() * rho.matrix()) * p.matrix();
    Ok((DensityMatrix::new(post.scale_real(1.0 / prob).hermitian_part())?, prob.min(1.0)))
}

/// `|<φ|ψ>|²`.
pub fn born_probability(phi: &StateVector<f64>, psi: &StateVector<f64>) -> Result<f64> {
    if phi.dim() != psi.dim() {
        return Err(Error::DimensionMismatch("state dimensions differ".into()));
    }
    Ok(inner(phi.amplitudes(), psi.amplitudes()).norm_sqr())
}

/// `O = Σ o_i P_i` for a mutually orthogonal family.
pub fn observable_from_projectors(outcomes: &[(f64, Projector<f64>)]) -> Result<HermitianOperator<f64>> {
    let Some(first) = outcomes.first() else {
        return Err(Error::InvalidState("empty projector family".into()));
    };
    let d = first.1.dim();
    if outcomes.iter().any(|(_, p)| p.dim() != d) {
        return Err(Error::DimensionMismatch("projectors of different dimensions".into()));
    }
    for i in 0..outcomes.len() {
        for j in i + 1..outcomes.len() {
            if (outcomes[i].1.matrix() * outcomes[j].1.matrix()).max_abs() > 1e-10 {
                return Err(Error::NotOrthogonalFamily(i, j));
            }
        }
    }
    let mut o = ComplexMatrix::zeros(d, d);
    for (v, p) in outcomes {
        o = &o + &p.matrix().scale_real(*v);
    }
    HermitianOperator::new(o)
}

/// `ψ(t) = exp(−itH) ψ`.
pub fn schrodinger_evolve(psi: &StateVector<f64>, h: &HermitianOperator<f64>, t: f64) -> Result<StateVector<f64>> {
    if psi.dim() != h.dim() {
        return Err(Error::DimensionMismatch("state and Hamiltonian dimensions differ".into()));
    }
    let u = matrix_exp(h.matrix(), C64::new(0.0, -t))?;
    StateVector::normalize(u.matvec(psi.amplitudes()))
}

/// `A(t) = U(t)† A U(t)` with `U(t) = exp(−itH)`.
pub fn heisenberg_evolve(a: &HermitianOperator<f64>, h: &HermitianOperator<f64>, t: f64) -> Result<HermitianOperator<f64>> {
    if a.dim() != h.dim() {
        return Err(Error::DimensionMismatch("observable and Hamiltonian dimensions differ".into()));
    }
    let u = matrix_exp(h.matrix(), C64::new(0.0, -t))?;
    HermitianOperator::new(&(&u.adjoint() * a.matrix()) * &u)
}

/// `n` rays drawn uniformly from the unit sphere of `C^dim`.
pub fn random_rays(dim: usize, n: usize, rng: &mut SeededRng) -> Vec<StateVector<f64>> {
    (0..n)
        .map(|_| StateVector::new(crate::linalg::random_state(dim, rng)).expect("unit vector"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{random_density, random_projector, random_unitary};

    fn proj(v: &[C64]) -> Projector<f64> {
        Projector::from_orthonormal(&[v.to_vec()], v.len()).unwrap()
    }

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn frame_values() {
        let mut rng = SeededRng::new(70);
        let mixed = DensityMatrix::maximally_mixed(4);
        for r in random_rays(4, 5, &mut rng) {
            assert!((frame_from_density(&mixed, &r).unwrap() - 0.25).abs() < 1e-15);
        }
        let e = random_rays(3, 1, &mut rng).pop().unwrap();
        assert!((frame_from_density(&e.density(), &e).unwrap() - 1.0).abs() < 1e-14);
        let rho = DensityMatrix::new(random_density::<f64>(3, &mut rng)).unwrap();
        let u = random_unitary::<f64>(3, &mut rng);
        let total: f64 = (0..3)
            .map(|k| frame_from_density(&rho, &StateVector::new(u.column(k)).unwrap()).unwrap())
            .sum();
        assert!((total - 1.0).abs() < 1e-12);
        let phased = StateVector::new(e.amplitudes().iter().map(|z| *z * C64::from_polar(1.0, 0.7)).collect()).unwrap();
        assert!((frame_from_density(&rho, &e).unwrap() - frame_from_density(&rho, &phased).unwrap()).abs() < 1e-15);
        assert!(frame_from_density(&rho, &StateVector::basis(2, 0)).is_err());
    }

    #[test]
    fn gleason_round_trip() {
        let mut rng = SeededRng::new(71);
        let rho = DensityMatrix::new(random_density::<f64>(3, &mut rng)).unwrap();
        let sample = FrameSample::from_density(&rho, random_rays(3, 50, &mut rng)).unwrap();
        let fit = fit_density_from_frame(&sample, 3, 1e-6).unwrap();
        assert!(fit.rho.matrix().max_diff(rho.matrix()) < 1e-8);
        assert!(fit.consistent);

        let rays = random_rays(3, 20, &mut rng);
        let iso = FrameSample::new(rays, vec![1.0 / 3.0; 20]).unwrap();
        let fit = fit_density_from_frame(&iso, 3, 1e-6).unwrap();
        assert!(fit.rho.matrix().max_diff(DensityMatrix::<f64>::maximally_mixed(3).matrix()) < 1e-12);

        let few = FrameSample::new(random_rays(3, 8, &mut rng), vec![0.1; 8]).unwrap();
        assert!(matches!(
            fit_density_from_frame(&few, 3, 1e-6),
            Err(Error::InsufficientSamples { needed: 9, got: 8 })
        ));
    }

    #[test]
    fn conditional_probabilities() {
        let s = 0.5f64.sqrt();
        let plus = proj(&[c(s), c(s)]);
        let zero = proj(&[c(1.0), c(0.0)]);
        let one = proj(&[c(0.0), c(1.0)]);
        assert!((conditional_probability(&plus, &plus).unwrap() - 1.0).abs() < 1e-15);
        assert!(conditional_probability(&zero, &one).unwrap().abs() < 1e-15);
        assert!((conditional_probability(&plus, &zero).unwrap() - 0.5).abs() < 1e-15);
        let empty = Projector::new(ComplexMatrix::<f64>::zeros(2, 2)).unwrap();
        assert!(matches!(conditional_probability(&empty, &zero), Err(Error::ZeroProjector)));
    }

    #[test]
    fn protocols() {
        let s = 0.5f64.sqrt();
        let plus = proj(&[c(s), c(s)]);
        let zero = proj(&[c(1.0), c(0.0)]);
        let one = proj(&[c(0.0), c(1.0)]);
        let f = protocol_forward(&plus, &zero, 100_000, 7).unwrap();
        let b = protocol_backward(&plus, &zero, 100_000, 7).unwrap();
        assert_eq!(f.analytic_prob, b.analytic_prob);
        assert!((f.empirical_prob - 0.5).abs() < 0.005);
        assert!((b.empirical_prob - 0.5).abs() < 0.005);

        let id = Projector::identity(2);
        let certain = protocol_forward(&zero, &id, 1000, 1).unwrap();
        assert_eq!(certain.successes, 1000);
        assert_eq!(protocol_backward(&zero, &one, 1000, 1).unwrap().successes, 0);
        assert_eq!(protocol_backward(&zero, &zero, 1000, 1).unwrap().empirical_prob, 1.0);
        let wide = Projector::new(ComplexMatrix::from_real_diagonal(&[1.0, 1.0, 0.0])).unwrap();
        let narrow = Projector::new(ComplexMatrix::from_real_diagonal(&[1.0, 0.0, 0.0])).unwrap();
        assert_eq!(protocol_forward(&narrow, &wide, 1000, 2).unwrap().empirical_prob, 1.0);
    }

    #[test]
    fn protocols_are_reproducible() {
        let mut rng = SeededRng::new(72);
        let pa = Projector::new(random_projector::<f64>(4, 2, &mut rng)).unwrap();
        let pb = Projector::new(random_projector::<f64>(4, 1, &mut rng)).unwrap();
        assert_eq!(protocol_backward(&pa, &pb, 5000, 3).unwrap(), protocol_backward(&pa, &pb, 5000, 3).unwrap());
    }

    #[test]
    fn luders() {
        let zero = proj(&[c(1.0), c(0.0)]);
        let (post, p) = luders_update(&DensityMatrix::maximally_mixed(2), &zero).unwrap();
        assert!((p - 0.5).abs() < 1e-15);
        assert!(post.matrix().max_diff(zero.matrix()) < 1e-15);
        let (again, p2) = luders_update(&post, &zero).unwrap();
        assert!(p2 >= 1.0 - 1e-12);
        assert!(again.matrix().max_diff(post.matrix()) < 1e-15);
        let one = proj(&[c(0.0), c(1.0)]);
        assert!(matches!(luders_update(&post, &one), Err(Error::ZeroProbability(_))));

        let mut rng = SeededRng::new(73);
        let phi = random_rays(3, 1, &mut rng).pop().unwrap();
        let psi = random_rays(3, 1, &mut rng).pop().unwrap();
        let (_, p) = luders_update(&phi.density(), &proj(psi.amplitudes())).unwrap();
        assert!((p - born_probability(&phi, &psi).unwrap()).abs() < 1e-14);
    }

    #[test]
    fn observables() {
        let zero = proj(&[c(1.0), c(0.0)]);
        let one = proj(&[c(0.0), c(1.0)]);
        let o = observable_from_projectors(&[(1.0, zero.clone())]).unwrap();
        assert!(o.matrix().max_diff(zero.matrix()) < 1e-15);
        let sz = observable_from_projectors(&[(1.0, zero.clone()), (-1.0, one)]).unwrap();
        assert!(sz.matrix().max_diff(&ComplexMatrix::from_real_diagonal(&[1.0, -1.0])) < 1e-15);
        let s = 0.5f64.sqrt();
        let plus = proj(&[c(s), c(s)]);
        assert!(matches!(
            observable_from_projectors(&[(1.0, zero), (2.0, plus)]),
            Err(Error::NotOrthogonalFamily(0, 1))
        ));
    }

    #[test]
    fn evolution_pictures() {
        let mut rng = SeededRng::new(74);
        let h = HermitianOperator::new(crate::linalg::random_hermitian::<f64>(4, &mut rng)).unwrap();
        let a = HermitianOperator::new(crate::linalg::random_hermitian::<f64>(4, &mut rng)).unwrap();
        let psi = random_rays(4, 1, &mut rng).pop().unwrap();
        let same = schrodinger_evolve(&psi, &h, 0.0).unwrap();
        assert!(same.amplitudes().iter().zip(psi.amplitudes()).all(|(x, y)| (*x - *y).norm() < 1e-14));
        let t = 1.7;
        let s = schrodinger_evolve(&psi, &h, t).unwrap();
        let at = heisenberg_evolve(&a, &h, t).unwrap();
        let lhs = a.expectation(s.amplitudes());
        let rhs = at.expectation(psi.amplitudes());
        assert!((lhs - rhs).abs() < 1e-10);
        assert!((h.expectation(s.amplitudes()) - h.expectation(psi.amplitudes())).abs() < 1e-10);

        let d = HermitianOperator::new(ComplexMatrix::from_real_diagonal(&[0.5, -1.0])).unwrap();
        let v = StateVector::new(vec![c(0.6), c(0.8)]).unwrap();
        let w = schrodinger_evolve(&v, &d, 2.0).unwrap();
        assert!((w.amplitudes()[0] - C64::from_polar(0.6, -1.0)).norm() < 1e-14);
        assert!((w.amplitudes()[1] - C64::from_polar(0.8, 2.0)).norm() < 1e-14);
    }
}
