//! Von Neumann entropy, derived information quantities, the subadditivity
//! inequality suite, and Gibbs states.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{eigh, Eigen, matrix_exp_series, partial_trace_keep, ComplexMatrix, DensityMatrix, HermitianOperator};
use crate::scalar::{cr, Real};

const EIG_FLOOR: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EntropyUnit {
    #[default]
    Nats,
    Bits,
}

impl EntropyUnit {
    /// Convert a value in nats.
    pub fn from_nats<T: Real>(self, s: T) -> T {
        match self {
            EntropyUnit::Nats => s,
            EntropyUnit::Bits => s / T::LN_2(),
        }
    }
}

fn entropy_of_spectrum<T: Real>(values: &[T]) -> T {
    let floor = T::lit(EIG_FLOOR);
    values
        .iter()
        .map(|&l| l.min(T::one()))
        .filter(|&l| l >= floor)
        .map(|l| -l * l.ln())
        .sum::<T>()
        + T::zero()
}

/// `S(ρ) = -Σ λ log λ`.
pub fn von_neumann_entropy<T: Real>(rho: &DensityMatrix<T>, unit: EntropyUnit) -> Result<T> {
    Ok(unit.from_nats(entropy_of_spectrum(&rho.eig()?.values)))
}

/// `S(ρ‖σ) = tr ρ log ρ − tr ρ log σ`, infinite when `supp ρ ⊄ supp σ`.
pub fn relative_entropy<T: Real>(
    rho: &DensityMatrix<T>,
    sigma: &DensityMatrix<T>,
    unit: EntropyUnit,
    rank_tol: T,
) -> Result<T> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch(format!(
            "relative entropy of {}- and {}-dimensional states",
            rho.dim(),
            sigma.dim()
        )));
    }
    let neg_s = -entropy_of_spectrum(&rho.eig()?.values);
    let es = sigma.eig()?;
    let smax = es.values.last().copied().unwrap_or(T::zero());
    let mut cross = T::zero();
    for (k, &mu) in es.values.iter().enumerate() {
        let v = es.vector(k);
        let w = rho.matrix().sandwich(&v, &v).re;
        if mu <= rank_tol * smax {
            if w > rank_tol {
                return Ok(T::infinity());
            }
            continue;
        }
        cross += w * mu.ln();
    }
    Ok(unit.from_nats(neg_s - cross))
}

/// A density matrix on `⊗ C^{d_i}` with named factors.
#[derive(Debug, Clone)]
pub struct MultipartiteState<T: Real> {
    rho: DensityMatrix<T>,
    dims: Vec<usize>,
    labels: Vec<String>,
}

impl<T: Real> MultipartiteState<T> {
    /// Labels default to `A`, `B`, `C`, ...
    pub fn new(rho: DensityMatrix<T>, dims: Vec<usize>) -> Result<Self> {
        let labels = (0..dims.len()).map(|i| ((b'A' + i as u8) as char).to_string()).collect();
        Self::with_labels(rho, dims, labels)
    }

    pub fn with_labels(rho: DensityMatrix<T>, dims: Vec<usize>, labels: Vec<String>) -> Result<Self> {
        if dims.is_empty() || dims.contains(&0) || dims.iter().product::<usize>() != rho.dim() {
            return Err(Error::DimensionMismatch(format!(
                "subsystem dimensions {dims:?} do not multiply to {}",
                rho.dim()
            )));
        }
        if labels.len() != dims.len() {
            return Err(Error::DimensionMismatch("one label per subsystem".into()));
        }
        if dims.len() > 26 {
            return Err(Error::UnsupportedPartition(format!("{} subsystems", dims.len())));
        }
        Ok(Self { rho, dims, labels })
    }

    pub fn rho(&self) -> &DensityMatrix<T> {
        &self.rho
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn parties(&self) -> usize {
        self.dims.len()
    }

    fn index_of(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    /// Bitmask of a label string such as `"AC"` (single-character labels) or
    /// a single label.
    pub fn mask(&self, labels: &str) -> Result<u32> {
        if let Ok(i) = self.index_of(labels) {
            return Ok(1 << i);
        }
        let mut m = 0;
        for ch in labels.chars() {
            m |= 1 << self.index_of(&ch.to_string())?;
        }
        Ok(m)
    }

    /// Reduced state on the subsystems in `mask`.
    pub fn marginal(&self, mask: u32) -> Result<ComplexMatrix<T>> {
        let keep: Vec<usize> = (0..self.dims.len()).filter(|i| mask & (1 << i) != 0).collect();
        if keep.len() == self.dims.len() {
            return Ok(self.rho.matrix().clone());
        }
        partial_trace_keep(self.rho.matrix(), &self.dims, &keep)
    }

    /// Entropy of the marginal on `mask` in nats; the empty set has entropy 0.
    pub fn entropy_mask(&self, mask: u32) -> Result<T> {
        if mask == 0 {
            return Ok(T::zero());
        }
        Ok(entropy_of_spectrum(&eigh(&self.marginal(mask)?)?.values))
    }
}

/// `S(A|B) = S(AB) − S(B)`.
pub fn conditional_entropy<T: Real>(
    state: &MultipartiteState<T>,
    target: &str,
    given: &str,
    unit: EntropyUnit,
) -> Result<T> {
    let a = state.mask(target)?;
    let b = state.mask(given)?;
    Ok(unit.from_nats(state.entropy_mask(a | b)? - state.entropy_mask(b)?))
}

/// `S(A:B) = S(A) + S(B) − S(AB)`.
pub fn mutual_information<T: Real>(state: &MultipartiteState<T>, a: &str, b: &str, unit: EntropyUnit) -> Result<T> {
    let ma = state.mask(a)?;
    let mb = state.mask(b)?;
    Ok(unit.from_nats(state.entropy_mask(ma)? + state.entropy_mask(mb)? - state.entropy_mask(ma | mb)?))
}

#[derive(Debug, Clone, Serialize)]
pub struct Verdict {
    pub name: String,
    /// Slack of the inequality written as `margin ≥ 0`.
    pub margin: f64,
    pub satisfied: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct EntropyReport {
    pub unit: EntropyUnit,
    #[serde(flatten)]
    pub quantities: BTreeMap<String, f64>,
    pub verdicts: Vec<Verdict>,
}

impl EntropyReport {
    pub fn all_satisfied(&self) -> bool {
        self.verdicts.iter().all(|v| v.satisfied)
    }

    pub fn min_margin(&self) -> f64 {
        self.verdicts.iter().map(|v| v.margin).fold(f64::INFINITY, f64::min)
    }

    pub fn violations(&self) -> impl Iterator<Item = &Verdict> {
        self.verdicts.iter().filter(|v| !v.satisfied)
    }
}

/// Evaluate every applicable entropy inequality over all assignments of the
/// parties to the roles of each template.
pub fn check_inequalities<T: Real>(
    state: &MultipartiteState<T>,
    unit: EntropyUnit,
    violation_tol: f64,
) -> Result<EntropyReport> {
    let n = state.parties();
    if !(2..=4).contains(&n) {
        return Err(Error::UnsupportedPartition(format!(
            "inequality suite needs 2 to 4 subsystems, got {n}"
        )));
    }
    let mut s = vec![0.0f64; 1 << n];
    for (m, slot) in s.iter_mut().enumerate().skip(1) {
        *slot = unit.from_nats(state.entropy_mask(m as u32)?).to_f64_lossy();
    }
    let name = |mask: usize| -> String {
        (0..n).filter(|i| mask & (1 << i) != 0).map(|i| state.labels[i].as_str()).collect()
    };

    let mut quantities = BTreeMap::new();
    for (m, &v) in s.iter().enumerate().skip(1) {
        quantities.insert(format!("S_{}", name(m)), v);
    }
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let (a, b) = (1 << i, 1 << j);
            quantities.insert(format!("S_cond_{}_given_{}", name(a), name(b)), s[a | b] - s[b]);
            if i < j {
                quantities.insert(format!("I_{}_{}", name(a), name(b)), s[a] + s[b] - s[a | b]);
            }
        }
    }

    let mut verdicts = Vec::new();
    let mut push = |label: String, margin: f64| {
        verdicts.push(Verdict {
            name: label,
            margin,
            satisfied: margin >= -violation_tol,
        });
    };
    let cond = |x: usize, y: usize| s[x | y] - s[y];
    let mi = |x: usize, y: usize| s[x] + s[y] - s[x | y];

    for i in 0..n {
        for j in i + 1..n {
            let (a, b) = (1 << i, 1 << j);
            let tag = format!("[{},{}]", name(a), name(b));
            push(format!("araki_lieb{tag}"), s[a | b] - (s[a] - s[b]).abs());
            push(format!("subadditivity{tag}"), s[a] + s[b] - s[a | b]);
        }
    }
    if n >= 3 {
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if i == j || j == k || i == k {
                        continue;
                    }
                    let (a, b, c) = (1 << i, 1 << j, 1 << k);
                    let tag = format!("[{},{},{}]", name(a), name(b), name(c));
                    if i < j {
                        push(format!("strong_subadditivity{tag}"), s[a | c] + s[b | c] - s[a | b | c] - s[c]);
                        push(format!("weak_monotonicity{tag}"), s[a | c] + s[b | c] - s[a] - s[b]);
                        push(format!("conditional_sum{tag}"), cond(c, a) + cond(c, b));
                        push(
                            format!("conditional_subadditivity{tag}"),
                            cond(a, c) + cond(b, c) - cond(a | b, c),
                        );
                        push(format!("triangle{tag}"), s[a | c] + s[c | b] - s[a | b]);
                    }
                    if j < k {
                        push(format!("conditioning_reduces{tag}"), cond(a, b) - cond(a, b | c));
                        push(format!("mutual_monotonicity{tag}"), mi(a, b | c) - mi(a, b));
                        push(
                            format!("conditional_split{tag}"),
                            cond(a, b) + cond(a, c) - cond(a, b | c),
                        );
                    }
                }
            }
        }
    }
    if n == 4 {
        let perms = permutations4();
        for p in perms {
            let (a, b, c, d) = (1 << p[0], 1 << p[1], 1 << p[2], 1 << p[3]);
            if p[0] > p[1] {
                continue;
            }
            let tag = format!("[{},{},{},{}]", name(a), name(b), name(c), name(d));
            push(
                format!("quadripartite_conditional{tag}"),
                cond(a, c) + cond(b, d) - cond(a | b, c | d),
            );
        }
    }
    Ok(EntropyReport {
        unit,
        quantities,
        verdicts,
    })
}

fn permutations4() -> Vec<[usize; 4]> {
    let mut out = Vec::with_capacity(24);
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    if a != b && a != c && a != d && b != c && b != d && c != d {
                        out.push([a, b, c, d]);
                    }
                }
            }
        }
    }
    out
}

/// `ρ_β = exp(−βH) / Z` in the eigenbasis of `H`, shifted so the largest
/// Boltzmann factor is 1.
pub fn gibbs_state<T: Real>(h: &HermitianOperator<T>, beta: T) -> Result<DensityMatrix<T>> {
    if !beta.is_finite() {
        return Err(Error::NonFinite);
    }
    let e = h.eig()?;
    let shift = if beta >= T::zero() {
        e.values.first().copied()
    } else {
        e.values.last().copied()
    }
    .unwrap_or(T::zero());
    let weights: Vec<T> = e.values.iter().map(|&x| (-beta * (x - shift)).exp()).collect();
    let z: T = weights.iter().copied().sum();
    if !z.is_finite() || z <= T::zero() {
        return Err(Error::NonFinite);
    }
    let populations = Eigen {
        values: weights.iter().map(|&w| w / z).collect(),
        vectors: e.vectors,
    };
    DensityMatrix::new(populations.reconstruct())
}

/// `‖ρ_β − U(−iβ)/tr U(−iβ)‖_max` with `U(−iβ) = exp(−βH)` evaluated by the
/// scaling-and-squaring series rather than the eigenbasis.
pub fn imaginary_time_consistency<T: Real>(h: &HermitianOperator<T>, beta: T) -> Result<T> {
    let gibbs = gibbs_state(h, beta)?;
    let u = matrix_exp_series(h.matrix(), cr(-beta))?;
    let z = u.trace().re;
    if !z.is_finite() || z <= T::zero() {
        return Err(Error::NonFinite);
    }
    Ok(gibbs.matrix().max_diff(&u.scale_real(T::one() / z)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{random_density, random_hermitian, tensor, SeededRng, StateVector};
    use crate::scalar::C;

    fn bell() -> DensityMatrix<f64> {
        let s = 0.5f64.sqrt();
        let z = C::new(0.0, 0.0);
        DensityMatrix::from_pure(&StateVector::new(vec![C::new(s, 0.0), z, z, C::new(s, 0.0)]).unwrap())
    }

    fn diag(v: &[f64]) -> DensityMatrix<f64> {
        DensityMatrix::new(ComplexMatrix::from_real_diagonal(v)).unwrap()
    }

    #[test]
    fn entropy_examples() {
        let pure = DensityMatrix::from_pure(&StateVector::<f64>::basis(3, 1));
        assert!(von_neumann_entropy(&pure, EntropyUnit::Nats).unwrap().abs() < 1e-10);
        let mixed = DensityMatrix::<f64>::maximally_mixed(5);
        assert!((von_neumann_entropy(&mixed, EntropyUnit::Nats).unwrap() - 5f64.ln()).abs() < 1e-12);
        assert!((von_neumann_entropy(&diag(&[0.5, 0.5]), EntropyUnit::Bits).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn relative_entropy_examples() {
        let mut rng = SeededRng::new(50);
        let r = DensityMatrix::new(random_density::<f64>(3, &mut rng)).unwrap();
        assert!(relative_entropy(&r, &r, EntropyUnit::Nats, 1e-10).unwrap().abs() < 1e-10);
        let zero = diag(&[1.0, 0.0]);
        let one = diag(&[0.0, 1.0]);
        let half = diag(&[0.5, 0.5]);
        let v = relative_entropy(&zero, &half, EntropyUnit::Nats, 1e-10).unwrap();
        assert!((v - 2f64.ln()).abs() < 1e-12);
        assert_eq!(relative_entropy(&zero, &one, EntropyUnit::Nats, 1e-10).unwrap(), f64::INFINITY);
        assert!(relative_entropy(&zero, &DensityMatrix::maximally_mixed(3), EntropyUnit::Nats, 1e-10).is_err());
    }

    #[test]
    fn conditional_and_mutual() {
        let bits = EntropyUnit::Bits;
        let st = MultipartiteState::new(bell(), vec![2, 2]).unwrap();
        assert!((conditional_entropy(&st, "A", "B", bits).unwrap() + 1.0).abs() < 1e-10);
        assert!((mutual_information(&st, "A", "B", bits).unwrap() - 2.0).abs() < 1e-10);

        let cl = MultipartiteState::new(diag(&[0.5, 0.0, 0.0, 0.5]), vec![2, 2]).unwrap();
        assert!(conditional_entropy(&cl, "A", "B", bits).unwrap().abs() < 1e-12);
        assert!((mutual_information(&cl, "A", "B", bits).unwrap() - 1.0).abs() < 1e-12);

        let mut rng = SeededRng::new(51);
        let ra = random_density::<f64>(2, &mut rng);
        let rb = random_density::<f64>(3, &mut rng);
        let prod = MultipartiteState::new(DensityMatrix::new(tensor(&ra, &rb)).unwrap(), vec![2, 3]).unwrap();
        let sa = von_neumann_entropy(&DensityMatrix::new(ra).unwrap(), bits).unwrap();
        assert!((conditional_entropy(&prod, "A", "B", bits).unwrap() - sa).abs() < 1e-10);
        assert!(mutual_information(&prod, "A", "B", bits).unwrap().abs() < 1e-10);
        assert!(matches!(mutual_information(&prod, "A", "Z", bits), Err(Error::UnknownLabel(_))));
    }

    #[test]
    fn inequality_suite() {
        let st = MultipartiteState::new(bell(), vec![2, 2]).unwrap();
        let rep = check_inequalities(&st, EntropyUnit::Nats, 1e-9).unwrap();
        assert!(rep.all_satisfied());
        let al = rep.verdicts.iter().find(|v| v.name == "araki_lieb[A,B]").unwrap();
        assert!(al.margin.abs() < 1e-10);

        let mut ghz = vec![C::new(0.0, 0.0); 8];
        ghz[0] = C::new(0.5f64.sqrt(), 0.0);
        ghz[7] = ghz[0];
        let g = MultipartiteState::new(DensityMatrix::from_pure(&StateVector::new(ghz).unwrap()), vec![2, 2, 2]).unwrap();
        let rep = check_inequalities(&g, EntropyUnit::Bits, 1e-9).unwrap();
        assert!(rep.all_satisfied(), "{:?}", rep.violations().collect::<Vec<_>>());
        assert!((rep.quantities["S_AB"] - 1.0).abs() < 1e-10);

        let mut rng = SeededRng::new(52);
        let r4 = MultipartiteState::new(DensityMatrix::new(random_density::<f64>(16, &mut rng)).unwrap(), vec![2; 4]).unwrap();
        let rep = check_inequalities(&r4, EntropyUnit::Nats, 1e-9).unwrap();
        assert!(rep.all_satisfied());
        assert!(rep.verdicts.iter().any(|v| v.name.starts_with("quadripartite")));

        let r5 = MultipartiteState::new(DensityMatrix::<f64>::maximally_mixed(32), vec![2; 5]).unwrap();
        assert!(matches!(check_inequalities(&r5, EntropyUnit::Nats, 1e-9), Err(Error::UnsupportedPartition(_))));
    }

    #[test]
    fn gibbs_examples() {
        let h = HermitianOperator::new(ComplexMatrix::from_real_diagonal(&[0.0, 2.0])).unwrap();
        let g0 = gibbs_state(&h, 0.0).unwrap();
        assert!(g0.matrix().max_diff(&ComplexMatrix::from_real_diagonal(&[0.5, 0.5])) < 1e-15);
        let beta = 0.7;
        let z = 1.0 + (-beta * 2.0f64).exp();
        let g = gibbs_state(&h, beta).unwrap();
        assert!((g.matrix()[(0, 0)].re - 1.0 / z).abs() < 1e-15);
        assert!((g.matrix()[(1, 1)].re - (-beta * 2.0f64).exp() / z).abs() < 1e-15);
        let cold = gibbs_state(&h, 50.0).unwrap();
        assert!(cold.matrix()[(0, 0)].re > 1.0 - 1e-10);
        let hot = gibbs_state(&h, -50.0).unwrap();
        assert!(hot.matrix()[(1, 1)].re > 1.0 - 1e-10);
        assert!(matches!(gibbs_state(&h, f64::NAN), Err(Error::NonFinite)));
    }

    #[test]
    fn imaginary_time() {
        let mut rng = SeededRng::new(53);
        let h = HermitianOperator::new(random_hermitian::<f64>(4, &mut rng)).unwrap();
        assert!(imaginary_time_consistency(&h, 0.0).unwrap() < 1e-15);
        assert!(imaginary_time_consistency(&h, 1.0).unwrap() < 1e-10);
        let d = HermitianOperator::new(ComplexMatrix::from_real_diagonal(&[0.3, -1.0, 2.0])).unwrap();
        assert!(imaginary_time_consistency(&d, 1.3).unwrap() < 1e-14);
    }
}
