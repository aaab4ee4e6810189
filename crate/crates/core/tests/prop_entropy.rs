use proptest::prelude::*;
use qformal::entropy::{relative_entropy, von_neumann_entropy, EntropyUnit, MultipartiteState};
use qformal::linalg::{random_density_rank, random_state, random_unitary, ComplexMatrix, DensityMatrix, SeededRng, StateVector};
use qformal::scalar::C;

const NATS: EntropyUnit = EntropyUnit::Nats;

fn density(n: usize, rng: &mut SeededRng) -> DensityMatrix<f64> {
    let rank = 1 + rng.below(n);
    DensityMatrix::new(random_density_rank::<f64>(n, rank, rng)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn entropy_range(seed in any::<u64>(), n in 1usize..=8) {
        let mut r = SeededRng::new(seed);
        let s = von_neumann_entropy(&density(n, &mut r), NATS).unwrap();
        prop_assert!(s >= -1e-10 && s <= (n as f64).ln() + 1e-10);
    }

    #[test]
    fn concavity(seed in any::<u64>(), n in 2usize..=6, lam in 0.0f64..=1.0) {
        let mut r = SeededRng::new(seed);
        let a = density(n, &mut r);
        let b = density(n, &mut r);
        let mix = DensityMatrix::new(&a.matrix().scale_real(lam) + &b.matrix().scale_real(1.0 - lam)).unwrap();
        let lhs = von_neumann_entropy(&mix, NATS).unwrap();
        let rhs = lam * von_neumann_entropy(&a, NATS).unwrap() + (1.0 - lam) * von_neumann_entropy(&b, NATS).unwrap();
        prop_assert!(lhs >= rhs - 1e-9);
    }

    #[test]
    fn unitary_invariance(seed in any::<u64>(), n in 1usize..=6) {
        let mut r = SeededRng::new(seed);
        let rho = density(n, &mut r);
        let u = random_unitary::<f64>(n, &mut r);
        let rotated = DensityMatrix::new((&(&u * rho.matrix()) * &u.adjoint()).hermitian_part()).unwrap();
        let d = von_neumann_entropy(&rho, NATS).unwrap() - von_neumann_entropy(&rotated, NATS).unwrap();
        prop_assert!(d.abs() < 1e-10);
    }

    #[test]
    fn pure_bipartite_halves_agree(seed in any::<u64>(), da in 1usize..=4, db in 1usize..=4) {
        let mut r = SeededRng::new(seed);
        let psi = StateVector::new(random_state::<f64>(da * db, &mut r)).unwrap();
        let st = MultipartiteState::new(psi.density(), vec![da, db]).unwrap();
        let sa = st.entropy_mask(st.mask("A").unwrap()).unwrap();
        let sb = st.entropy_mask(st.mask("B").unwrap()).unwrap();
        prop_assert!((sa - sb).abs() < 1e-10);
    }

    #[test]
    fn klein_inequality(seed in any::<u64>(), n in 1usize..=5) {
        let mut r = SeededRng::new(seed);
        let a = density(n, &mut r);
        let b = density(n, &mut r);
        let d = relative_entropy(&a, &b, NATS, 1e-10).unwrap();
        prop_assert!(d >= -1e-10);
    }

    #[test]
    fn classical_states_obey_monotonicity(seed in any::<u64>(), da in 1usize..=3, db in 1usize..=3) {
        let mut r = SeededRng::new(seed);
        let n = da * db;
        let w: Vec<f64> = (0..n).map(|_| r.uniform()).collect();
        let total: f64 = w.iter().sum();
        let diag: Vec<C<f64>> = w.iter().map(|x| C::new(x / total, 0.0)).collect();
        let st = MultipartiteState::new(DensityMatrix::new(ComplexMatrix::from_diagonal(&diag)).unwrap(), vec![da, db]).unwrap();
        let sab = st.entropy_mask(0b11).unwrap();
        let sa = st.entropy_mask(0b01).unwrap();
        let sb = st.entropy_mask(0b10).unwrap();
        prop_assert!(sa.max(sb) <= sab + 1e-10);
    }
}

#[test]
fn klein_sweep() {
    let mut r = SeededRng::new(2024);
    for _ in 0..10_000 {
        let n = 1 + r.below(4);
        let a = density(n, &mut r);
        let b = density(n, &mut r);
        assert!(relative_entropy(&a, &b, NATS, 1e-10).unwrap() >= -1e-10);
    }
}

#[test]
fn bell_state_breaks_classical_monotonicity() {
    let s = 0.5f64.sqrt();
    let z = C::new(0.0, 0.0);
    let bell = StateVector::new(vec![C::new(s, 0.0), z, z, C::new(s, 0.0)]).unwrap();
    let st = MultipartiteState::new(bell.density(), vec![2, 2]).unwrap();
    assert!(st.entropy_mask(0b01).unwrap() > st.entropy_mask(0b11).unwrap() + 0.5);
}
