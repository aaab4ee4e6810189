use proptest::prelude::*;
use qformal::linalg::{eigh, random_density, random_state, tensor_vec, DensityMatrix, SeededRng, StateVector};
use qformal::nonlocal::{
    box_chsh, builtin_ks_set, chsh_operator, chsh_value, is_nonsignaling, ks_verify, local_membership,
    maximize_chsh, quantum_box, KsContextSet, MeasurementDirections,
};

const TSIRELSON: f64 = 2.0 * std::f64::consts::SQRT_2;

fn product_state(r: &mut SeededRng) -> DensityMatrix<f64> {
    let a = random_state::<f64>(2, r);
    let b = random_state::<f64>(2, r);
    StateVector::new(tensor_vec(&a, &b)).unwrap().density()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn operator_tsirelson(seed in any::<u64>()) {
        let d = MeasurementDirections::random(&mut SeededRng::new(seed));
        let m = chsh_operator(&d).unwrap();
        let top = eigh(m.matrix()).unwrap().values[3];
        prop_assert!(top <= TSIRELSON + 1e-9);
    }

    #[test]
    fn quantum_boxes_two_paths(seed in any::<u64>()) {
        let mut r = SeededRng::new(seed);
        let rho = DensityMatrix::new(random_density::<f64>(4, &mut r)).unwrap();
        let d = MeasurementDirections::random(&mut r);
        let bx = quantum_box(&rho, &d).unwrap();
        let (ok, _) = is_nonsignaling(&bx, 1e-10);
        prop_assert!(ok);
        prop_assert!((box_chsh(&bx) - chsh_value(&rho, &d).unwrap()).abs() < 1e-10);
        let m = local_membership(&bx, 1e-9).unwrap();
        if m.chsh_variants.iter().all(|v| v.value <= 2.0) {
            prop_assert!(m.local);
            prop_assert!(m.reconstruction_error.unwrap() < 1e-8);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn separable_states_respect_classical_bound(seed in any::<u64>()) {
        let mut r = SeededRng::new(seed);
        let rho = product_state(&mut r);
        let opt = maximize_chsh(&rho, seed, 8).unwrap();
        prop_assert!(opt.value <= 2.0 + 1e-6);
    }

    #[test]
    fn ks_monotone_under_added_contexts(seed in any::<u64>()) {
        let set = KsContextSet::from_file(&builtin_ks_set("cabello18").unwrap()).unwrap();
        let n = set.contexts().len();
        let mut r = SeededRng::new(seed);
        let mut order: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            order.swap(i, r.below(i + 1));
        }
        let mut seen_unsat = false;
        for k in 1..=n {
            let sat = ks_verify(&set.with_contexts(&order[..k])).satisfiable;
            prop_assert!(!(seen_unsat && sat));
            seen_unsat |= !sat;
        }
        prop_assert!(seen_unsat);
    }
}

#[test]
fn operator_tsirelson_sweep() {
    let mut r = SeededRng::new(5);
    let worst = (0..10_000)
        .map(|_| {
            let d = MeasurementDirections::random(&mut r);
            eigh(chsh_operator(&d).unwrap().matrix()).unwrap().values[3]
        })
        .fold(f64::NEG_INFINITY, f64::max);
    assert!(worst <= TSIRELSON + 1e-9);
    let canonical = eigh(chsh_operator(&MeasurementDirections::canonical()).unwrap().matrix()).unwrap().values[3];
    assert!((TSIRELSON - canonical).abs() < 1e-9);
}
