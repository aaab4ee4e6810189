use proptest::prelude::*;
use qformal::decoherence::{measure_evolution, overlap_scaling_experiment, reduced_system_state, Conditional, MeasurementModel};
use qformal::linalg::{gue, norm, random_state, HermitianOperator, SeededRng, StateVector};
use qformal::scalar::C;

fn model(n: usize, t: f64, r: &mut SeededRng) -> MeasurementModel {
    let hp = HermitianOperator::new(gue::<f64>(n, r)).unwrap();
    let hm = HermitianOperator::new(gue::<f64>(n, r)).unwrap();
    let i = StateVector::new(random_state::<f64>(n, r)).unwrap();
    MeasurementModel::new(hp, hm, i, t).unwrap()
}

fn amplitudes(r: &mut SeededRng) -> (C<f64>, C<f64>) {
    let v = random_state::<f64>(2, r);
    (v[0], v[1])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn unitarity_and_overlap_identity(seed in any::<u64>(), n in 2usize..=24, t in 0.0f64..8.0) {
        let mut r = SeededRng::new(seed);
        let m = model(n, t, &mut r);
        let (a, b) = amplitudes(&mut r);
        let out = measure_evolution(&m, a, b).unwrap();
        prop_assert!((norm(out.joint.amplitudes()) - 1.0).abs() < 1e-10);
        let rho = reduced_system_state(&out.joint).unwrap();
        let off = rho.matrix()[(0, 1)].norm();
        prop_assert!((off - a.norm() * b.norm() * out.overlap.norm()).abs() < 1e-12);
        prop_assert!((rho.matrix()[(0, 0)].re - a.norm_sqr()).abs() < 1e-12);
    }

    #[test]
    fn short_time_continuity(seed in any::<u64>(), n in 2usize..=12) {
        let mut r = SeededRng::new(seed);
        let base = model(n, 1.0, &mut r);
        let (a, b) = amplitudes(&mut r);
        // |1 - <F+|F->| <= t ||H+ - H-|| for an initial unit vector.
        let diff = base.h_plus().matrix() - base.h_minus().matrix();
        let c = qformal::linalg::eigh(&(&diff.adjoint() * &diff)).unwrap().values.last().unwrap().sqrt();
        for t in [1e-1, 1e-2, 1e-3, 1e-4] {
            let out = measure_evolution(&base.with_time(t).unwrap(), a, b).unwrap();
            prop_assert!((C::new(1.0, 0.0) - out.overlap).norm() <= c * t + 1e-12);
        }
    }
}

#[test]
fn overlap_decreases_with_dimension() {
    let rows = overlap_scaling_experiment(&[8, 32, 128], 1000, 10.0, 42, Conditional::Independent).unwrap();
    for w in rows.windows(2) {
        let slack = 3.0 * (w[0].std_error.powi(2) + w[1].std_error.powi(2)).sqrt();
        assert!(w[1].mean_overlap_sq < w[0].mean_overlap_sq - slack, "{w:?}");
    }
}
