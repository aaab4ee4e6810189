use proptest::prelude::*;
use qformal::linalg::{
    eigh, inner, matrix_exp, partial_trace_keep, random_density, random_hermitian, random_state, tensor,
    gaussian_matrix, ComplexMatrix, SeededRng,
};
use qformal::scalar::C;

fn rng(seed: u64) -> SeededRng {
    SeededRng::new(seed)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn eigen_reconstruction(seed in any::<u64>(), n in 2usize..=16) {
        let h = random_hermitian::<f64>(n, &mut rng(seed));
        let e = eigh(&h).unwrap();
        prop_assert!(e.reconstruct().max_diff(&h) < 1e-10);
        prop_assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn exponential_group_law(seed in any::<u64>(), n in 1usize..=6, s in -2.0f64..2.0, t in -2.0f64..2.0) {
        let h = random_hermitian::<f64>(n, &mut rng(seed));
        let a = matrix_exp(&h, C::new(0.0, -s)).unwrap();
        let b = matrix_exp(&h, C::new(0.0, -t)).unwrap();
        let ab = matrix_exp(&h, C::new(0.0, -(s + t))).unwrap();
        prop_assert!((&a * &b).max_diff(&ab) < 1e-10);
    }

    #[test]
    fn partial_trace_linear_and_trace_preserving(seed in any::<u64>(), da in 1usize..=3, db in 1usize..=3, lam in 0.0f64..1.0) {
        let mut r = rng(seed);
        let n = da * db;
        let x = random_density::<f64>(n, &mut r);
        let y = random_density::<f64>(n, &mut r);
        let mix = &x.scale_real(lam) + &y.scale_real(1.0 - lam);
        for keep in [[0usize], [1usize]] {
            let px = partial_trace_keep(&x, &[da, db], &keep).unwrap();
            let py = partial_trace_keep(&y, &[da, db], &keep).unwrap();
            let pm = partial_trace_keep(&mix, &[da, db], &keep).unwrap();
            let lin = &px.scale_real(lam) + &py.scale_real(1.0 - lam);
            prop_assert!(pm.max_diff(&lin) < 1e-13);
            prop_assert!((px.trace() - x.trace()).norm() < 1e-13);
        }
    }

    #[test]
    fn tensor_associative(seed in any::<u64>(), a in 1usize..=3, b in 1usize..=3, c in 1usize..=2) {
        let mut r = rng(seed);
        let x: ComplexMatrix<f64> = gaussian_matrix(a, a, &mut r);
        let y: ComplexMatrix<f64> = gaussian_matrix(b, b, &mut r);
        let z: ComplexMatrix<f64> = gaussian_matrix(c, c, &mut r);
        let left = tensor(&tensor(&x, &y), &z);
        let right = tensor(&x, &tensor(&y, &z));
        prop_assert!(left.max_diff(&right) <= 4.0 * f64::EPSILON * left.max_abs());
    }
}

#[test]
fn random_state_overlap_law() {
    for n in [8usize, 32, 128] {
        let pairs = 10_000;
        let mut r = SeededRng::with_stream(17, n as u64);
        let mean: f64 = (0..pairs)
            .map(|_| {
                let u = random_state::<f64>(n, &mut r);
                let v = random_state::<f64>(n, &mut r);
                inner(&u, &v).norm_sqr()
            })
            .sum::<f64>()
            / pairs as f64;
        let ratio = mean * n as f64;
        assert!((ratio - 1.0).abs() < 0.1, "N = {n}: ratio {ratio}");
    }
}
