use monoword::combinatorics::{
    exact_distribution_enumeration, partitions, semistandard_tableaux_count, tableaux_distribution,
};
use monoword::exact::{int, to_f64};
use monoword::gessel::schur_polynomial;
use monoword::limits::{f0, F0Method};
use monoword::painleve::{integrate_sigma, painleve_determinant};
use monoword::series::toeplitz_det_series;
use monoword::toeplitz::{recursion_quantities, toeplitz_det};
use monoword::{LaguerreKernel, Parameters, SigmaOptions, SymbolKind, ToeplitzContext, Which};
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;

fn which() -> impl Strategy<Value = Which> {
    prop_oneof![Just(Which::Increasing), Just(Which::Decreasing)]
}

fn scaled_det(n: usize, k: u32, t: f64, w: Which) -> f64 {
    let ctx = ToeplitzContext::new(n, k, t, w).unwrap();
    (-(k as f64) * t).exp() * toeplitz_det(&ctx).unwrap().value
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn distribution_is_a_cdf(k in 1u32..=4, length in 0u32..=8, w in which()) {
        let table = exact_distribution_enumeration(k, length, w, 1 << 20).unwrap();
        let values = table.values();
        for v in values {
            prop_assert!(*v >= BigRational::zero() && *v <= BigRational::one());
        }
        for pair in values.windows(2) {
            prop_assert!(pair[0] <= pair[1]);
        }
        for n in length..length + 3 {
            prop_assert!(table.get(n).is_one());
        }
    }

    #[test]
    fn tableaux_route_is_exact(k in 1u32..=4, length in 0u32..=8, w in which()) {
        let e = exact_distribution_enumeration(k, length, w, 1 << 20).unwrap();
        let t = tableaux_distribution(k, length, w, 100).unwrap();
        prop_assert_eq!(e.values(), t.values());
    }

    #[test]
    fn schur_at_ones_counts_tableaux(weight in 0u32..=8, k in 1usize..=4, pick in 0usize..64) {
        let shapes = partitions(weight, k, weight);
        let lambda = &shapes[pick % shapes.len()];
        let ones = vec![int(1); k];
        let count = semistandard_tableaux_count(lambda, k as u32);
        prop_assert_eq!(schur_polynomial(lambda, &ones), BigRational::from_integer(count.into()));
    }

    #[test]
    fn float_determinant_matches_series(n in 1usize..=5, k in 1u32..=4, t in 0.0f64..1.0, w in which()) {
        let series = toeplitz_det_series(n, SymbolKind::for_statistic(w, k), 24);
        let want = series.eval(t);
        let ctx = ToeplitzContext::new(n, k, t, w).unwrap();
        let got = toeplitz_det(&ctx).unwrap().value;
        prop_assert!((got - want).abs() <= 1e-10 * want.abs(), "{} vs {}", got, want);
    }

    #[test]
    fn v_plus_is_a_determinant_ratio(n in 1usize..=7, k in 1u32..=5, t in 0.05f64..5.0) {
        let d = |m: usize| toeplitz_det(&ToeplitzContext::new(m, k, t, Which::Increasing).unwrap()).unwrap().value;
        let q = recursion_quantities(&ToeplitzContext::new(n + 1, k, t, Which::Increasing).unwrap()).unwrap();
        let ratio = d(n) / d(n + 1);
        prop_assert!((q.v_plus - ratio).abs() <= 1e-8 * ratio.abs());
    }

    #[test]
    fn laguerre_kernel_is_symmetric(k in 1u32..=5, n in 0u32..=5, x in 0.01f64..8.0, y in 0.01f64..8.0) {
        let kernel = LaguerreKernel::new(k, n).unwrap();
        let (a, b) = (kernel.kernel(x, y), kernel.kernel(y, x));
        prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
    }

    #[test]
    fn f0_is_nondecreasing(k in 2u32..=3, s in 0.0f64..3.0, ds in 0.01f64..0.5) {
        let a = f0(s, k, F0Method::Quadrature).unwrap().value;
        let b = f0(s + ds, k, F0Method::Quadrature).unwrap().value;
        prop_assert!(b >= a - 1e-12 && (0.0..=1.0 + 1e-9).contains(&b));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10))]

    #[test]
    fn painleve_reproduces_both_kinds(n in 1usize..=4, k in 1u32..=4, t in 0.2f64..3.0, w in which()) {
        let got = painleve_determinant(Parameters { n, k, which: w }, t, &SigmaOptions::default()).unwrap();
        let want = scaled_det(n, k, t, w);
        prop_assert!((got - want).abs() < 1e-5 * want.abs().max(1.0), "{} vs {}", got, want);
    }

    #[test]
    fn sigma_stays_positive(n in 1usize..=4, k in 1u32..=4) {
        let traj = integrate_sigma(Parameters { n, k, which: Which::Increasing }, 5.0, &SigmaOptions::default()).unwrap();
        prop_assert_eq!(traj.sign_violations, 0);
        prop_assert!(traj.states.iter().all(|s| s.sigma > 0.0));
        prop_assert!(traj.max_residual < 1e-5 && traj.max_first_integral < 1e-5);
    }
}

#[test]
fn determinant_series_start_at_one() {
    for w in [Which::Increasing, Which::Decreasing] {
        let s = toeplitz_det_series(3, SymbolKind::for_statistic(w, 2), 6);
        assert!(s.coeff(0).is_one());
        assert!(to_f64(s.coeff(1)) >= 0.0);
    }
}
