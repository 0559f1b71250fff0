use kpflow::ambient::{curvature_coupling, curvature_tensor, make_space, random_adapted_frame, Field, HSampler};
use kpflow::flow::comparison_lower_bound;
use kpflow::sampling::{pinched_spectrum, Stratum};
use kpflow::spectrum::{
    identity_2001_residual, is_pinched_eps, pinched, q_value, two_convexity_check, w_and_f, AlphaChoice,
    PinchingParams, ShapeSpectrum,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn spectrum(m: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = ShapeSpectrum> {
    m.prop_flat_map(|m| prop::collection::vec(-50.0f64..50.0, m))
        .prop_map(|l| ShapeSpectrum::new(l).unwrap())
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * (1.0 + a.abs().max(b.abs()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn scaling_exponents(s in spectrum(3..=20), k in 0.01f64..100.0) {
        let t = s.scaled(k).unwrap();
        prop_assert!(close(t.mean_curvature, k * s.mean_curvature, 1e-12));
        prop_assert!(close(t.norm_ao2, k.powi(2) * s.norm_ao2, 1e-10));
        prop_assert!(close(t.simons_z, k.powi(4) * s.simons_z, 1e-10));
    }

    #[test]
    fn norm_ao2_has_two_formulas(s in spectrum(3..=20)) {
        prop_assert!(s.norm_ao2 >= -1e-9);
        prop_assert!(close(s.norm_ao2, s.norm_ao2_pairwise(), 1e-10));
    }

    #[test]
    fn identity_2001_holds(s in spectrum(3..=20)) {
        prop_assert!(identity_2001_residual(&s) <= 1e-12 * (1.0 + s.norm_a2));
    }

    #[test]
    fn spectra_stay_sorted(s in spectrum(3..=20)) {
        prop_assert!(s.lambdas().windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn f_is_below_w_sigma_on_the_pinched_set(
        seed in any::<u64>(),
        i in 0u64..4,
        m in prop::sample::select(vec![7usize, 11, 15]),
        eps in 1e-3f64..0.5,
        eta in 1e-3f64..0.1,
        sigma in 0.0f64..0.5,
    ) {
        let params = PinchingParams::new(m, eps, eta, sigma, AlphaChoice::Midpoint).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = pinched_spectrum(m, eps, (0.0, 100.0), Stratum::for_index(i), &mut rng);
        prop_assume!(q_value(&s, eps) <= 0.0);
        let wf = w_and_f(&s, &params).unwrap();
        prop_assert!(wf.f_sigma_eta <= wf.w.powf(sigma) + 1e-10);
    }

    #[test]
    fn sampler_is_pinched(
        seed in any::<u64>(),
        i in 0u64..4,
        m in 3usize..20,
        eps in 1e-3f64..0.9,
        h in 1e-3f64..1e3,
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = pinched_spectrum(m, eps, (h, h), Stratum::for_index(i), &mut rng);
        prop_assert!(q_value(&s, eps) <= 1e-10 * (1.0 + s.norm_a2));
        prop_assert!(close(s.mean_curvature, h, 1e-12));
    }

    #[test]
    fn pinched_implies_two_convex_at_large_curvature(
        seed in any::<u64>(),
        i in 0u64..4,
        m in prop::sample::select(vec![7usize, 15]),
        eps in 1e-3f64..0.5,
    ) {
        let mf = m as f64;
        let h_min = (8.0 * (mf - 2.0) * (mf - 2.0 + eps) / eps).sqrt();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = pinched_spectrum(m, eps, (h_min, 5.0 * h_min), Stratum::for_index(i), &mut rng);
        prop_assume!(is_pinched_eps(&s, eps));
        let check = two_convexity_check(&s, eps).unwrap();
        prop_assert!(check.bound_holds, "margin {}", check.margin);
    }

    #[test]
    fn comparison_solution_is_increasing(h0 in 0.1f64..100.0, m in 3usize..40, frac in 0.0f64..0.999) {
        let blowup = m as f64 / (2.0 * h0 * h0);
        let a = comparison_lower_bound(h0, m, frac * blowup).unwrap();
        let b = comparison_lower_bound(h0, m, (frac + 0.0005) * blowup).unwrap();
        prop_assert!(a >= h0 && b > a);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn tangential_coupling_dominates_traceless_norm(seed in any::<u64>(), quaternionic in any::<bool>(), scale in 0.01f64..20.0) {
        let field = if quaternionic { Field::Quaternionic } else { Field::Complex };
        let space = make_space(field, 4).unwrap();
        let tensor = curvature_tensor(&space);
        let frame = random_adapted_frame(&space, seed, &HSampler::Gaussian { scale }).unwrap();
        let c = curvature_coupling(&tensor, &frame).unwrap();
        let m = space.m as f64;
        let tr = frame.h.trace();
        let ao2 = frame.h.norm_squared() - tr * tr / m;
        prop_assert!(c.tangential - m * ao2 >= -1e-9 * (1.0 + c.tangential.abs()));
    }
}

#[test]
fn pinched_examples() {
    assert!(pinched(&ShapeSpectrum::umbilic(7, 1.0).unwrap()));
    let mut w = vec![0.2; 6];
    w.push(-1.0);
    assert!(pinched(&ShapeSpectrum::new(w).unwrap()));
    let mut l = vec![0.0; 6];
    l.push(3.0);
    assert!(!pinched(&ShapeSpectrum::new(l).unwrap()));
}
