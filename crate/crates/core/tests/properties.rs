use std::collections::BTreeSet;

use convexlab_core::energy::oracle::{brute_force_energy, brute_force_t};
use convexlab_core::energy::{
    cross_energy_exact, difference_rep, energy_exact, energy_real, sum_rep, t_energy,
};
use convexlab_core::generators::{from_second_differences, random_profile, stream_rng, Profile};
use convexlab_core::spectral::{dyadic_slices, heaviest_slice, popularity_set};
use convexlab_core::verify::fit_exponent;
use convexlab_core::OrderedIntSet;
use proptest::prelude::*;

fn small_set(max_len: usize) -> impl Strategy<Value = OrderedIntSet> {
    prop::collection::btree_set(-60i64..60, 1..=max_len)
        .prop_map(|s: BTreeSet<i64>| OrderedIntSet::new(s.into_iter().collect::<Vec<_>>()).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn convolution_energies_match_enumeration(a in small_set(10), b in small_set(10)) {
        let diff = difference_rep(&a, &a).unwrap();
        prop_assert_eq!(energy_exact(&diff, 2).unwrap(), brute_force_energy(&a, &a, 2).unwrap());
        prop_assert_eq!(energy_exact(&diff, 3).unwrap(), brute_force_energy(&a, &a, 3).unwrap());
        prop_assert_eq!(
            cross_energy_exact(&a, &b, 2, u64::MAX).unwrap(),
            brute_force_energy(&a, &b, 2).unwrap()
        );
    }

    #[test]
    fn rep_tables_conserve_mass(a in small_set(12), b in small_set(12)) {
        let d = difference_rep(&a, &b).unwrap();
        let s = sum_rep(&a, &b).unwrap();
        let expected = (a.len() * b.len()) as u128;
        prop_assert_eq!(d.total_mass(), expected);
        prop_assert_eq!(s.total_mass(), expected);
        let own = difference_rep(&a, &a).unwrap();
        prop_assert!(own.iter().all(|(x, c)| own.get(-x) == c));
        prop_assert_eq!(own.get(0), a.len() as u64);
    }

    #[test]
    fn energy_equals_t2_and_is_bounded(a in small_set(14)) {
        let n = a.len() as u128;
        let e = energy_exact(&difference_rep(&a, &a).unwrap(), 2).unwrap();
        prop_assert_eq!(e, t_energy(&a, 2).unwrap());
        prop_assert!(e >= 2 * n * n - n && e <= n * n * n);
        prop_assert!(sum_rep(&a, &a).unwrap().len() >= 2 * a.len() - 1);
    }

    #[test]
    fn floating_path_agrees(a in small_set(14)) {
        let diff = difference_rep(&a, &a).unwrap();
        for k in [2u32, 3] {
            let exact = energy_exact(&diff, k).unwrap() as f64;
            prop_assert!((energy_real(&diff, k as f64) - exact).abs() <= 1e-12 * exact);
        }
    }

    #[test]
    fn energies_survive_shift_and_dilation(a in small_set(10), c in -1000i64..1000, d in 1i64..20) {
        let e = |s: &OrderedIntSet| {
            let r = difference_rep(s, s).unwrap();
            (energy_exact(&r, 2).unwrap(), energy_exact(&r, 3).unwrap(), sum_rep(s, s).unwrap().len(), r.len())
        };
        prop_assert_eq!(e(&a), e(&a.translate(c).unwrap()));
        prop_assert_eq!(e(&a), e(&a.dilate(d).unwrap()));
    }

    #[test]
    fn dyadic_bands_partition_the_support(a in small_set(16)) {
        let rep = difference_rep(&a, &a).unwrap();
        let bands = dyadic_slices(&rep);
        let e = energy_exact(&rep, 2).unwrap();
        prop_assert_eq!(bands.iter().map(|b| b.mass).sum::<u128>(), e);
        prop_assert_eq!(bands.iter().map(|b| b.len()).sum::<usize>(), rep.len());
        prop_assert!(bands.iter().all(|b| b.is_consistent_with(&rep)));

        // Pigeonhole: some band carries a 1/(number of levels) share.
        let levels = 64 - rep.max_count().leading_zeros() as u128;
        let h = heaviest_slice(&rep, 1.0, rep.max_count() as f64).unwrap();
        prop_assert!(h.mass * levels >= e);
    }

    #[test]
    fn popularity_bounds(a in small_set(16), tau in 1u64..8) {
        let rep = difference_rep(&a, &a).unwrap();
        let s = popularity_set(&rep, tau).unwrap();
        let t = tau as u128;
        prop_assert!(t * t * s.len() as u128 <= energy_exact(&rep, 2).unwrap());
        prop_assert!(t * t * t * s.len() as u128 <= energy_exact(&rep, 3).unwrap());
    }

    #[test]
    fn second_differences_round_trip(
        g in prop::collection::btree_set(1i64..50, 1..8),
        a0 in -100i64..100,
        d0 in 1i64..10,
    ) {
        let g: Vec<i64> = g.into_iter().rev().collect();
        let set = from_second_differences(&g, a0, d0).unwrap();
        let back: Vec<i64> = set.derivative(2).unwrap().into_iter().map(|v| v as i64).collect();
        prop_assert_eq!(back, g);
        prop_assert_eq!(set.min(), a0);
    }

    #[test]
    fn random_profiles_stay_in_class(seed in any::<u64>(), n in 5usize..40) {
        for profile in [Profile::Convex, Profile::NegativeThird, Profile::NegativeThirdNonpositiveFourth] {
            let mut rng = stream_rng(seed, 0);
            let set = random_profile(profile, n, 0, None, 8, &mut rng).unwrap();
            let sig = set.cached_signature();
            let ok = match profile {
                Profile::Convex => sig.is_convex(),
                Profile::NegativeThird => sig.is_convex_negative_third(),
                Profile::NegativeThirdNonpositiveFourth => sig.is_convex_negative_third_nonpositive_fourth(),
            };
            prop_assert!(ok);
            prop_assert_eq!(set.len(), n);
        }
    }

    #[test]
    fn fits_are_permutation_invariant_and_scale_consistent(
        values in prop::collection::vec(0.1f64..1e6, 3..8),
        c in 0.01f64..100.0,
        rotate in 0usize..8,
    ) {
        let points: Vec<(usize, f64)> = values.iter().enumerate().map(|(i, &v)| (8 << i, v)).collect();
        let base = fit_exponent(&points).unwrap();
        let mut rotated = points.clone();
        let len = rotated.len();
        rotated.rotate_left(rotate % len);
        prop_assert_eq!(&fit_exponent(&rotated).unwrap(), &base);

        let scaled: Vec<_> = points.iter().map(|&(n, v)| (n, c * v)).collect();
        let s = fit_exponent(&scaled).unwrap();
        prop_assert!((s.slope - base.slope).abs() < 1e-9);
        prop_assert!((s.intercept - base.intercept - c.ln()).abs() < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(30))]

    #[test]
    fn t4_matches_enumeration(a in small_set(6)) {
        prop_assert_eq!(t_energy(&a, 4).unwrap(), brute_force_t(&a, 4).unwrap());
    }
}

#[test]
fn t4_of_two_points() {
    let a = OrderedIntSet::new(vec![0, 1]).unwrap();
    assert_eq!(t_energy(&a, 4).unwrap(), 70);
    assert_eq!(brute_force_t(&a, 4).unwrap(), 70);
}
