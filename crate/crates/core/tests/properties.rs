//! Structural invariants of orbits, measures, surveys and bitmaps.

use num_integer::Integer;
use num_rational::Ratio;
use orbitlab_core::measures::{ks_distance_atoms, mass_near};
use orbitlab_core::modarith::{multiplicative_order, subgroup_info, Modulus};
use orbitlab_core::orbits::{decompose, Method, Orbit, Pushforward};
use orbitlab_core::outliers::{rarity_statistic, select_outliers, survey_denominator, OutlierCriterion};
use orbitlab_core::symbolic::{render, row_recurrence_check};
use orbitlab_core::{
    histogram, ks_distance, ks_distance_exact, mirror, orbit_of, pushforward, ReducedFraction,
};
use proptest::prelude::*;

fn coprime_to_six(limit: u64) -> impl Iterator<Item = u64> {
    (5..=limit).filter(|n| n % 2 != 0 && n % 3 != 0)
}

fn modulus() -> impl Strategy<Value = u64> {
    (1u64..700).prop_map(|k| 6 * k + if k % 2 == 0 { 1 } else { 5 })
}

/// `(k, n)` with `0 < k < n`, `n` coprime to 6.
fn point() -> impl Strategy<Value = (u64, u64)> {
    modulus().prop_flat_map(|n| (1..n, Just(n)))
}

#[test]
fn decompositions_up_to_2000() {
    for n in coprime_to_six(2000) {
        let m = Modulus::new(n).unwrap();
        let d = decompose(m, Method::Cosets).unwrap();
        let info = subgroup_info(m).unwrap();
        assert!(d.is_partition(), "n = {n}");
        assert_eq!(d.orbits.iter().map(Orbit::len).sum::<usize>() as u64, n - 1);
        let units: Vec<&Orbit> = d.unit_level().collect();
        assert_eq!(units.len() as u64, info.unit_orbit_count());
        for o in &d.orbits {
            assert!(o.satisfies_invariants(), "{o} of {n}");
            let m = mirror(o);
            assert_eq!(m.len(), o.len());
            assert_eq!(mirror(&m), *o);
            let dist = ks_distance_exact(o);
            assert_eq!(dist, ks_distance_exact(&m));
            assert!(dist > Ratio::from_integer(0));
            assert!(dist <= Ratio::new(o.len() as i128 - 1, o.len() as i128));
        }
        for o in units {
            assert_eq!(o.len() as u64, info.order);
        }
    }
}

#[test]
fn whole_level_is_nearly_uniform() {
    for n in coprime_to_six(2000) {
        let all: Vec<u64> = (1..n).collect();
        assert!(ks_distance_atoms(n, &all) <= Ratio::new(1, n as i128), "n = {n}");
    }
}

#[test]
fn surveyed_denominators_have_equal_orbit_lengths() {
    let crit = OutlierCriterion::default();
    for n in [15025u64, 86963, 609427] {
        let m = Modulus::new(n).unwrap();
        let order = subgroup_info(m).unwrap().order as usize;
        let recs = survey_denominator(m, &crit).unwrap();
        assert!(recs.iter().all(|r| r.length == order));
    }
}

#[test]
fn rarity_is_monotone() {
    let m = Modulus::new(86963).unwrap();
    let deltas = [0.01, 0.03, 0.05, 0.08, 0.1, 0.12, 0.15, 0.3];
    let values: Vec<f64> = deltas.iter().map(|&d| rarity_statistic(m, d).unwrap()).collect();
    assert!(values.windows(2).all(|w| w[0] >= w[1]), "{values:?}");
}

#[test]
fn selected_outliers_are_never_mirrored_pairs() {
    let loose = OutlierCriterion::new(Ratio::new(1, 20), 10).unwrap();
    for n in coprime_to_six(3000) {
        let recs = survey_denominator(Modulus::new(n).unwrap(), &loose).unwrap();
        let kept = select_outliers(&recs, &loose);
        for r in &kept {
            assert!(!kept.iter().any(|s| s.rep == r.mirror_rep && s.rep != r.rep));
        }
        let raw = recs.iter().filter(|r| r.outlier).count();
        let symmetric = recs.iter().filter(|r| r.outlier && r.symmetric).count();
        assert_eq!(kept.len(), (raw + symmetric) / 2, "n = {n}");
    }
}

#[test]
fn column_and_row_periods_divide_orders() {
    for n in coprime_to_six(60) {
        for k in (1..n).filter(|k| k.gcd(&n) == 1) {
            let b = render(ReducedFraction::new(k, n).unwrap(), 128, 128);
            let o2 = multiplicative_order(2, n).unwrap() as usize;
            let o3 = multiplicative_order(3, n).unwrap() as usize;
            assert_eq!(o2 % b.column_period(), 0, "{k}/{n}");
            assert_eq!(o3 % b.row_period(), 0, "{k}/{n}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn mirror_is_an_involution((k, n) in point()) {
        let o = orbit_of(k, n, false).unwrap();
        prop_assert_eq!(mirror(&mirror(&o)), o.clone());
        prop_assert!(mirror(&o).satisfies_invariants());
    }

    #[test]
    fn float_distance_tracks_exact((k, n) in point()) {
        let o = orbit_of(k, n, true).unwrap();
        let exact = ks_distance_exact(&o);
        let exact = *exact.numer() as f64 / *exact.denom() as f64;
        prop_assert!((ks_distance::<f64>(&o) - exact).abs() < 1e-12);
    }

    #[test]
    fn pushforward_composes((k, n) in point(), a in 1u64..40, b in 1u64..40) {
        let o = orbit_of(k, n, true).unwrap();
        let direct = pushforward(&o, a * b);
        let stepwise = pushforward(&o, a).then(b);
        prop_assert_eq!(&direct, &stepwise);
        if let Pushforward::Orbit(img) = direct {
            prop_assert!(img.len() <= o.len());
            prop_assert!(img.satisfies_invariants());
            if a.gcd(&n) == 1 && b.gcd(&n) == 1 {
                prop_assert_eq!(img.denominator(), o.denominator());
            }
        }
    }

    #[test]
    fn histogram_mass_is_one((k, n) in point(), bins in 1usize..200) {
        let o = orbit_of(k, n, true).unwrap();
        let coarse = histogram::<f64>(&o, bins);
        let fine = histogram::<f64>(&o, bins * 3);
        prop_assert!((coarse.area() - 1.0).abs() < 1e-12);
        prop_assert!((fine.area() - 1.0).abs() < 1e-12);
        // merging triples of fine bins reproduces the coarse bins
        for (i, c) in coarse.densities.iter().enumerate() {
            let merged: f64 = fine.densities[3 * i..3 * i + 3].iter().sum::<f64>() / 3.0;
            prop_assert!((merged - c).abs() < 1e-9);
        }
    }

    #[test]
    fn mass_near_is_monotone((k, n) in point(), c in 0.0f64..1.0, e1 in 0.0001f64..0.5, e2 in 0.0001f64..0.5) {
        let o = orbit_of(k, n, true).unwrap();
        let (lo, hi) = if e1 <= e2 { (e1, e2) } else { (e2, e1) };
        prop_assert!(mass_near(&o, c, lo) <= mass_near(&o, c, hi));
    }

    #[test]
    fn bitmap_shifts_are_the_two_maps((k, n) in point()) {
        let x = ReducedFraction::reducing(k, n).unwrap().unwrap();
        let den = x.denominator().get();
        let b = render(x, 64, 64);
        let right = render(ReducedFraction::reducing(2 * x.numerator() % den, den).unwrap().unwrap(), 64, 64);
        let down = render(ReducedFraction::reducing(3 * x.numerator() % den, den).unwrap().unwrap(), 64, 64);
        for i in 0..64 {
            for j in 0..63 {
                prop_assert_eq!(b.is_white(i, j + 1), right.is_white(i, j));
            }
        }
        for i in 0..63 {
            for j in 0..64 {
                prop_assert_eq!(b.is_white(i + 1, j), down.is_white(i, j));
            }
        }
        prop_assert!(row_recurrence_check(&b));
    }
}
