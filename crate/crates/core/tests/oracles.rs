//! Implementation paths checked against independent brute-force computations.

use std::collections::{BTreeSet, HashSet};

use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::Ratio;
use orbitlab_core::measures::ks_distance_exact;
use orbitlab_core::modarith::{mul_mod_u64, subgroup_info, Modulus};
use orbitlab_core::orbits::{decompose, unit_level_cosets, Method, Orbit};
use orbitlab_core::outliers::{survey_denominator, OutlierCriterion};
use orbitlab_core::{is_symmetric, left_heavy_count, mirror};
use rand::{Rng, SeedableRng};

fn coprime_to_six(limit: u64) -> impl Iterator<Item = u64> {
    (5..=limit).filter(|n| n % 2 != 0 && n % 3 != 0)
}

/// `{2^i 3^j mod n}` enumerated over full exponent ranges.
fn brute_subgroup(n: u64) -> HashSet<u64> {
    let mut pow2 = vec![1u64];
    loop {
        let next = pow2.last().unwrap() * 2 % n;
        if next == 1 {
            break;
        }
        pow2.push(next);
    }
    let mut out = HashSet::new();
    let mut p3 = 1u64;
    // stop once 3^j falls into an already enumerated coset of <2>
    while out.insert(p3) {
        for &p in &pow2 {
            out.insert(p * p3 % n);
        }
        p3 = p3 * 3 % n;
    }
    out
}

/// sup |F(x) - x| evaluated at every atom and its left limit, F by counting.
fn brute_distance(den: u64, atoms: &[u64]) -> Ratio<i128> {
    let m = atoms.len() as i128;
    let mut best = Ratio::from_integer(0);
    for &a in atoms {
        let x = Ratio::new(a as i128, den as i128);
        let at = atoms.iter().filter(|&&b| b <= a).count() as i128;
        let below = atoms.iter().filter(|&&b| b < a).count() as i128;
        for f in [Ratio::new(at, m), Ratio::new(below, m)] {
            let d = if f > x { f - x } else { x - f };
            best = best.max(d);
        }
    }
    best
}

#[test]
fn mul_mod_matches_bigint() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    for _ in 0..100_000 {
        let n = rng.gen_range(2..=(1u64 << 62));
        let a = rng.gen_range(0..n);
        let b = if rng.gen_bool(0.5) { rng.gen_range(2..=3) } else { rng.gen_range(0..=n) };
        let want = (BigUint::from(a) * BigUint::from(b)) % BigUint::from(n);
        assert_eq!(BigUint::from(mul_mod_u64(a, b, n)), want, "{a} * {b} mod {n}");
    }
}

#[test]
fn mul_mod_wide_example() {
    let n = (1u64 << 41) - 31;
    let a = (1u64 << 40) + 1;
    let want = (BigUint::from(a) * 3u32) % BigUint::from(n);
    assert_eq!(BigUint::from(mul_mod_u64(a, 3, n)), want);
}

#[test]
fn subgroup_order_matches_brute_force() {
    for n in coprime_to_six(10_000) {
        let info = subgroup_info(Modulus::new(n).unwrap()).unwrap();
        assert_eq!(info.order as usize, brute_subgroup(n).len(), "n = {n}");
        assert_eq!(info.totient % info.order, 0);
        let phi = (1..n).filter(|k| k.gcd(&n) == 1).count() as u64;
        assert_eq!(info.totient, phi);
    }
}

#[test]
fn subgroup_order_of_coprime_products() {
    let ns: Vec<u64> = coprime_to_six(100).collect();
    for &a in &ns {
        for &b in &ns {
            if a >= b || a.gcd(&b) != 1 || a * b > 10_000 {
                continue;
            }
            let order = |n| subgroup_info(Modulus::new(n).unwrap()).unwrap().order;
            let (oa, ob, oab) = (order(a), order(b), order(a * b));
            assert_eq!(oab, brute_subgroup(a * b).len() as u64);
            assert_eq!(oab % oa.lcm(&ob), 0, "{a} * {b}");
            assert_eq!((oa * ob) % oab, 0, "{a} * {b}");
        }
    }
}

#[test]
fn exact_distance_matches_counting_oracle() {
    for n in coprime_to_six(400) {
        let d = decompose(Modulus::new(n).unwrap(), Method::Cosets).unwrap();
        for o in &d.orbits {
            assert_eq!(
                ks_distance_exact(o),
                brute_distance(n, o.numerators()),
                "orbit {o} of {n}"
            );
        }
    }
}

#[test]
fn bfs_and_cosets_agree_up_to_2000() {
    for n in coprime_to_six(2000) {
        let m = Modulus::new(n).unwrap();
        let bfs = decompose(m, Method::Bfs).unwrap();
        let cosets = decompose(m, Method::Cosets).unwrap();
        assert_eq!(bfs, cosets, "n = {n}");
    }
}

#[test]
fn survey_scan_matches_decomposition() {
    let crit = OutlierCriterion::new(Ratio::new(1, 5), 3).unwrap();
    for n in coprime_to_six(2000) {
        let m = Modulus::new(n).unwrap();
        let recs = survey_denominator(m, &crit).unwrap();
        let orbits: Vec<Orbit> = decompose(m, Method::Bfs)
            .unwrap()
            .orbits
            .into_iter()
            .filter(Orbit::is_unit_level)
            .collect();
        assert_eq!(recs.len(), orbits.len(), "n = {n}");
        for (r, o) in recs.iter().zip(&orbits) {
            let d = ks_distance_exact(o);
            let (left, right) = left_heavy_count(o);
            assert_eq!(r.rep, o.representative());
            assert_eq!(r.length, o.len());
            assert_eq!(r.distance, d);
            assert_eq!((r.left, r.right), (left, right));
            assert_eq!(r.symmetric, is_symmetric(o));
            assert_eq!(r.mirror_rep, mirror(o).representative());
            assert_eq!(r.outlier, d >= crit.threshold && o.len() >= crit.min_length);
        }
    }
}

#[test]
fn unit_cosets_follow_smallest_uncovered_rule() {
    for n in coprime_to_six(600) {
        let orbits = unit_level_cosets(Modulus::new(n).unwrap()).unwrap();
        let mut covered = BTreeSet::new();
        for o in &orbits {
            let smallest_free = (1..n)
                .find(|k| k.gcd(&n) == 1 && !covered.contains(k))
                .unwrap();
            assert_eq!(o.representative(), smallest_free);
            covered.extend(o.numerators().iter().copied());
        }
        assert_eq!(covered.len() as u64, (1..n).filter(|k| k.gcd(&n) == 1).count() as u64);
    }
}

#[test]
fn closure_check_uses_both_multipliers() {
    for n in coprime_to_six(300) {
        for o in decompose(Modulus::new(n).unwrap(), Method::Cosets).unwrap().orbits {
            for &r in o.numerators() {
                assert!(o.contains(2 * r % n) && o.contains(3 * r % n));
            }
            assert!(o.numerators().iter().all(|r| r.gcd(&n) == o.level_gcd()));
        }
    }
}
