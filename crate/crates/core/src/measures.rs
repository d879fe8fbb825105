//! Normalized counting measures on orbits and their distance to Lebesgue measure.
//!
//! The distance is the Kolmogorov (sup-CDF) distance `sup_x |F(x) - x|`. For
//! atoms `p_1 < ... < p_m` the supremum is attained next to an atom, so it
//! equals `max_i max(i/m - p_i, p_i - (i-1)/m)`.

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::orbits::{left_right_counts, Orbit};
use crate::scalar::Real;

/// Exact rational in lowest terms. 128 bits hold every `m * n` with `m <= n < 2^63`.
pub type ExactRational = Ratio<i128>;

/// Running sup-CDF distance over atoms fed in increasing order.
#[derive(Debug, Clone, Copy)]
pub(crate) struct KsAccumulator {
    atoms: i128,
    den: i128,
    seen: i128,
    best: i128,
}

impl KsAccumulator {
    pub(crate) fn new(atoms: usize, den: u64) -> Self {
        KsAccumulator {
            atoms: atoms as i128,
            den: den as i128,
            seen: 0,
            best: 0,
        }
    }

    /// Feeds the next numerator; numerators must arrive in increasing order.
    #[inline]
    pub(crate) fn push(&mut self, r: u64) {
        let rm = r as i128 * self.atoms;
        let below = self.seen * self.den;
        self.seen += 1;
        let above = self.seen * self.den;
        self.best = self.best.max(above - rm).max(rm - below);
    }

    pub(crate) fn finish(&self) -> ExactRational {
        debug_assert_eq!(self.seen, self.atoms);
        Ratio::new(self.best, self.atoms * self.den)
    }
}

/// Exact sup-CDF distance between the orbit's counting measure and Lebesgue measure.
pub fn ks_distance_exact(o: &Orbit) -> ExactRational {
    ks_distance_atoms(o.denominator().get(), o.numerators())
}

/// Exact sup-CDF distance for equal-mass atoms at `r / den`, `numerators` strictly increasing.
pub fn ks_distance_atoms(den: u64, numerators: &[u64]) -> ExactRational {
    assert!(!numerators.is_empty(), "distance of an empty measure");
    let mut acc = KsAccumulator::new(numerators.len(), den);
    for &r in numerators {
        acc.push(r);
    }
    acc.finish()
}

/// Floating-point sup-CDF distance, evaluated directly in `T`.
pub fn ks_distance<T: Real>(o: &Orbit) -> T {
    let n = o.denominator().get();
    let m = T::from_usize_lossy(o.len());
    o.numerators()
        .iter()
        .enumerate()
        .fold(T::zero(), |best, (i, &r)| {
            let p = T::ratio(r, n);
            let before = T::from_usize_lossy(i) / m;
            let after = T::from_usize_lossy(i + 1) / m;
            best.max(after - p).max(p - before)
        })
}

pub fn exact_to_f64(x: &ExactRational) -> f64 {
    *x.numer() as f64 / *x.denom() as f64
}

/// One jump of the empirical CDF.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CdfPoint<T> {
    pub x: T,
    pub before: T,
    pub after: T,
}

/// Jump points of the CDF, one per atom.
pub fn cdf_points<T: Real>(o: &Orbit) -> Vec<CdfPoint<T>> {
    let n = o.denominator().get();
    let m = o.len();
    o.numerators()
        .iter()
        .enumerate()
        .map(|(i, &r)| CdfPoint {
            x: T::ratio(r, n),
            before: T::ratio(i as u64, m as u64),
            after: T::ratio(i as u64 + 1, m as u64),
        })
        .collect()
}

/// Density histogram over `[0, 1]` with equal-width bins.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram<T> {
    pub densities: Vec<T>,
}

impl<T: Real> Histogram<T> {
    pub fn bin_count(&self) -> usize {
        self.densities.len()
    }

    pub fn bin_width(&self) -> T {
        T::one() / T::from_usize_lossy(self.bin_count())
    }

    /// `[lo, hi)` of bin `i`.
    pub fn bin_edges(&self, i: usize) -> (T, T) {
        let b = self.bin_count() as u64;
        (T::ratio(i as u64, b), T::ratio(i as u64 + 1, b))
    }

    /// Total area; one for any histogram built from an orbit.
    pub fn area(&self) -> T {
        let w = self.bin_width();
        self.densities.iter().fold(T::zero(), |acc, &d| acc + d * w)
    }

    /// Index of the highest bin (first one on ties).
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (i, &d) in self.densities.iter().enumerate() {
            if d > self.densities[best] {
                best = i;
            }
        }
        best
    }
}

/// Bins are `[i/B, (i+1)/B)`, the last one closed. Bin indices are computed exactly.
pub fn histogram<T: Real>(o: &Orbit, bins: usize) -> Histogram<T> {
    assert!(bins >= 1, "histogram needs at least one bin");
    let n = o.denominator().get() as u128;
    let mut counts = vec![0u64; bins];
    for &r in o.numerators() {
        let idx = ((r as u128 * bins as u128) / n) as usize;
        counts[idx.min(bins - 1)] += 1;
    }
    let scale = T::from_usize_lossy(bins) / T::from_usize_lossy(o.len());
    Histogram {
        densities: counts
            .into_iter()
            .map(|c| T::from_u64_lossy(c) * scale)
            .collect(),
    }
}

/// Distance on the circle `[0, 1)` with `0 = 1`.
pub fn circle_distance<T: Real>(x: T, c: T) -> T {
    let d = (x - c).abs();
    let d = d - d.floor();
    d.min(T::one() - d)
}

/// Fraction of atoms within `eps` of `c` on the circle.
pub fn mass_near<T: Real>(o: &Orbit, c: T, eps: T) -> T {
    count_near(o, c, eps) / T::from_usize_lossy(o.len())
}

/// Number of atoms within `eps` of `c` on the circle.
pub fn count_near<T: Real>(o: &Orbit, c: T, eps: T) -> T {
    let n = o.denominator().get();
    let hits = o
        .numerators()
        .iter()
        .filter(|&&r| circle_distance(T::ratio(r, n), c) <= eps)
        .count();
    T::from_usize_lossy(hits)
}

/// `(left, right)`: atoms below 1/2 and above it.
pub fn left_heavy_count(o: &Orbit) -> (usize, usize) {
    left_right_counts(o)
}

/// Serde adapter writing an [`ExactRational`] as `"num/den"`.
pub mod exact_serde {
    use super::ExactRational;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &ExactRational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format!("{}/{}", x.numer(), x.denom()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<ExactRational, D::Error> {
        let s = String::deserialize(d)?;
        parse(&s).map_err(D::Error::custom)
    }

    /// Parses `"a/b"` or a bare integer.
    pub fn parse(s: &str) -> Result<ExactRational, String> {
        let (num, den) = match s.split_once('/') {
            Some((a, b)) => (a.trim(), b.trim()),
            None => (s.trim(), "1"),
        };
        let num: i128 = num.parse().map_err(|e| format!("bad numerator in {s:?}: {e}"))?;
        let den: i128 = den.parse().map_err(|e| format!("bad denominator in {s:?}: {e}"))?;
        if den <= 0 {
            return Err(format!("non-positive denominator in {s:?}"));
        }
        Ok(ExactRational::new(num, den))
    }
}
