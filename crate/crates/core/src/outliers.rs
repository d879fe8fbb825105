//! Surveys of unit-level orbits across denominators, outlier selection, the
//! rarity statistic, and shadow-concentration predictions.

use std::ops::RangeInclusive;

use num_rational::Ratio;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::{count_near, exact_serde, exact_to_f64, ExactRational, KsAccumulator};
use crate::modarith::{mul_mod_u64, subgroup_elements, unit_mask, Modulus};
use crate::orbits::Orbit;
use crate::scalar::Real;

/// An orbit is an outlier when its distance is at least `threshold` and it has
/// at least `min_length` points.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutlierCriterion {
    #[serde(with = "exact_serde")]
    pub threshold: ExactRational,
    pub min_length: usize,
}

impl Default for OutlierCriterion {
    fn default() -> Self {
        OutlierCriterion {
            threshold: Ratio::new(1, 10),
            min_length: 100,
        }
    }
}

impl OutlierCriterion {
    pub fn new(threshold: ExactRational, min_length: usize) -> Result<Self> {
        let c = OutlierCriterion {
            threshold,
            min_length,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if self.threshold <= Ratio::from_integer(0) || self.threshold >= Ratio::from_integer(1) {
            return Err(Error::InvalidCriterion(format!(
                "threshold {} must lie in (0, 1)",
                self.threshold
            )));
        }
        if self.min_length == 0 {
            return Err(Error::InvalidCriterion("min_length must be >= 1".into()));
        }
        Ok(())
    }

    pub fn is_outlier(&self, distance: &ExactRational, length: usize) -> bool {
        *distance >= self.threshold && length >= self.min_length
    }
}

/// Summary of one unit-level orbit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurveyRecord {
    pub n: u64,
    /// Smallest numerator of the orbit.
    pub rep: u64,
    pub length: usize,
    #[serde(with = "exact_serde")]
    pub distance: ExactRational,
    pub distance_f64: f64,
    pub symmetric: bool,
    pub left: usize,
    pub right: usize,
    pub outlier: bool,
    /// Smallest numerator of the mirrored orbit; equals `rep` iff symmetric.
    pub mirror_rep: u64,
}

impl SurveyRecord {
    /// Long and strictly left-heavy: one representative of each long mirror pair.
    pub fn is_significant(&self, crit: &OutlierCriterion) -> bool {
        self.length >= crit.min_length && self.left > self.right
    }

    /// Whether this record is the kept member of its mirror pair.
    pub fn is_canonical(&self) -> bool {
        self.symmetric
            || self.left > self.right
            || (self.left == self.right && self.rep < self.mirror_rep)
    }
}

#[derive(Default, Clone, Copy)]
struct OrbitScan {
    first: u64,
    last: u64,
    left: usize,
}

/// Records for every unit-level orbit of `n`, ordered by representative.
///
/// One pass labels residues by coset of the subgroup generated by 2 and 3, a
/// second pass visits residues in increasing order so each orbit's distance is
/// accumulated without sorting.
pub fn survey_denominator(n: Modulus, crit: &OutlierCriterion) -> Result<Vec<SurveyRecord>> {
    let size = usize::try_from(n.get())
        .ok()
        .filter(|&s| s <= u32::MAX as usize)
        .ok_or_else(|| Error::InvalidArgument(format!("denominator {n} too large to survey")))?;
    let nn = n.get();
    let subgroup = subgroup_elements(n);
    let length = subgroup.len();
    let units = unit_mask(nn)?;

    const UNSET: u32 = u32::MAX;
    let mut labels = vec![UNSET; size];
    let mut orbit_count = 0u32;
    for k in 1..size {
        if !units[k] || labels[k] != UNSET {
            continue;
        }
        for &h in &subgroup {
            labels[mul_mod_u64(k as u64, h, nn) as usize] = orbit_count;
        }
        orbit_count += 1;
    }

    let mut scans = vec![OrbitScan::default(); orbit_count as usize];
    let mut accs = vec![KsAccumulator::new(length, nn); orbit_count as usize];
    for r in 1..size {
        let label = labels[r];
        if label == UNSET {
            continue;
        }
        let s = &mut scans[label as usize];
        if s.first == 0 {
            s.first = r as u64;
        }
        s.last = r as u64;
        if 2 * r < size {
            s.left += 1;
        }
        accs[label as usize].push(r as u64);
    }

    Ok(scans
        .iter()
        .zip(&accs)
        .map(|(s, acc)| {
            let distance = acc.finish();
            let mirror_rep = nn - s.last;
            SurveyRecord {
                n: nn,
                rep: s.first,
                length,
                distance_f64: exact_to_f64(&distance),
                outlier: crit.is_outlier(&distance, length),
                distance,
                symmetric: mirror_rep == s.first,
                left: s.left,
                right: length - s.left,
                mirror_rep,
            }
        })
        .collect())
}

/// Records of a survey plus the denominators that failed.
#[derive(Debug, Clone, Default)]
pub struct Survey {
    pub records: Vec<SurveyRecord>,
    pub failures: Vec<(u64, Error)>,
}

/// Denominators in `range` coprime to 6.
pub fn survey_denominators(range: RangeInclusive<u64>) -> impl Iterator<Item = u64> {
    range.filter(|n| n % 2 != 0 && n % 3 != 0)
}

/// Surveys each denominator in parallel; results come back in input order.
pub fn survey_many(ns: &[u64], crit: &OutlierCriterion) -> Vec<(u64, Result<Vec<SurveyRecord>>)> {
    ns.par_iter()
        .map(|&n| (n, Modulus::new(n).and_then(|m| survey_denominator(m, crit))))
        .collect()
}

/// Unit-level records for every `n` in `range` coprime to 6, sorted by `(n, rep)`.
pub fn survey(range: RangeInclusive<u64>, crit: &OutlierCriterion) -> Result<Survey> {
    crit.validate()?;
    if *range.start() < 5 {
        return Err(Error::InvalidArgument(format!(
            "survey range must start at 5 or above, got {}",
            range.start()
        )));
    }
    let ns: Vec<u64> = survey_denominators(range).collect();
    let mut out = Survey::default();
    for (n, res) in survey_many(&ns, crit) {
        match res {
            Ok(recs) => out.records.extend(recs),
            Err(e) => out.failures.push((n, e)),
        }
    }
    Ok(out)
}

/// Outliers under `crit`, keeping one orbit per mirror pair.
pub fn select_outliers(records: &[SurveyRecord], crit: &OutlierCriterion) -> Vec<SurveyRecord> {
    records
        .iter()
        .filter(|r| crit.is_outlier(&r.distance, r.length) && r.is_canonical())
        .cloned()
        .collect()
}

/// Fraction of `{1/n, ..., (n-1)/n}` covered by unit-level orbits at distance at least `delta`.
pub fn rarity_statistic<T: Real>(n: Modulus, delta: T) -> Result<T> {
    if !(delta > T::zero() && delta < T::one()) {
        return Err(Error::InvalidArgument(format!(
            "delta must lie in (0, 1), got {delta:?}"
        )));
    }
    let records = survey_denominator(n, &OutlierCriterion::default())?;
    let far: usize = records
        .iter()
        .filter(|r| T::from_f64(r.distance_f64).unwrap() >= delta)
        .map(|r| r.length)
        .sum();
    Ok(T::from_usize_lossy(far) / T::from_u64_lossy(n.get() - 1))
}

/// Equal-width histogram of distances over `[0, upper]`; larger values land in the last bin.
pub fn distance_histogram<'a>(
    records: impl IntoIterator<Item = &'a SurveyRecord>,
    bins: usize,
    upper: f64,
) -> Vec<u64> {
    assert!(bins >= 1 && upper > 0.0);
    let mut counts = vec![0; bins];
    for r in records {
        let idx = (r.distance_f64 / upper * bins as f64).floor() as usize;
        counts[idx.min(bins - 1)] += 1;
    }
    counts
}

/// Predicted shadow concentrations for `mass_near_zero` points classified as near 0.
///
/// With a near-zero point spawning a white triangle of `a` tripling steps by
/// `b ~ a ln3/ln2` doubling steps, the triangle area is `M = a^2 ln3 / (2 ln2)`.
/// Its left margin (`sqrt(M 2ln2/ln3)` points, i.e. `a`) sits near 1/2 and its top
/// margin (`b` points, alternating) near 1/3 and 2/3. The source labels the two
/// margins inconsistently; these formulas are the consistent reading.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShadowPrediction<T> {
    pub mass_near_zero: T,
    pub near_half: T,
    pub near_third_each: T,
}

pub fn shadow_estimate<T: Real>(mass_near_zero: T) -> ShadowPrediction<T> {
    let ln2 = T::from_f64(std::f64::consts::LN_2).unwrap();
    let ln3 = T::from_f64(3f64.ln()).unwrap();
    let two = T::one() + T::one();
    ShadowPrediction {
        mass_near_zero,
        near_half: (mass_near_zero * two * ln2 / ln3).sqrt(),
        near_third_each: (mass_near_zero * two * ln3 / ln2).sqrt() / two,
    }
}

/// Triangle area `a^2 ln3 / (2 ln2)` for a tripling extent `a`.
pub fn triangle_mass<T: Real>(tripling_steps: T) -> T {
    let ln2 = T::from_f64(std::f64::consts::LN_2).unwrap();
    let ln3 = T::from_f64(3f64.ln()).unwrap();
    tripling_steps * tripling_steps * ln3 / (ln2 + ln2)
}

/// Atom count within `eps` of one center.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CenterCount<T> {
    pub label: String,
    pub center: T,
    pub count: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShadowReport<T> {
    pub eps: T,
    pub length: usize,
    /// Expected count in a `2 eps` window under uniform distribution.
    pub uniform_expectation: T,
    pub near_zero: T,
    pub centers: Vec<CenterCount<T>>,
    pub prediction: ShadowPrediction<T>,
}

impl<T: Real> ShadowReport<T> {
    pub fn count_at(&self, label: &str) -> Option<T> {
        self.centers
            .iter()
            .find(|c| c.label == label)
            .map(|c| c.count)
    }
}

pub const SHADOW_CENTERS: [(u64, u64); 5] = [(1, 2), (1, 3), (2, 3), (1, 4), (3, 4)];

/// Measured counts near 0, 1/2, 1/3, 2/3, 1/4, 3/4 next to the predictions.
pub fn shadow_report<T: Real>(o: &Orbit, eps: T) -> Result<ShadowReport<T>> {
    let near_zero = count_near(o, T::zero(), eps);
    if near_zero == T::zero() {
        return Err(Error::NoNearZeroMass);
    }
    let centers = SHADOW_CENTERS
        .iter()
        .map(|&(p, q)| {
            let center = T::ratio(p, q);
            CenterCount {
                label: format!("{p}/{q}"),
                center,
                count: count_near(o, center, eps),
            }
        })
        .collect();
    let m = T::from_usize_lossy(o.len());
    Ok(ShadowReport {
        eps,
        length: o.len(),
        uniform_expectation: m * (eps + eps),
        near_zero,
        centers,
        prediction: shadow_estimate(near_zero),
    })
}

/// Atom counts within `eps` of each `k/q`, `k = 1..q-1`.
pub fn counts_near_multiples<T: Real>(o: &Orbit, q: u64, eps: T) -> Vec<T> {
    (1..q).map(|k| count_near(o, T::ratio(k, q), eps)).collect()
}
