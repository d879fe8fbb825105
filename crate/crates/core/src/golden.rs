//! Published reference values, bundled as named checks.

use num_rational::Ratio;

use crate::measures::{ks_distance_exact, left_heavy_count, ExactRational};
use crate::modarith::{subgroup_info, Modulus};
use crate::orbits::{decompose, is_symmetric, mirror, orbit_of, pushforward, Method, Orbit};
use crate::outliers::{survey_denominator, OutlierCriterion};
use crate::symbolic::triangle_dims;
use crate::ReducedFraction;

/// Denominators beyond this are skipped by quick runs.
pub const QUICK_LIMIT: u64 = 100_000;

pub type CheckResult = std::result::Result<(), String>;

pub struct Check {
    pub name: String,
    /// Largest denominator the check touches.
    pub max_n: u64,
    run: Box<dyn Fn() -> CheckResult + Send + Sync>,
}

impl Check {
    pub fn new(
        name: impl Into<String>,
        max_n: u64,
        run: impl Fn() -> CheckResult + Send + Sync + 'static,
    ) -> Self {
        Check {
            name: name.into(),
            max_n,
            run: Box::new(run),
        }
    }

    pub fn run(&self) -> CheckResult {
        (self.run)()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub name: String,
    pub skipped: bool,
    pub result: CheckResult,
}

impl Outcome {
    pub fn failed(&self) -> bool {
        !self.skipped && self.result.is_err()
    }
}

fn orbit(k: u64, n: u64) -> Result<Orbit, String> {
    orbit_of(k, n, true).map_err(|e| e.to_string())
}

fn modulus(n: u64) -> Result<Modulus, String> {
    Modulus::new(n).map_err(|e| e.to_string())
}

fn expect_eq<T: PartialEq + std::fmt::Debug>(what: &str, got: T, want: T) -> CheckResult {
    if got == want {
        Ok(())
    } else {
        Err(format!("{what}: got {got:?}, expected {want:?}"))
    }
}

pub const O1_23: [u64; 11] = [1, 2, 3, 4, 6, 8, 9, 12, 13, 16, 18];
pub const O2_23: [u64; 11] = [5, 7, 10, 11, 14, 15, 17, 19, 20, 21, 22];

/// `(k, n, length)` for the outlier orbits shown with their point counts.
pub const ORBIT_LENGTHS: [(u64, u64, usize); 11] = [
    (1, 15025, 300),
    (23, 21667, 460),
    (1, 22015, 576),
    (19, 33215, 432),
    (1, 50557, 648),
    (1, 86963, 396),
    (1, 108335, 460),
    (1, 119795, 576),
    (1, 434815, 792),
    (1, 580615, 624),
    (31, 609427, 1080),
];

/// `(n, count)` of long, strictly left-heavy unit-level orbits.
pub const SIGNIFICANT_COUNTS: [(u64, usize); 12] = [
    (15025, 18),
    (21667, 23),
    (22015, 12),
    (33215, 23),
    (50557, 36),
    (86963, 96),
    (108335, 89),
    (116123, 76),
    (119795, 71),
    (434815, 191),
    (580615, 306),
    (609427, 212),
];

pub fn check_distance(k: u64, n: u64, expected: ExactRational) -> CheckResult {
    let o = orbit(k, n)?;
    expect_eq(
        &format!("distance of {k}/{n}"),
        ks_distance_exact(&o),
        expected,
    )
}

pub fn check_length(k: u64, n: u64, expected: usize) -> CheckResult {
    expect_eq(&format!("length of {k}/{n}"), orbit(k, n)?.len(), expected)
}

pub fn check_significant_count(n: u64, expected: usize) -> CheckResult {
    let crit = OutlierCriterion::default();
    let recs = survey_denominator(modulus(n)?, &crit).map_err(|e| e.to_string())?;
    let count = recs.iter().filter(|r| r.is_significant(&crit)).count();
    expect_eq(&format!("significant orbits of {n}"), count, expected)
}

fn check_decompositions() -> CheckResult {
    for method in [Method::Bfs, Method::Cosets] {
        let d23 = decompose(modulus(23)?, method).map_err(|e| e.to_string())?;
        let lists: Vec<&[u64]> = d23.orbits.iter().map(|o| o.numerators()).collect();
        expect_eq("orbits of 23", lists, vec![&O1_23[..], &O2_23[..]])?;
        let d25 = decompose(modulus(25)?, method).map_err(|e| e.to_string())?;
        let mut sizes: Vec<usize> = d25.orbits.iter().map(Orbit::len).collect();
        sizes.sort_unstable();
        expect_eq("orbit sizes of 25", sizes, vec![4, 20])?;
        let d5 = decompose(modulus(5)?, method).map_err(|e| e.to_string())?;
        let lists: Vec<&[u64]> = d5.orbits.iter().map(|o| o.numerators()).collect();
        expect_eq("orbits of 5", lists, vec![&[1u64, 2, 3, 4][..]])?;
    }
    Ok(())
}

fn check_outliers_609427() -> CheckResult {
    let n = 609427;
    expect_eq(
        "subgroup order of 609427",
        subgroup_info(modulus(n)?).map_err(|e| e.to_string())?.order,
        1080,
    )?;
    let o = orbit(31, n)?;
    if ks_distance_exact(&o) < Ratio::new(1, 10) {
        return Err("31/609427 is not at distance >= 1/10".into());
    }
    let (left, right) = left_heavy_count(&o);
    if left <= right {
        return Err(format!("31/609427 is not left-heavy ({left} vs {right})"));
    }
    let recs = survey_denominator(modulus(n)?, &OutlierCriterion::default())
        .map_err(|e| e.to_string())?;
    let outs: Vec<_> = recs.iter().filter(|r| r.outlier).collect();
    expect_eq("outlier count of 609427", outs.len(), 2)?;
    expect_eq("outlier lengths", (outs[0].length, outs[1].length), (1080, 1080))?;
    expect_eq("outliers mirror each other", outs[0].mirror_rep, outs[1].rep)?;
    expect_eq("31/609427 mirror", mirror(&o), orbit(outs[1].rep, n)?)
}

/// The image is the mirror partner of the orbit of 1/86963, not that orbit itself;
/// the mirror partner of 271 (251) maps onto 1/86963 exactly.
fn check_pushforward_5() -> CheckResult {
    let target = orbit(1, 86963)?;
    let img = pushforward(&orbit(271, 86963)?, 5);
    expect_eq("5 x orbit of 271/86963", img.orbit(), Some(&mirror(&target)))?;
    let img = pushforward(&orbit(251, 86963)?, 5);
    expect_eq("5 x orbit of 251/86963", img.orbit(), Some(&target))
}

fn check_pushforward_7() -> CheckResult {
    let img = pushforward(&orbit(289, 580615)?, 7);
    let target = orbit(1, 82945)?;
    expect_eq("7 x orbit of 289/580615", img.orbit(), Some(&target))?;
    if !is_symmetric(&target) {
        return Err("orbit of 1/82945 is not symmetric".into());
    }
    if ks_distance_exact(&target) >= Ratio::new(1, 10) {
        return Err("orbit of 1/82945 is an outlier".into());
    }
    Ok(())
}

fn check_closest_609427() -> CheckResult {
    let recs = survey_denominator(modulus(609427)?, &OutlierCriterion::default())
        .map_err(|e| e.to_string())?;
    let closest = recs
        .iter()
        .min_by(|a, b| a.distance.cmp(&b.distance))
        .ok_or("no orbits")?;
    expect_eq("closest orbit of 609427", closest.rep, 461)
}

fn check_triangle() -> CheckResult {
    let y = ReducedFraction::new(1, 580615).map_err(|e| e.to_string())?;
    expect_eq(
        "triangle of 1/580615",
        triangle_dims(y).map_err(|e| e.to_string())?,
        (12, 19),
    )
}

/// Every reference check.
pub fn checks() -> Vec<Check> {
    let mut out = vec![
        Check::new("decompositions of 5, 23, 25", 25, check_decompositions),
        Check::new("distance of 1/82945 = 1986949/25878840", 82945, || {
            check_distance(1, 82945, Ratio::new(1986949, 25878840))
        }),
    ];
    for (k, n, len) in ORBIT_LENGTHS {
        out.push(Check::new(format!("length of {k}/{n} = {len}"), n, move || {
            check_length(k, n, len)
        }));
    }
    out.push(Check::new(
        "two mirrored outliers of length 1080 in 609427",
        609427,
        check_outliers_609427,
    ));
    for (n, count) in SIGNIFICANT_COUNTS {
        out.push(Check::new(
            format!("significant orbits of {n} = {count}"),
            n,
            move || check_significant_count(n, count),
        ));
    }
    out.push(Check::new(
        "5 x orbit of 271/86963 = mirror of orbit of 1/86963",
        86963,
        check_pushforward_5,
    ));
    out.push(Check::new(
        "7 x orbit of 289/580615 = orbit of 1/82945",
        580615,
        check_pushforward_7,
    ));
    out.push(Check::new(
        "closest orbit of 609427 is 461/609427",
        609427,
        check_closest_609427,
    ));
    out.push(Check::new("triangle of 1/580615 is 12 x 19", 580615, check_triangle));
    out
}

/// Runs `checks`, skipping those beyond [`QUICK_LIMIT`] when `quick`.
pub fn run_checks(checks: &[Check], quick: bool) -> Vec<Outcome> {
    checks
        .iter()
        .map(|c| {
            let skipped = quick && c.max_n > QUICK_LIMIT;
            Outcome {
                name: c.name.clone(),
                skipped,
                result: if skipped { Ok(()) } else { c.run() },
            }
        })
        .collect()
}
