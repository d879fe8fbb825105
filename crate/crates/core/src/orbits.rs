//! Minimal finite orbits of the joint `x -> 2x`, `x -> 3x` (mod 1) action on
//! rationals `k/n` with `n` coprime to 6.
//!
//! An [`Orbit`] is kept over the denominator it was generated in. Its numerators
//! then all share one `g = gcd(r, n)`: the orbit lives at level `n / g`, and
//! [`Orbit::reduced`] gives the lowest-terms view.

use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modarith::{
    bfs_closure, mul_mod_u64, subgroup_elements, unit_mask, Factorizer, Modulus, MULTIPLIERS,
};

/// A point `k/n` of the circle in lowest terms with `n` coprime to 6.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ReducedFraction {
    num: u64,
    den: Modulus,
}

impl ReducedFraction {
    pub fn new(k: u64, n: u64) -> Result<Self> {
        let den = Modulus::new(n)?;
        if k == 0 || k >= n {
            return Err(Error::NumeratorOutOfRange { k, n });
        }
        if k.gcd(&n) != 1 {
            return Err(Error::NotReduced { k, n });
        }
        Ok(ReducedFraction { num: k, den })
    }

    /// Reduces `k/n` to lowest terms first; `None` for integers (the fixed point 0).
    pub fn reducing(k: u64, n: u64) -> Result<Option<Self>> {
        if n == 0 || k >= n {
            return Err(Error::NumeratorOutOfRange { k, n });
        }
        let g = k.gcd(&n);
        if k == 0 {
            return Ok(None);
        }
        Self::new(k / g, n / g).map(Some)
    }

    pub fn numerator(&self) -> u64 {
        self.num
    }

    pub fn denominator(&self) -> Modulus {
        self.den
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / self.den.get() as f64
    }
}

impl fmt::Display for ReducedFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

/// A minimal invariant set, as a strictly increasing list of numerators over `denominator`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Orbit {
    den: Modulus,
    numerators: Vec<u64>,
}

impl Orbit {
    /// Wraps an already-computed numerator set, sorting it. No invariant checks.
    pub(crate) fn from_unsorted(den: Modulus, mut numerators: Vec<u64>) -> Self {
        numerators.sort_unstable();
        Orbit { den, numerators }
    }

    pub fn denominator(&self) -> Modulus {
        self.den
    }

    pub fn numerators(&self) -> &[u64] {
        &self.numerators
    }

    pub fn len(&self) -> usize {
        self.numerators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.numerators.is_empty()
    }

    /// Smallest numerator.
    pub fn representative(&self) -> u64 {
        self.numerators[0]
    }

    /// The common `gcd(r, n)` of all numerators.
    pub fn level_gcd(&self) -> u64 {
        self.numerators[0].gcd(&self.den.get())
    }

    pub fn is_unit_level(&self) -> bool {
        self.level_gcd() == 1
    }

    pub fn contains(&self, r: u64) -> bool {
        self.numerators.binary_search(&r).is_ok()
    }

    /// The same orbit in lowest terms.
    pub fn reduced(&self) -> Orbit {
        let g = self.level_gcd();
        if g == 1 {
            return self.clone();
        }
        let den = Modulus::new(self.den.get() / g).expect("divisor of a valid modulus is valid");
        Orbit {
            den,
            numerators: self.numerators.iter().map(|r| r / g).collect(),
        }
    }

    /// The smallest point of the orbit, in lowest terms.
    pub fn seed(&self) -> ReducedFraction {
        let red = self.reduced();
        ReducedFraction {
            num: red.numerators[0],
            den: red.den,
        }
    }

    /// Same set of points on the circle, regardless of stored denominator.
    pub fn same_points(&self, other: &Orbit) -> bool {
        self.reduced() == other.reduced()
    }

    /// Closure under both multipliers, a single gcd level, and minimality.
    pub fn satisfies_invariants(&self) -> bool {
        let n = self.den.get();
        if self.numerators.is_empty()
            || !self.numerators.windows(2).all(|w| w[0] < w[1])
            || self.numerators.iter().any(|&r| r == 0 || r >= n)
        {
            return false;
        }
        let g = self.level_gcd();
        let closed = self.numerators.iter().all(|&r| {
            r.gcd(&n) == g
                && MULTIPLIERS
                    .iter()
                    .all(|&q| self.contains(mul_mod_u64(r, q, n)))
        });
        closed && bfs_closure(self.numerators[self.len() / 2], n).len() == self.len()
    }
}

impl fmt::Display for Orbit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let seed = self.seed();
        write!(f, "orbit of {} ({} points)", seed, self.len())
    }
}

/// Orbit of `k/n`. With `reduce_first` the result is over the lowest-terms
/// denominator; otherwise it stays over `n`.
pub fn orbit_of(k: u64, n: u64, reduce_first: bool) -> Result<Orbit> {
    let den = Modulus::new(n)?;
    if k == 0 || k >= n {
        return Err(Error::NumeratorOutOfRange { k, n });
    }
    if reduce_first {
        let g = k.gcd(&n);
        let den = Modulus::new(n / g)?;
        return Ok(Orbit::from_unsorted(den, bfs_closure(k / g, n / g)));
    }
    Ok(Orbit::from_unsorted(den, bfs_closure(k, n)))
}

/// Orbit of a lowest-terms point.
pub fn orbit_of_fraction(x: ReducedFraction) -> Orbit {
    let n = x.den.get();
    Orbit::from_unsorted(x.den, bfs_closure(x.num, n))
}

/// Unit-level orbit `k * H mod n` given the sorted subgroup `H` generated by 2 and 3.
pub(crate) fn coset(k: u64, n: Modulus, subgroup: &[u64]) -> Orbit {
    let numerators = subgroup
        .iter()
        .map(|&h| mul_mod_u64(k, h, n.get()))
        .collect();
    Orbit::from_unsorted(n, numerators)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Repeated closure from the smallest uncovered numerator.
    Bfs,
    /// Cosets of the subgroup generated by 2 and 3, level by level.
    Cosets,
}

impl FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bfs" => Ok(Method::Bfs),
            "cosets" => Ok(Method::Cosets),
            other => Err(Error::InvalidArgument(format!(
                "unknown method {other:?} (expected bfs or cosets)"
            ))),
        }
    }
}

/// Partition of `{1/n, ..., (n-1)/n}` into orbits, all stored over `n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposition {
    pub denominator: Modulus,
    /// Sorted by smallest numerator.
    pub orbits: Vec<Orbit>,
}

impl Decomposition {
    /// Orbits with numerators coprime to `n`.
    pub fn unit_level(&self) -> impl Iterator<Item = &Orbit> {
        self.orbits.iter().filter(|o| o.is_unit_level())
    }

    /// True iff the orbits are disjoint and cover every numerator in `1..n`.
    pub fn is_partition(&self) -> bool {
        let n = self.denominator.get() as usize;
        let mut seen = vec![false; n];
        for o in &self.orbits {
            if o.den != self.denominator {
                return false;
            }
            for &r in &o.numerators {
                if seen[r as usize] {
                    return false;
                }
                seen[r as usize] = true;
            }
        }
        seen[1..].iter().all(|&s| s)
    }
}

pub fn decompose(n: Modulus, method: Method) -> Result<Decomposition> {
    let orbits = match method {
        Method::Bfs => decompose_bfs(n),
        Method::Cosets => decompose_cosets(n)?,
    };
    Ok(Decomposition {
        denominator: n,
        orbits,
    })
}

fn decompose_bfs(n: Modulus) -> Vec<Orbit> {
    let size = n.get() as usize;
    let mut visited = vec![false; size];
    let mut orbits = Vec::new();
    let mut stack = Vec::new();
    for k in 1..size {
        if visited[k] {
            continue;
        }
        visited[k] = true;
        let mut members = vec![k as u64];
        stack.push(k as u64);
        while let Some(r) = stack.pop() {
            for q in MULTIPLIERS {
                let s = mul_mod_u64(r, q, n.get());
                if !visited[s as usize] {
                    visited[s as usize] = true;
                    members.push(s);
                    stack.push(s);
                }
            }
        }
        orbits.push(Orbit::from_unsorted(n, members));
    }
    orbits
}

fn decompose_cosets(n: Modulus) -> Result<Vec<Orbit>> {
    let mut orbits = Vec::new();
    for level in Factorizer::default().divisors(n.get())? {
        if level == 1 {
            continue;
        }
        let scale = n.get() / level;
        let level_mod = Modulus::new(level)?;
        for o in unit_level_cosets(level_mod)? {
            let numerators = o.numerators.iter().map(|r| r * scale).collect();
            orbits.push(Orbit { den: n, numerators });
        }
    }
    orbits.sort_unstable_by_key(|o| o.numerators[0]);
    Ok(orbits)
}

/// Orbits making up the unit level `{k/n : gcd(k, n) = 1}`, by smallest numerator.
pub fn unit_level_cosets(n: Modulus) -> Result<Vec<Orbit>> {
    let subgroup = subgroup_elements(n);
    let mut free = unit_mask(n.get())?;
    let mut orbits = Vec::new();
    for k in 1..n.get() {
        if !free[k as usize] {
            continue;
        }
        let o = coset(k, n, &subgroup);
        for &r in &o.numerators {
            free[r as usize] = false;
        }
        orbits.push(o);
    }
    Ok(orbits)
}

/// Image under `x -> 1 - x`.
pub fn mirror(o: &Orbit) -> Orbit {
    let n = o.den.get();
    Orbit {
        den: o.den,
        numerators: o.numerators.iter().rev().map(|r| n - r).collect(),
    }
}

pub fn is_symmetric(o: &Orbit) -> bool {
    let n = o.den.get();
    o.numerators
        .iter()
        .zip(o.numerators.iter().rev())
        .all(|(a, b)| a + b == n)
}

/// Numerators in the left half `(0, 1/2)` and the right half.
pub fn left_right_counts(o: &Orbit) -> (usize, usize) {
    let n = o.den.get();
    let left = o.numerators.partition_point(|&r| 2 * r < n);
    (left, o.len() - left)
}

/// The member of `{o, mirror(o)}` with more points left of 1/2, ties broken by the
/// lexicographically smaller numerator list.
pub fn canonical_of_pair(o: &Orbit) -> Orbit {
    let m = mirror(o);
    let (left, right) = left_right_counts(o);
    let keep_self = match left.cmp(&right) {
        std::cmp::Ordering::Greater => true,
        std::cmp::Ordering::Less => false,
        std::cmp::Ordering::Equal => o.numerators <= m.numerators,
    };
    if keep_self {
        o.clone()
    } else {
        m
    }
}

/// Result of pushing an orbit forward under `x -> qx mod 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Pushforward {
    Orbit(Orbit),
    /// The fixed point 0.
    Zero,
}

impl Pushforward {
    pub fn then(&self, q: u64) -> Pushforward {
        match self {
            Pushforward::Orbit(o) => pushforward(o, q),
            Pushforward::Zero => Pushforward::Zero,
        }
    }

    pub fn orbit(&self) -> Option<&Orbit> {
        match self {
            Pushforward::Orbit(o) => Some(o),
            Pushforward::Zero => None,
        }
    }
}

/// Image under `x -> qx mod 1`, in lowest terms.
pub fn pushforward(o: &Orbit, q: u64) -> Pushforward {
    let red = o.reduced();
    let n = red.den.get();
    let image = mul_mod_u64(red.numerators[0], q % n, n);
    if image == 0 {
        return Pushforward::Zero;
    }
    let g = image.gcd(&n);
    let den = Modulus::new(n / g).expect("divisor of a valid modulus is valid");
    Pushforward::Orbit(Orbit::from_unsorted(den, bfs_closure(image / g, n / g)))
}
