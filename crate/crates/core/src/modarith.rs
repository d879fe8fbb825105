//! Modular arithmetic and the structure of the subgroup generated by 2 and 3
//! in the unit group mod n.

use std::collections::HashSet;
use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest modulus accepted anywhere in the crate. Products are formed in
/// 128-bit intermediates, so anything below this is overflow-free.
pub const MAX_MODULUS: u64 = 1 << 62;

/// Default trial-division bound on the integer being factored.
pub const DEFAULT_FACTOR_BOUND: u64 = 1 << 40;

/// Above this many residues the visited set switches from a dense bitset to a hash set.
const DENSE_VISITED_LIMIT: u64 = 1 << 30;

/// The generators of the acting semigroup.
pub const MULTIPLIERS: [u64; 2] = [2, 3];

/// A denominator coprime to 6 and at least 5.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u64", into = "u64")]
pub struct Modulus(u64);

impl Modulus {
    pub fn new(n: u64) -> Result<Self> {
        if n < 5 {
            return Err(Error::ModulusTooSmall(n));
        }
        if n % 2 == 0 || n % 3 == 0 {
            return Err(Error::NotCoprimeToSix(n));
        }
        if n > MAX_MODULUS {
            return Err(Error::InvalidArgument(format!(
                "modulus {n} exceeds 2^62"
            )));
        }
        Ok(Modulus(n))
    }

    #[inline]
    pub fn get(self) -> u64 {
        self.0
    }
}

impl TryFrom<u64> for Modulus {
    type Error = Error;
    fn try_from(n: u64) -> Result<Self> {
        Modulus::new(n)
    }
}

impl From<Modulus> for u64 {
    fn from(m: Modulus) -> u64 {
        m.0
    }
}

impl fmt::Display for Modulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// `(a * b) mod n` for an arbitrary positive `n`.
#[inline]
pub fn mul_mod_u64(a: u64, b: u64, n: u64) -> u64 {
    if (a | b) >> 32 == 0 {
        (a * b) % n
    } else {
        ((a as u128 * b as u128) % n as u128) as u64
    }
}

/// `(a * b) mod n` without intermediate overflow.
#[inline]
pub fn mul_mod(a: u64, b: u64, n: Modulus) -> u64 {
    mul_mod_u64(a, b, n.0)
}

/// Prime factorization by trial division, refusing integers above `bound`.
#[derive(Debug, Clone, Copy)]
pub struct Factorizer {
    pub bound: u64,
}

impl Default for Factorizer {
    fn default() -> Self {
        Factorizer {
            bound: DEFAULT_FACTOR_BOUND,
        }
    }
}

impl Factorizer {
    /// Prime powers `(p, e)` with `p` ascending. `factorize(1)` is empty.
    pub fn factorize(&self, n: u64) -> Result<Vec<(u64, u32)>> {
        if n == 0 {
            return Err(Error::InvalidArgument("cannot factor 0".into()));
        }
        if n > self.bound {
            return Err(Error::FactorizationBound {
                n,
                bound: self.bound,
            });
        }
        let mut out = Vec::new();
        let mut rest = n;
        let mut p = 2u64;
        while p * p <= rest {
            if rest % p == 0 {
                let mut e = 0;
                while rest % p == 0 {
                    rest /= p;
                    e += 1;
                }
                out.push((p, e));
            }
            p += if p == 2 { 1 } else { 2 };
        }
        if rest > 1 {
            out.push((rest, 1));
        }
        Ok(out)
    }

    pub fn divisors(&self, n: u64) -> Result<Vec<u64>> {
        let mut divs = vec![1u64];
        for (p, e) in self.factorize(n)? {
            let len = divs.len();
            let mut pk = 1;
            for _ in 0..e {
                pk *= p;
                for i in 0..len {
                    divs.push(divs[i] * pk);
                }
            }
        }
        divs.sort_unstable();
        Ok(divs)
    }

    pub fn totient(&self, n: u64) -> Result<u64> {
        Ok(self
            .factorize(n)?
            .into_iter()
            .fold(n, |acc, (p, _)| acc / p * (p - 1)))
    }
}

/// Sorted list of all positive divisors of `n`.
pub fn divisors(n: u64) -> Result<Vec<u64>> {
    Factorizer::default().divisors(n)
}

/// Euler's totient.
pub fn totient(n: u64) -> Result<u64> {
    Factorizer::default().totient(n)
}

/// `mask[r]` is true iff `gcd(r, n) = 1`, for `r` in `0..n`.
pub fn unit_mask(n: u64) -> Result<Vec<bool>> {
    let primes = Factorizer::default().factorize(n)?;
    let mut mask = vec![true; n as usize];
    mask[0] = n == 1;
    for (p, _) in primes {
        for r in (0..n as usize).step_by(p as usize) {
            mask[r] = false;
        }
    }
    Ok(mask)
}

/// Multiplicative order of `a` mod `n`, or `None` when `gcd(a, n) != 1`.
pub fn multiplicative_order(a: u64, n: u64) -> Option<u64> {
    if n == 1 {
        return Some(1);
    }
    if a.gcd(&n) != 1 {
        return None;
    }
    let start = a % n;
    let mut x = start;
    let mut k = 1;
    while x != 1 {
        x = mul_mod_u64(x, start, n);
        k += 1;
    }
    Some(k)
}

enum Visited {
    Dense(Vec<u64>),
    Sparse(HashSet<u64>),
}

impl Visited {
    fn new(n: u64) -> Self {
        if n <= DENSE_VISITED_LIMIT {
            Visited::Dense(vec![0; (n as usize).div_ceil(64)])
        } else {
            Visited::Sparse(HashSet::new())
        }
    }

    /// Marks `r`; returns true if it was not yet marked.
    fn insert(&mut self, r: u64) -> bool {
        match self {
            Visited::Dense(bits) => {
                let (w, b) = ((r / 64) as usize, r % 64);
                let fresh = bits[w] & (1 << b) == 0;
                bits[w] |= 1 << b;
                fresh
            }
            Visited::Sparse(set) => set.insert(r),
        }
    }
}

/// Closure of `{start}` under `r -> 2r mod n` and `r -> 3r mod n`, in discovery order.
pub fn bfs_closure(start: u64, n: u64) -> Vec<u64> {
    let mut visited = Visited::new(n);
    let start = start % n;
    visited.insert(start);
    let mut out = vec![start];
    let mut stack = vec![start];
    while let Some(r) = stack.pop() {
        for q in MULTIPLIERS {
            let s = mul_mod_u64(r, q, n);
            if visited.insert(s) {
                out.push(s);
                stack.push(s);
            }
        }
    }
    out
}

/// Elements of the subgroup generated by 2 and 3 in the units mod `n`, ascending.
pub fn subgroup_elements(n: Modulus) -> Vec<u64> {
    let mut h = bfs_closure(1, n.get());
    h.sort_unstable();
    h
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubgroupInfo {
    pub modulus: Modulus,
    /// Size of the subgroup generated by 2 and 3 mod n.
    pub order: u64,
    /// Euler's totient of n.
    pub totient: u64,
}

impl SubgroupInfo {
    /// Number of orbits making up the unit level.
    pub fn unit_orbit_count(&self) -> u64 {
        self.totient / self.order
    }
}

pub fn subgroup_info(n: Modulus) -> Result<SubgroupInfo> {
    let totient = totient(n.get())?;
    let order = bfs_closure(1, n.get()).len() as u64;
    debug_assert_eq!(totient % order, 0);
    Ok(SubgroupInfo {
        modulus: n,
        order,
        totient,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(n: u64) -> Modulus {
        Modulus::new(n).unwrap()
    }

    #[test]
    fn modulus_validation() {
        assert_eq!(Modulus::new(24), Err(Error::NotCoprimeToSix(24)));
        assert_eq!(Modulus::new(9), Err(Error::NotCoprimeToSix(9)));
        assert_eq!(Modulus::new(1), Err(Error::ModulusTooSmall(1)));
        assert!(Modulus::new(5).is_ok());
        assert!(Modulus::new(MAX_MODULUS + 1).is_err());
    }

    #[test]
    fn mul_mod_small() {
        assert_eq!(mul_mod(4, 3, m(5)), 2);
        assert_eq!(mul_mod(0, 2, m(23)), 0);
    }

    #[test]
    fn mul_mod_wide() {
        let n = (1u64 << 41) - 31;
        let a = (1u64 << 40) + 1;
        // 3 * (2^40 + 1) = 3*2^40 + 3 = (2^41 - 31) + (2^40 + 34)
        assert_eq!(mul_mod_u64(a, 3, n), (1 << 40) + 34);
    }

    #[test]
    fn subgroup_examples() {
        let s5 = subgroup_info(m(5)).unwrap();
        assert_eq!((s5.order, s5.totient), (4, 4));
        let s23 = subgroup_info(m(23)).unwrap();
        assert_eq!((s23.order, s23.totient), (11, 22));
        assert_eq!(s23.unit_orbit_count(), 2);
    }

    #[test]
    fn subgroup_609427() {
        assert_eq!(subgroup_info(m(609427)).unwrap().order, 1080);
    }

    #[test]
    fn divisor_examples() {
        assert_eq!(divisors(25).unwrap(), vec![1, 5, 25]);
        assert_eq!(divisors(23).unwrap(), vec![1, 23]);
        assert_eq!(divisors(1).unwrap(), vec![1]);
        let d = divisors(580615).unwrap();
        assert!(d.contains(&7) && d.contains(&82945));
        assert_eq!(d.len(), 16);
    }

    #[test]
    fn factor_bound_is_enforced() {
        let f = Factorizer { bound: 1000 };
        assert_eq!(
            f.factorize(1001),
            Err(Error::FactorizationBound { n: 1001, bound: 1000 })
        );
        assert!(f.factorize(1000).is_ok());
    }

    #[test]
    fn totients() {
        assert_eq!(totient(25).unwrap(), 20);
        assert_eq!(totient(609427).unwrap(), 6 * 12 * 36 * 180);
    }

    #[test]
    fn unit_mask_matches_gcd() {
        let n = 175;
        let mask = unit_mask(n).unwrap();
        for r in 0..n {
            assert_eq!(mask[r as usize], r.gcd(&n) == 1, "r = {r}");
        }
    }

    #[test]
    fn orders() {
        assert_eq!(multiplicative_order(2, 7), Some(3));
        assert_eq!(multiplicative_order(3, 7), Some(6));
        assert_eq!(multiplicative_order(5, 25), None);
    }

    #[test]
    fn sparse_visited_agrees_with_dense() {
        let mut dense = Visited::Dense(vec![0; 2]);
        let mut sparse = Visited::Sparse(HashSet::new());
        for r in [3, 17, 3, 99, 17, 0] {
            assert_eq!(dense.insert(r), sparse.insert(r));
        }
    }
}
