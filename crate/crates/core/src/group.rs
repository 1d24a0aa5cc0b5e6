//! Finite abelian groups presented as ordered products of prime-power
//! cyclic factors, their elements, and residue-class arithmetic.
//!
//! Groups are taken exactly as presented: `Z2xZ3` and `Z3xZ2` are different
//! presentations of the same group and their elements have different
//! coordinate orders. No normal form is computed.

use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Returns `(p, a)` with `n = p^a`, `a >= 1`, when `n` is a prime power.
pub fn prime_power(n: u64) -> Option<(u64, u32)> {
    if n < 2 {
        return None;
    }
    let p = (2..)
        .take_while(|d: &u64| d.saturating_mul(*d) <= n)
        .find(|d| n % d == 0)
        .unwrap_or(n);
    let mut rest = n;
    let mut a = 0;
    while rest % p == 0 {
        rest /= p;
        a += 1;
    }
    (rest == 1).then_some((p, a))
}

/// One cyclic factor `Z/p^a`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CyclicFactor {
    pub prime: u64,
    pub exponent: u32,
}

impl CyclicFactor {
    pub fn order(&self) -> u64 {
        self.prime.pow(self.exponent)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FiniteAbelianGroup {
    factors: Vec<CyclicFactor>,
    moduli: Vec<u64>,
    order: u64,
}

/// A group element as a dense coordinate tuple aligned with the factors.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Element(Vec<u64>);

impl Element {
    pub fn coords(&self) -> &[u64] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<u64> {
        self.0
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().all(|&r| r == 0)
    }

    /// Indices of the nonzero coordinates.
    pub fn support(&self) -> Vec<usize> {
        (0..self.0.len()).filter(|&i| self.0[i] != 0).collect()
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, r) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{r}")?;
        }
        write!(f, ")")
    }
}

impl FiniteAbelianGroup {
    /// Builds a group from `(prime, exponent)` pairs, each a cyclic factor of
    /// order `prime^exponent`.
    pub fn new(factors: impl IntoIterator<Item = (u64, u32)>) -> Result<Self> {
        let mut fs = Vec::new();
        let mut moduli = Vec::new();
        let mut order: u64 = 1;
        for (prime, exponent) in factors {
            if !is_prime(prime) {
                return Err(Error::InvalidGroup(format!("{prime} is not prime")));
            }
            if exponent == 0 {
                return Err(Error::InvalidGroup(format!(
                    "factor Z{prime}^0: exponents must be at least 1"
                )));
            }
            let modulus = prime
                .checked_pow(exponent)
                .ok_or_else(|| Error::InvalidGroup(format!("{prime}^{exponent} overflows u64")))?;
            order = order
                .checked_mul(modulus)
                .ok_or_else(|| Error::InvalidGroup("group order overflows u64".into()))?;
            fs.push(CyclicFactor { prime, exponent });
            moduli.push(modulus);
        }
        Ok(Self {
            factors: fs,
            moduli,
            order,
        })
    }

    pub fn trivial() -> Self {
        Self {
            factors: Vec::new(),
            moduli: Vec::new(),
            order: 1,
        }
    }

    /// `(Z/p)^rank`.
    pub fn elementary(prime: u64, rank: usize) -> Result<Self> {
        Self::new(std::iter::repeat((prime, 1)).take(rank))
    }

    pub fn factors(&self) -> &[CyclicFactor] {
        &self.factors
    }

    pub fn moduli(&self) -> &[u64] {
        &self.moduli
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    /// Number of cyclic factors in the presentation.
    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    /// Distinct primes, ascending.
    pub fn primes(&self) -> Vec<u64> {
        let mut ps: Vec<u64> = self.factors.iter().map(|f| f.prime).collect();
        ps.sort_unstable();
        ps.dedup();
        ps
    }

    /// The prime `p` when this is a nontrivial `p`-group.
    pub fn single_prime(&self) -> Option<u64> {
        match self.primes().as_slice() {
            [p] => Some(*p),
            _ => None,
        }
    }

    /// Largest exponent among the factors of prime `p` (0 if none).
    pub fn exponent_of(&self, p: u64) -> u32 {
        self.factors
            .iter()
            .filter(|f| f.prime == p)
            .map(|f| f.exponent)
            .max()
            .unwrap_or(0)
    }

    /// Factors of `self` followed by factors of `other`. Coordinates of the
    /// product are the concatenation, so element indices satisfy
    /// `idx(g, h) = idx(g) * |other| + idx(h)`.
    pub fn direct_product(&self, other: &Self) -> Result<Self> {
        Self::new(
            self.factors
                .iter()
                .chain(other.factors.iter())
                .map(|f| (f.prime, f.exponent)),
        )
    }

    pub fn identity(&self) -> Element {
        Element(vec![0; self.rank()])
    }

    pub fn element(&self, coords: Vec<u64>) -> Result<Element> {
        if coords.len() != self.rank() {
            return Err(Error::InvalidElement(format!(
                "expected {} coordinates, got {}",
                self.rank(),
                coords.len()
            )));
        }
        for (i, (&r, &n)) in coords.iter().zip(&self.moduli).enumerate() {
            if r >= n {
                return Err(Error::InvalidElement(format!(
                    "coordinate {i} is {r}, must be below {n}"
                )));
            }
        }
        Ok(Element(coords))
    }

    pub fn contains(&self, g: &Element) -> bool {
        g.0.len() == self.rank() && g.0.iter().zip(&self.moduli).all(|(r, n)| r < n)
    }

    /// Position of `g` in the lexicographic order of coordinate tuples.
    pub fn index_of(&self, g: &Element) -> usize {
        g.0.iter()
            .zip(&self.moduli)
            .fold(0u64, |acc, (&r, &n)| acc * n + r) as usize
    }

    pub fn element_at(&self, index: usize) -> Element {
        let mut rest = index as u64;
        let mut coords = vec![0; self.rank()];
        for i in (0..self.rank()).rev() {
            coords[i] = rest % self.moduli[i];
            rest /= self.moduli[i];
        }
        Element(coords)
    }

    /// All elements in index order.
    pub fn elements(&self) -> impl Iterator<Item = Element> + '_ {
        (0..self.order as usize).map(move |i| self.element_at(i))
    }

    /// Least `k >= 1` with `k*g = 0`: the lcm over coordinates of
    /// `n_i / gcd(r_i, n_i)`.
    pub fn element_order(&self, g: &Element) -> u64 {
        g.0.iter()
            .zip(&self.moduli)
            .map(|(&r, &n)| n / r.gcd(&n))
            .fold(1u64, |acc, o| acc.lcm(&o))
    }

    /// `k*g`, coordinatewise. `k = 0` gives the identity.
    pub fn power(&self, g: &Element, k: u64) -> Element {
        Element(
            g.0.iter()
                .zip(&self.moduli)
                .map(|(&r, &n)| ((r as u128 * (k % n) as u128) % n as u128) as u64)
                .collect(),
        )
    }

    pub fn add(&self, g: &Element, h: &Element) -> Element {
        Element(
            g.0.iter()
                .zip(&h.0)
                .zip(&self.moduli)
                .map(|((&a, &b), &n)| (a + b) % n)
                .collect(),
        )
    }
}

impl fmt::Display for FiniteAbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "Z1");
        }
        let mut first = true;
        let mut i = 0;
        while i < self.factors.len() {
            let fac = self.factors[i];
            let mut run = 1;
            while i + run < self.factors.len() && self.factors[i + run] == fac {
                run += 1;
            }
            if !first {
                write!(f, "x")?;
            }
            first = false;
            if run > 1 {
                write!(f, "Z{}^{}", fac.order(), run)?;
            } else {
                write!(f, "Z{}", fac.order())?;
            }
            i += run;
        }
        Ok(())
    }
}

/// Group-spec grammar: factors joined by `x`; each factor is `Z<n>` (cyclic
/// of prime-power order `n`) or `Z<n>^<k>` (`k` copies of `Z<n>`).
/// `Z1` or `1` is the trivial group.
impl FromStr for FiniteAbelianGroup {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let spec = s.trim();
        if spec.is_empty() {
            return Err(Error::spec(s, "empty spec"));
        }
        if spec == "1" || spec == "Z1" {
            return Ok(Self::trivial());
        }
        let mut factors = Vec::new();
        for part in spec.split(['x', '×']) {
            let part = part.trim();
            let body = part
                .strip_prefix('Z')
                .ok_or_else(|| Error::spec(s, format!("factor `{part}` must start with `Z`")))?;
            let (base, copies) = match body.split_once('^') {
                Some((b, c)) => {
                    let copies: usize = c
                        .trim()
                        .parse()
                        .map_err(|_| Error::spec(s, format!("bad power in `{part}`")))?;
                    if copies == 0 {
                        return Err(Error::spec(s, format!("zero power in `{part}`")));
                    }
                    (b.trim(), copies)
                }
                None => (body.trim(), 1),
            };
            let n: u64 = base
                .parse()
                .map_err(|_| Error::spec(s, format!("bad order in `{part}`")))?;
            if n == 1 {
                continue;
            }
            let (p, a) = prime_power(n)
                .ok_or_else(|| Error::spec(s, format!("{n} is not a prime power")))?;
            factors.extend(std::iter::repeat((p, a)).take(copies));
        }
        Self::new(factors).map_err(|e| Error::spec(s, e.to_string()))
    }
}

/// The arithmetic progression `{base + t*modulus : t >= 0}` with
/// `0 <= base < modulus`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ResidueClass {
    base: u64,
    modulus: u64,
}

impl ResidueClass {
    /// Reduces `base` modulo `modulus`; the modulus must be positive.
    pub fn new(base: u64, modulus: u64) -> Result<Self> {
        if modulus == 0 {
            return Err(Error::Precondition("residue class modulus must be positive".into()));
        }
        Ok(Self {
            base: base % modulus,
            modulus,
        })
    }

    pub fn base(&self) -> u64 {
        self.base
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// Smallest positive member.
    pub fn least_positive(&self) -> u64 {
        if self.base == 0 {
            self.modulus
        } else {
            self.base
        }
    }

    pub fn contains(&self, k: u64) -> bool {
        k % self.modulus == self.base
    }
}

impl fmt::Display for ResidueClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} mod {}", self.base, self.modulus)
    }
}

/// Intersection of two residue classes: a class modulo `lcm(M1, M2)`, or
/// `None` when the bases disagree modulo `gcd(M1, M2)`.
pub fn crt_intersect(a: ResidueClass, b: ResidueClass) -> Option<ResidueClass> {
    let (m1, m2) = (a.modulus as i128, b.modulus as i128);
    let (b1, b2) = (a.base as i128, b.base as i128);
    let eg = m1.extended_gcd(&m2);
    let g = eg.gcd;
    if (b2 - b1) % g != 0 {
        return None;
    }
    let lcm = m1 / g * m2;
    // m1*x + m2*y = g, so t = (b2-b1)/g * x solves m1*t = b2-b1 (mod m2).
    let step = m2 / g;
    let t = ((b2 - b1) / g % step * (eg.x % step)).rem_euclid(step);
    let x = (b1 + m1 * t).rem_euclid(lcm);
    Some(ResidueClass {
        base: x as u64,
        modulus: lcm as u64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(spec: &str) -> FiniteAbelianGroup {
        spec.parse().unwrap()
    }

    #[test]
    fn element_orders() {
        let z8 = g("Z8");
        assert_eq!(z8.element_order(&z8.element(vec![0]).unwrap()), 1);
        assert_eq!(z8.element_order(&z8.element(vec![2]).unwrap()), 4);
        let z93 = g("Z9xZ3");
        assert_eq!(z93.element_order(&z93.element(vec![3, 1]).unwrap()), 3);
    }

    #[test]
    fn powers() {
        let z6 = g("Z2xZ3");
        let x = z6.element(vec![1, 1]).unwrap();
        assert_eq!(z6.power(&x, 3).coords(), &[1, 0]);
        assert!(z6.power(&x, 0).is_identity());
        let z93 = g("Z9xZ3");
        let y = z93.element(vec![1, 1]).unwrap();
        assert_eq!(z93.power(&y, 3).coords(), &[3, 0]);
    }

    #[test]
    fn crt_examples() {
        let c = |b, m| ResidueClass::new(b, m).unwrap();
        assert_eq!(crt_intersect(c(1, 2), c(2, 3)), Some(c(5, 6)));
        assert_eq!(crt_intersect(c(1, 4), c(3, 4)), None);
        // {2,6,10,...} ∩ {0,6,12,...} = {6,18,...}
        assert_eq!(crt_intersect(c(2, 4), c(0, 6)), Some(c(6, 12)));
    }

    #[test]
    fn residue_class_rejects_zero_modulus() {
        assert!(ResidueClass::new(3, 0).is_err());
        assert_eq!(ResidueClass::new(7, 4).unwrap().base(), 3);
        assert_eq!(ResidueClass::new(0, 5).unwrap().least_positive(), 5);
    }

    #[test]
    fn spec_grammar() {
        let a = g("Z2^3xZ3");
        assert_eq!(a.order(), 24);
        assert_eq!(a.rank(), 4);
        assert_eq!(a.to_string(), "Z2^3xZ3");
        let b = g("Z9xZ3");
        assert_eq!(b.moduli(), &[9, 3]);
        assert_eq!(b.to_string(), "Z9xZ3");
        assert_eq!(g("Z1").order(), 1);
        assert_eq!(g("1").rank(), 0);
        assert_eq!(g(" Z4 x Z4 ").to_string(), "Z4^2");
        assert!("Z6".parse::<FiniteAbelianGroup>().is_err());
        assert!("Z2xY3".parse::<FiniteAbelianGroup>().is_err());
        assert!("Z2^0".parse::<FiniteAbelianGroup>().is_err());
        assert!("".parse::<FiniteAbelianGroup>().is_err());
    }

    #[test]
    fn construction_limits() {
        assert!(FiniteAbelianGroup::new([(4, 1)]).is_err());
        assert!(FiniteAbelianGroup::new([(2, 0)]).is_err());
        assert!(FiniteAbelianGroup::new([(2, 40), (2, 40)]).is_err());
    }

    #[test]
    fn index_round_trip_is_lexicographic() {
        let grp = g("Z3xZ2");
        let all: Vec<_> = grp.elements().collect();
        assert_eq!(all[1].coords(), &[0, 1]);
        assert_eq!(all[2].coords(), &[1, 0]);
        for (i, e) in all.iter().enumerate() {
            assert_eq!(grp.index_of(e), i);
        }
    }

    #[test]
    fn prime_power_detection() {
        assert_eq!(prime_power(8), Some((2, 3)));
        assert_eq!(prime_power(9), Some((3, 2)));
        assert_eq!(prime_power(7), Some((7, 1)));
        assert_eq!(prime_power(12), None);
        assert_eq!(prime_power(1), None);
    }
}
