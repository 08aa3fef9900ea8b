use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use super::GnpError;
use crate::padic::is_prime;
use crate::polytope::RectDelta;

/// A pair `(r1, r2) ∈ Z/d1 × Z/d2`; a prime `p` belongs to it when
/// `p ≡ r1 mod d1` and `p ≡ r2 mod d2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ResidueClass {
    pub r1: u32,
    pub r2: u32,
}

impl ResidueClass {
    pub fn new(delta: &RectDelta, r1: u32, r2: u32) -> Result<Self, GnpError> {
        if r1 >= delta.d1() || r2 >= delta.d2() {
            return Err(GnpError::BadClass(format!(
                "({r1},{r2}) out of range for Δ=({},{})",
                delta.d1(),
                delta.d2()
            )));
        }
        Ok(ResidueClass { r1, r2 })
    }

    pub fn of_prime(delta: &RectDelta, p: u64) -> Self {
        ResidueClass {
            r1: (p % delta.d1() as u64) as u32,
            r2: (p % delta.d2() as u64) as u32,
        }
    }

    /// `(1,1)`, where Newton and Hodge polygons coincide.
    pub fn is_trivial(&self) -> bool {
        self.r1 == 1 && self.r2 == 1
    }

    /// Some integer coprime to `D` reduces to this pair.
    pub fn is_realizable(&self, delta: &RectDelta) -> bool {
        let g = delta.gcd() as u32;
        self.r1 % g == self.r2 % g
            && (self.r1 as u64).gcd(&(delta.d1() as u64)) == 1
            && (self.r2 as u64).gcd(&(delta.d2() as u64)) == 1
    }

    pub fn contains(&self, delta: &RectDelta, p: u64) -> bool {
        ResidueClass::of_prime(delta, p) == *self
    }

    /// Every pair `(r1, r2)` except `(1,1)`, in lexicographic order. Pairs
    /// that no prime reaches are kept as formal classes.
    pub fn all_nontrivial(delta: &RectDelta) -> Vec<ResidueClass> {
        let mut out = Vec::new();
        for r1 in 0..delta.d1() {
            for r2 in 0..delta.d2() {
                let c = ResidueClass { r1, r2 };
                if !c.is_trivial() {
                    out.push(c);
                }
            }
        }
        out
    }

    /// Smallest prime `> min` in the class (none if not realizable).
    pub fn prime_above(&self, delta: &RectDelta, min: u64) -> Option<u64> {
        if !self.is_realizable(delta) {
            return None;
        }
        let l = delta.lcm();
        let mut p = min + 1;
        while !self.contains(delta, p) {
            p += 1;
        }
        loop {
            if is_prime(p) {
                return Some(p);
            }
            p += l;
        }
    }

    /// Integers `(p1, p2)` with `p1 ≡ r1 mod d1`, `p2 ≡ r2 mod d2`, both
    /// above `min`, standing in for a prime of the class coordinatewise.
    /// For realizable classes both equal the smallest prime above `min`.
    pub fn witness_pair(&self, delta: &RectDelta, min: u64) -> (u64, u64) {
        if let Some(p) = self.prime_above(delta, min) {
            return (p, p);
        }
        let lift = |r: u32, d: u32| {
            let d = d as u64;
            let base = (min / d + 1) * d;
            base + r as u64
        };
        (lift(self.r1, delta.d1()), lift(self.r2, delta.d2()))
    }
}

impl fmt::Display for ResidueClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.r1, self.r2)
    }
}
