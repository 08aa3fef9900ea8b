//! Lattice combinatorics of the rectangle `Δ = [0,d1]×[0,d2]`.
//!
//! Weights are handled as integer numerators over `D = d1·d2`: a point `v`
//! has weight `w(v) = max(v1·d2, v2·d1) / D`.

use std::cmp::Ordering;
use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rat::{q, Q};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PolytopeError {
    #[error("rectangle sides must be at least 3, got ({0},{1})")]
    TooSmall(u32, u32),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RectDelta {
    d1: u32,
    d2: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LatticePoint {
    pub v1: u32,
    pub v2: u32,
}

impl LatticePoint {
    pub const ORIGIN: LatticePoint = LatticePoint { v1: 0, v2: 0 };

    pub const fn new(v1: u32, v2: u32) -> Self {
        LatticePoint { v1, v2 }
    }

    pub fn is_origin(self) -> bool {
        self.v1 == 0 && self.v2 == 0
    }

    /// `self·p − other`, or `None` when it leaves the first quadrant.
    pub fn scaled_minus(self, p: u32, other: LatticePoint) -> Option<LatticePoint> {
        let a = (self.v1 as i64) * p as i64 - other.v1 as i64;
        let b = (self.v2 as i64) * p as i64 - other.v2 as i64;
        (a >= 0 && b >= 0).then(|| LatticePoint::new(a as u32, b as u32))
    }

    /// The `"v1,v2"` key used in JSON maps.
    pub fn key(self) -> String {
        format!("{},{}", self.v1, self.v2)
    }

    pub fn parse_key(s: &str) -> Option<LatticePoint> {
        let (a, b) = s.split_once(',')?;
        Some(LatticePoint::new(a.trim().parse().ok()?, b.trim().parse().ok()?))
    }
}

impl fmt::Display for LatticePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.v1, self.v2)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Simplex {
    S1,
    S2,
}

impl RectDelta {
    pub fn new(d1: u32, d2: u32) -> Result<Self, PolytopeError> {
        if d1 < 3 || d2 < 3 {
            return Err(PolytopeError::TooSmall(d1, d2));
        }
        Ok(RectDelta { d1, d2 })
    }

    pub fn d1(&self) -> u32 {
        self.d1
    }

    pub fn d2(&self) -> u32 {
        self.d2
    }

    /// `D = d1·d2`.
    pub fn big_d(&self) -> u64 {
        self.d1 as u64 * self.d2 as u64
    }

    pub fn lcm(&self) -> u64 {
        (self.d1 as u64).lcm(&(self.d2 as u64))
    }

    pub fn gcd(&self) -> u64 {
        (self.d1 as u64).gcd(&(self.d2 as u64))
    }

    pub fn contains(&self, v: LatticePoint) -> bool {
        v.v1 <= self.d1 && v.v2 <= self.d2
    }

    /// Lattice points of `Δ` in point order.
    pub fn points(&self) -> Vec<LatticePoint> {
        self.points_up_to_weight_num(self.big_d())
    }

    /// The three nonzero vertices `(d1,0)`, `(0,d2)`, `(d1,d2)`.
    pub fn vertices(&self) -> [LatticePoint; 3] {
        [
            LatticePoint::new(self.d1, 0),
            LatticePoint::new(0, self.d2),
            LatticePoint::new(self.d1, self.d2),
        ]
    }

    /// `D·w(v)`.
    pub fn weight_num(&self, v: LatticePoint) -> u64 {
        (v.v1 as u64 * self.d2 as u64).max(v.v2 as u64 * self.d1 as u64)
    }

    pub fn weight(&self, v: LatticePoint) -> Q {
        q(self.weight_num(v) as i64, self.big_d() as i64)
    }

    pub fn simplex_class(&self, v: LatticePoint) -> Simplex {
        if v.v1 as u64 * self.d2 as u64 >= v.v2 as u64 * self.d1 as u64 {
            Simplex::S1
        } else {
            Simplex::S2
        }
    }

    /// Total order on points: weight, then `v1`, then `v2`.
    pub fn point_cmp(&self, a: &LatticePoint, b: &LatticePoint) -> Ordering {
        self.weight_num(*a)
            .cmp(&self.weight_num(*b))
            .then(a.v1.cmp(&b.v1))
            .then(a.v2.cmp(&b.v2))
    }

    pub fn sort_points(&self, pts: &mut [LatticePoint]) {
        pts.sort_by(|a, b| self.point_cmp(a, b));
    }

    /// `W_Δ(k) = #{v : w(v) = k/D}` by enumeration of the bounding box.
    pub fn w_count(&self, k: u64) -> u64 {
        let (b1, b2) = self.box_for(k);
        let mut n = 0;
        for a in 0..=b1 {
            for b in 0..=b2 {
                if self.weight_num(LatticePoint::new(a, b)) == k {
                    n += 1;
                }
            }
        }
        n
    }

    /// `H_Δ(k) = W(k) − 2W(k−D) + W(k−2D)`.
    pub fn h_count(&self, k: u64) -> i64 {
        let d = self.big_d();
        let w = |x: Option<u64>| x.map_or(0, |x| self.w_count(x) as i64);
        w(Some(k)) - 2 * w(k.checked_sub(d)) + w(k.checked_sub(2 * d))
    }

    /// `I_D = {0 ≤ n < D : d1 | n or d2 | n}`.
    pub fn i_set(&self) -> Vec<u64> {
        (0..self.big_d())
            .filter(|n| n % self.d1 as u64 == 0 || n % self.d2 as u64 == 0)
            .collect()
    }

    /// Predecessor of `n` in `I_D`.
    pub fn i_prev(&self, n: u64) -> Option<u64> {
        self.i_set().into_iter().filter(|&m| m < n).max()
    }

    /// `F_n = {v : w(v) ≤ n/D}` in point order.
    pub fn filtration(&self, n: u64) -> Vec<LatticePoint> {
        self.points_up_to_weight_num(n)
    }

    pub fn k_n(&self, n: u64) -> usize {
        (0..=n).map(|k| self.w_count(k) as usize).sum()
    }

    pub fn points_up_to_weight(&self, wmax: &Q) -> Vec<LatticePoint> {
        let num = (wmax * Q::from_integer(self.big_d().into())).floor();
        let num: u64 = num.to_integer().try_into().unwrap_or(0);
        self.points_up_to_weight_num(num)
    }

    /// Points with `D·w(v) ≤ num`, in point order.
    pub fn points_up_to_weight_num(&self, num: u64) -> Vec<LatticePoint> {
        let (b1, b2) = self.box_for(num);
        let mut pts = Vec::new();
        for a in 0..=b1 {
            for b in 0..=b2 {
                let v = LatticePoint::new(a, b);
                if self.weight_num(v) <= num {
                    pts.push(v);
                }
            }
        }
        self.sort_points(&mut pts);
        pts
    }

    /// Smallest weight numerator strictly above `num` that some point attains.
    pub fn next_weight_num(&self, num: u64) -> u64 {
        let a = (num / self.d2 as u64 + 1) * self.d2 as u64;
        let b = (num / self.d1 as u64 + 1) * self.d1 as u64;
        a.min(b)
    }

    /// Distinct weight numerators attained by points, up to `num`, ascending.
    pub fn weight_levels(&self, num: u64) -> Vec<u64> {
        let mut out = vec![0];
        loop {
            let n = self.next_weight_num(*out.last().unwrap());
            if n > num {
                return out;
            }
            out.push(n);
        }
    }

    fn box_for(&self, num: u64) -> (u32, u32) {
        ((num / self.d2 as u64) as u32, (num / self.d1 as u64) as u32)
    }
}
