//! Exact Newton polygons and slope multisets.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::polytope::RectDelta;
use crate::rat::{fmt_q, parse_q, q, qi, Q};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolygonError {
    #[error("no finite points to build a polygon from")]
    EmptyInput,
    #[error("abscissa {0} outside polygon of length {1}")]
    OutOfRange(u64, u64),
    #[error("slope multiset only known up to {known}, need {needed}")]
    IncompleteInput { known: String, needed: String },
    #[error("negative multiplicity {mult} at slope {slope}")]
    NegativeMultiplicity { slope: String, mult: i64 },
    #[error("malformed polygon data: {0}")]
    Malformed(String),
}

/// A coefficient valuation, with `∞` kept distinct from every finite value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Valuation {
    Finite(Q),
    Infinite,
}

/// Slopes with positive multiplicities, ordered by slope.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SlopeMultiset {
    map: BTreeMap<Q, u64>,
}

impl SlopeMultiset {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs<I: IntoIterator<Item = (Q, u64)>>(pairs: I) -> Self {
        let mut s = Self::new();
        for (slope, m) in pairs {
            s.add(slope, m);
        }
        s
    }

    pub fn add(&mut self, slope: Q, mult: u64) {
        if mult > 0 {
            *self.map.entry(slope).or_insert(0) += mult;
        }
    }

    pub fn multiplicity(&self, slope: &Q) -> u64 {
        self.map.get(slope).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.map.values().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Q, u64)> {
        self.map.iter().map(|(s, &m)| (s, m))
    }

    /// `Σ slope·multiplicity`.
    pub fn weighted_sum(&self) -> Q {
        self.iter().fold(Q::zero(), |acc, (s, m)| acc + s * qi(m as i64))
    }

    pub fn union(&self, other: &SlopeMultiset) -> SlopeMultiset {
        let mut out = self.clone();
        for (s, m) in other.iter() {
            out.add(s.clone(), m);
        }
        out
    }

    /// Each multiplicity multiplied by `k`.
    pub fn repeat(&self, k: u64) -> SlopeMultiset {
        SlopeMultiset::from_pairs(self.iter().map(|(s, m)| (s.clone(), m * k)))
    }

    /// Slopes `≤ bound`.
    pub fn truncate_at(&self, bound: &Q) -> SlopeMultiset {
        SlopeMultiset::from_pairs(self.iter().filter(|(s, _)| *s <= bound).map(|(s, m)| (s.clone(), m)))
    }

    /// The `n` smallest slopes (with multiplicity).
    pub fn first(&self, n: u64) -> SlopeMultiset {
        let mut left = n;
        let mut out = SlopeMultiset::new();
        for (s, m) in self.iter() {
            if left == 0 {
                break;
            }
            let take = m.min(left);
            out.add(s.clone(), take);
            left -= take;
        }
        out
    }

    /// `s ↦ c − s` applied to every slope.
    pub fn reflect(&self, c: &Q) -> SlopeMultiset {
        SlopeMultiset::from_pairs(self.iter().map(|(s, m)| (c - s, m)))
    }

    /// Slopes in ascending order, repeated by multiplicity.
    pub fn expanded(&self) -> Vec<Q> {
        self.iter()
            .flat_map(|(s, m)| std::iter::repeat(s.clone()).take(m as usize))
            .collect()
    }

    pub fn to_polygon(&self) -> NewtonPolygon {
        NewtonPolygon::from_slopes(self)
    }
}

impl fmt::Display for SlopeMultiset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.iter().map(|(s, m)| format!("{}^{}", fmt_q(s), m)).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

/// Lower convex polygon starting at `(0,0)` with integer breakpoints.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NewtonPolygon {
    vertices: Vec<(u64, Q)>,
}

impl NewtonPolygon {
    pub fn trivial() -> Self {
        NewtonPolygon {
            vertices: vec![(0, Q::zero())],
        }
    }

    /// Lower convex hull of the finite points; infinite points are skipped.
    pub fn from_valuations(points: &[(u64, Valuation)]) -> Result<Self, PolygonError> {
        let mut pts: Vec<(u64, Q)> = points
            .iter()
            .filter_map(|(k, v)| match v {
                Valuation::Finite(x) => Some((*k, x.clone())),
                Valuation::Infinite => None,
            })
            .collect();
        if pts.is_empty() {
            return Err(PolygonError::EmptyInput);
        }
        pts.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.cmp(&b.1)));
        pts.dedup_by(|b, a| a.0 == b.0);
        Ok(NewtonPolygon {
            vertices: lower_hull(&pts),
        })
    }

    pub fn from_slopes(slopes: &SlopeMultiset) -> Self {
        let mut vertices = vec![(0u64, Q::zero())];
        for (s, m) in slopes.iter() {
            let (x, y) = vertices.last().unwrap().clone();
            vertices.push((x + m, y + s * qi(m as i64)));
        }
        NewtonPolygon { vertices }
    }

    /// Builds a polygon directly from vertex coordinates, checking convexity.
    pub fn from_vertices(vertices: Vec<(u64, Q)>) -> Result<Self, PolygonError> {
        if vertices.first() != Some(&(0, Q::zero())) {
            return Err(PolygonError::Malformed("must start at (0,0)".into()));
        }
        let mut last: Option<Q> = None;
        for w in vertices.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(PolygonError::Malformed("abscissas not increasing".into()));
            }
            let s = (&w[1].1 - &w[0].1) / qi((w[1].0 - w[0].0) as i64);
            if let Some(l) = &last {
                if &s < l {
                    return Err(PolygonError::Malformed("not lower convex".into()));
                }
            }
            last = Some(s);
        }
        let pts = vertices;
        Ok(NewtonPolygon {
            vertices: lower_hull(&pts),
        })
    }

    pub fn vertices(&self) -> &[(u64, Q)] {
        &self.vertices
    }

    pub fn length(&self) -> u64 {
        self.vertices.last().unwrap().0
    }

    pub fn slopes(&self) -> SlopeMultiset {
        let mut s = SlopeMultiset::new();
        for w in self.vertices.windows(2) {
            let run = w[1].0 - w[0].0;
            s.add((&w[1].1 - &w[0].1) / qi(run as i64), run);
        }
        s
    }

    /// Height of the polygon at abscissa `x`.
    pub fn value_at(&self, x: u64) -> Option<Q> {
        if x > self.length() {
            return None;
        }
        let i = self.vertices.iter().position(|v| v.0 >= x).unwrap();
        let (x1, y1) = &self.vertices[i];
        if *x1 == x || i == 0 {
            return Some(y1.clone());
        }
        let (x0, y0) = &self.vertices[i - 1];
        Some(y0 + (y1 - y0) * q((x - x0) as i64, (x1 - x0) as i64))
    }

    /// The sub-polygon on `[0, x0]`.
    pub fn truncate(&self, x0: u64) -> Result<Self, PolygonError> {
        if x0 > self.length() {
            return Err(PolygonError::OutOfRange(x0, self.length()));
        }
        let mut v: Vec<(u64, Q)> = self.vertices.iter().filter(|p| p.0 < x0).cloned().collect();
        if x0 > 0 || v.is_empty() {
            v.push((x0, self.value_at(x0).unwrap()));
        }
        Ok(NewtonPolygon { vertices: v })
    }

    /// `self(x) ≥ other(x)` at every integer abscissa of the common range.
    pub fn lies_above(&self, other: &NewtonPolygon) -> bool {
        let n = self.length().min(other.length());
        (0..=n).all(|x| self.value_at(x).unwrap() >= other.value_at(x).unwrap())
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("polygon serializes")
    }
}

impl fmt::Display for NewtonPolygon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .vertices
            .iter()
            .map(|(x, y)| format!("({},{})", x, fmt_q(y)))
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

fn cross(o: &(u64, Q), a: &(u64, Q), b: &(u64, Q)) -> Q {
    let ax = qi(a.0 as i64 - o.0 as i64);
    let bx = qi(b.0 as i64 - o.0 as i64);
    ax * (&b.1 - &o.1) - (&a.1 - &o.1) * bx
}

/// Monotone-chain lower hull of points sorted by abscissa.
fn lower_hull(pts: &[(u64, Q)]) -> Vec<(u64, Q)> {
    let mut hull: Vec<(u64, Q)> = Vec::new();
    for p in pts {
        while hull.len() >= 2 && !cross(&hull[hull.len() - 2], &hull[hull.len() - 1], p).is_positive() {
            hull.pop();
        }
        hull.push(p.clone());
    }
    hull
}

#[derive(Serialize, Deserialize)]
struct SlopeEntry {
    s: String,
    m: u64,
}

#[derive(Serialize, Deserialize)]
struct PolygonJson {
    vertices: Vec<[String; 2]>,
    slopes: Vec<SlopeEntry>,
}

impl Serialize for NewtonPolygon {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        PolygonJson {
            vertices: self.vertices.iter().map(|(x, y)| [x.to_string(), fmt_q(y)]).collect(),
            slopes: self
                .slopes()
                .iter()
                .map(|(s, m)| SlopeEntry { s: fmt_q(s), m })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for NewtonPolygon {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let raw = PolygonJson::deserialize(d)?;
        let mut vertices = Vec::new();
        for [x, y] in raw.vertices {
            let x: u64 = x.parse().map_err(D::Error::custom)?;
            let y = parse_q(&y).ok_or_else(|| D::Error::custom("bad rational"))?;
            vertices.push((x, y));
        }
        NewtonPolygon::from_vertices(vertices).map_err(D::Error::custom)
    }
}

impl Serialize for SlopeMultiset {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let v: Vec<SlopeEntry> = self.iter().map(|(s, m)| SlopeEntry { s: fmt_q(s), m }).collect();
        v.serialize(s)
    }
}

impl<'de> Deserialize<'de> for SlopeMultiset {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let raw = Vec::<SlopeEntry>::deserialize(d)?;
        let mut out = SlopeMultiset::new();
        for e in raw {
            out.add(parse_q(&e.s).ok_or_else(|| D::Error::custom("bad rational"))?, e.m);
        }
        Ok(out)
    }
}

/// Slopes `(k/D)^{W(k)}` for all weights `k/D ≤ weight_bound`.
pub fn hodge_c_slopes(delta: &RectDelta, weight_bound: &Q) -> SlopeMultiset {
    let d = delta.big_d();
    let bound = (weight_bound * qi(d as i64)).floor().to_integer();
    let bound: u64 = bound.try_into().unwrap_or(0);
    SlopeMultiset::from_pairs((0..=bound).map(|k| (q(k as i64, d as i64), delta.w_count(k))))
}

pub fn hodge_c(delta: &RectDelta, weight_bound: &Q) -> NewtonPolygon {
    hodge_c_slopes(delta, weight_bound).to_polygon()
}

pub fn hodge_l_slopes(delta: &RectDelta) -> SlopeMultiset {
    let d = delta.big_d();
    SlopeMultiset::from_pairs((0..=2 * d).map(|k| (q(k as i64, d as i64), delta.h_count(k).max(0) as u64)))
}

pub fn hodge_l(delta: &RectDelta) -> NewtonPolygon {
    hodge_l_slopes(delta).to_polygon()
}

/// Slope-level form of products of shifted series:
/// returns `Σ_j w_j·(C + shift_j)` restricted to slopes `≤ bound`.
///
/// `known_up_to` is the largest slope up to which `c` is complete; it must
/// cover `bound − min shift`.
pub fn twist_merge(
    c: &SlopeMultiset,
    known_up_to: &Q,
    shifts: &[(Q, i64)],
    bound: &Q,
) -> Result<SlopeMultiset, PolygonError> {
    if shifts.is_empty() {
        return Ok(SlopeMultiset::new());
    }
    let min_shift = shifts.iter().map(|(s, _)| s).min().unwrap();
    let needed = bound - min_shift;
    if known_up_to < &needed {
        return Err(PolygonError::IncompleteInput {
            known: fmt_q(known_up_to),
            needed: fmt_q(&needed),
        });
    }
    let mut acc: BTreeMap<Q, i64> = BTreeMap::new();
    for (shift, weight) in shifts {
        for (s, m) in c.iter() {
            let t = s + shift;
            if &t <= bound {
                *acc.entry(t).or_insert(0) += weight * m as i64;
            }
        }
    }
    let mut out = SlopeMultiset::new();
    for (s, m) in acc {
        if m < 0 {
            return Err(PolygonError::NegativeMultiplicity {
                slope: fmt_q(&s),
                mult: m,
            });
        }
        out.add(s, m as u64);
    }
    Ok(out)
}
