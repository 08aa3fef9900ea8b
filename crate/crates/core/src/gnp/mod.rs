//! Closed-form generic Newton polygons: residue classes, assignment
//! minimization, `ε_n`/`β_n`, and the polygons assembled from them.

mod assign;
mod class;
mod cost;

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

pub use assign::{
    for_each_at_level, min_assignment, min_assignment_exhaustive, min_assignment_hungarian, perm_sign, Assignment,
    EXHAUSTIVE_LIMIT,
};
pub use class::ResidueClass;
pub use cost::{cost_matrix, entry_cost, CostMatrix, CostModel, CostSpec};

use crate::exec::Exec;
use crate::padic::is_prime;
use crate::polygon::{hodge_c, NewtonPolygon, PolygonError, SlopeMultiset, Valuation};
use crate::polytope::{LatticePoint, RectDelta};
use crate::rat::{fmt_q, q, qi, Q};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GnpError {
    #[error("every permutation uses a forbidden entry")]
    Infeasible,
    #[error("prime {p} is not in residue class {class}")]
    ResidueMismatch { p: u64, class: String },
    #[error("{0} is not a prime coprime to D")]
    BadPrime(u64),
    #[error("bad residue class: {0}")]
    BadClass(String),
    #[error("enumeration needs {needed} steps, budget is {budget}")]
    Budget { needed: u64, budget: u64 },
    #[error(transparent)]
    Polygon(#[from] PolygonError),
}

/// One row of the formula: the `I_D` element `n` with its assignment data.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SlopeTerm {
    pub n: u64,
    /// `W_Δ(n)`.
    pub w: u64,
    /// `|F_n|`.
    pub k_n: usize,
    /// `M_{F_n}`, including any level correction `ℓ/D`.
    #[serde(with = "crate::rat::serde_q")]
    pub m: Q,
    #[serde(with = "crate::rat::serde_q")]
    pub eps: Q,
    pub level: u64,
    /// Optimal permutation of `F_n` (indices into the point order).
    pub witness: Vec<usize>,
}

impl SlopeTerm {
    /// `β_n(t) = n/D + ε_n/(t−1)`.
    pub fn beta(&self, big_d: u64, t: u64) -> Q {
        q(self.n as i64, big_d as i64) + &self.eps / qi(t as i64 - 1)
    }
}

/// The `ε_n` table of a residue class under a cost model.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GnpFormula {
    pub delta: RectDelta,
    pub class: ResidueClass,
    pub model: CostModel,
    pub terms: Vec<SlopeTerm>,
}

/// `M_S` for the point list `pts` under `spec`.
pub fn m_value(delta: &RectDelta, spec: CostSpec, pts: &[LatticePoint], exec: Exec) -> Result<Assignment, GnpError> {
    min_assignment(&cost_matrix(delta, spec, pts), exec)
}

impl GnpFormula {
    pub fn new(delta: &RectDelta, class: ResidueClass, model: CostModel, exec: Exec) -> Result<Self, GnpError> {
        Self::with_levels(delta, class, model, &BTreeMap::new(), exec)
    }

    /// Like [`GnpFormula::new`] with `M_{F_n}` raised by `ℓ_n/D` for the
    /// given levels.
    pub fn with_levels(
        delta: &RectDelta,
        class: ResidueClass,
        model: CostModel,
        levels: &BTreeMap<u64, u64>,
        exec: Exec,
    ) -> Result<Self, GnpError> {
        let big_d = delta.big_d() as i64;
        let mut terms: Vec<SlopeTerm> = Vec::new();
        for n in delta.i_set() {
            let pts = delta.filtration(n);
            let a = m_value(delta, CostSpec::Class(class, model), &pts, exec)?;
            let level = levels.get(&n).copied().unwrap_or(0);
            let m = a.value() + q(level as i64, big_d);
            let w = delta.w_count(n);
            let eps = match terms.last() {
                None => Q::zero(),
                Some(prev) => (&m - &prev.m) / qi(w as i64),
            };
            terms.push(SlopeTerm {
                n,
                w,
                k_n: pts.len(),
                m,
                eps,
                level,
                witness: a.perm,
            });
        }
        Ok(GnpFormula {
            delta: *delta,
            class,
            model,
            terms,
        })
    }

    pub fn term(&self, n: u64) -> Option<&SlopeTerm> {
        self.terms.iter().find(|t| t.n == n)
    }

    pub fn epsilon(&self, n: u64) -> Option<&Q> {
        self.term(n).map(|t| &t.eps)
    }

    fn check_prime(&self, p: u64) -> Result<(), GnpError> {
        if !is_prime(p) || self.delta.big_d() % p == 0 {
            return Err(GnpError::BadPrime(p));
        }
        if !self.class.contains(&self.delta, p) {
            return Err(GnpError::ResidueMismatch {
                p,
                class: self.class.to_string(),
            });
        }
        Ok(())
    }

    /// `β_n(t)` for each term, in `I_D` order. `t` need not be prime.
    pub fn betas(&self, t: u64) -> Vec<(u64, Q)> {
        self.terms
            .iter()
            .map(|s| (s.n, s.beta(self.delta.big_d(), t)))
            .collect()
    }

    /// `∐_{n ∈ I_D} β_n(p)^{W(n)}`.
    pub fn snp_slopes(&self, p: u64) -> Result<SlopeMultiset, GnpError> {
        self.check_prime(p)?;
        Ok(SlopeMultiset::from_pairs(
            self.terms.iter().map(|s| (s.beta(self.delta.big_d(), p), s.w)),
        ))
    }

    /// The piecewise-linear function through `(k_n, Σ_{m ≤ n} W(m)β_m)`.
    ///
    /// This is a Newton polygon only when the `β_n` are nondecreasing; the
    /// vertices are returned unconvexified so that violations stay visible.
    pub fn snp(&self, p: u64) -> Result<NewtonPolygon, GnpError> {
        self.check_prime(p)?;
        let mut x = 0u64;
        let mut y = Q::zero();
        let mut pts = vec![(0u64, Valuation::Finite(Q::zero()))];
        for s in &self.terms {
            x += s.w;
            y += s.beta(self.delta.big_d(), p) * qi(s.w as i64);
            pts.push((x, Valuation::Finite(y.clone())));
        }
        Ok(NewtonPolygon::from_valuations(&pts)?)
    }

    /// True when `β_n(p)` is nondecreasing along `I_D`.
    pub fn is_convex_at(&self, p: u64) -> bool {
        let b = self.betas(p);
        b.windows(2).all(|w| w[0].1 <= w[1].1)
    }

    /// `∐ {β_n, 2 − β_n}^{W(n)}`.
    pub fn gnp_l(&self, p: u64) -> Result<SlopeMultiset, GnpError> {
        self.check_prime(p)?;
        Ok(self.gnp_l_t(p))
    }

    fn gnp_l_t(&self, t: u64) -> SlopeMultiset {
        let mut out = SlopeMultiset::new();
        for s in &self.terms {
            let b = s.beta(self.delta.big_d(), t);
            out.add(qi(2) - &b, s.w);
            out.add(b, s.w);
        }
        out
    }

    /// `∐_{i ≥ 1} ∐_n {i−1+β_n, i+1−β_n}^{i·W(n)}`, slopes `≤ bound`.
    pub fn gnp_c(&self, p: u64, bound: &Q) -> Result<SlopeMultiset, GnpError> {
        self.gnp_c_m(p, 1, bound)
    }

    /// Level-`m` analogue of [`GnpFormula::gnp_l`]: with `P = p^{m−1}`,
    /// `∐_{i=1}^{2P−1} ∐_n {(i−1+β_n)/P, (i+1−β_n)/P}^{N(i)·W(n)}` where
    /// `N(i) = i` for `i ≤ P` and `2P − i` above.
    pub fn gnp_l_m(&self, p: u64, m: u32) -> Result<SlopeMultiset, GnpError> {
        self.check_prime(p)?;
        let pp = big_p(p, m);
        let mut out = SlopeMultiset::new();
        for i in 1..2 * pp {
            let ni = if i <= pp { i } else { 2 * pp - i };
            for s in &self.terms {
                let b = s.beta(self.delta.big_d(), p);
                out.add((qi(i as i64 - 1) + &b) / qi(pp as i64), ni * s.w);
                out.add((qi(i as i64 + 1) - &b) / qi(pp as i64), ni * s.w);
            }
        }
        Ok(out)
    }

    /// `∐_{i ≥ 1} ∐_n {(i−1+β_n)/P, (i+1−β_n)/P}^{i·W(n)}`, slopes `≤ bound`.
    pub fn gnp_c_m(&self, p: u64, m: u32, bound: &Q) -> Result<SlopeMultiset, GnpError> {
        self.check_prime(p)?;
        let pp = qi(big_p(p, m) as i64);
        let mut out = SlopeMultiset::new();
        let mut i = 1i64;
        while qi(i - 1) / &pp <= *bound {
            for s in &self.terms {
                let b = s.beta(self.delta.big_d(), p);
                for slope in [(qi(i - 1) + &b) / &pp, (qi(i + 1) - &b) / &pp] {
                    if slope <= *bound {
                        out.add(slope, i as u64 * s.w);
                    }
                }
            }
            i += 1;
        }
        Ok(out)
    }

    /// `∐_{k=1}^m GNP_L(Δ, k, p)^{p^{k−1}(p−1)}`.
    pub fn zeta_polygon(&self, p: u64, m: u32) -> Result<SlopeMultiset, GnpError> {
        let mut out = SlopeMultiset::new();
        for k in 1..=m {
            out = out.union(&self.gnp_l_m(p, k)?.repeat(big_p(p, k) * (p - 1)));
        }
        Ok(out)
    }

    /// Gap between the formula polygon and `HP_C` at each `x = k_n`.
    pub fn gap_to_hodge(&self, p: u64) -> Result<Vec<HodgeGap>, GnpError> {
        let snp = self.snp(p)?;
        let top = q(self.terms.last().map_or(0, |t| t.n) as i64, self.delta.big_d() as i64);
        let hc = hodge_c(&self.delta, &top);
        let pm1 = qi(p as i64 - 1);
        let mut x = 0u64;
        let mut y = Q::zero();
        let mut out = Vec::new();
        for s in &self.terms {
            x += s.w;
            y += s.beta(self.delta.big_d(), p) * qi(s.w as i64);
            let gap = &y - hc.value_at(x).expect("hodge polygon covers [0, D]");
            out.push(HodgeGap {
                n: s.n,
                x,
                gap,
                cumulative: &s.m / &pm1,
                per_segment: &s.eps / &pm1,
                on_polygon: snp.value_at(x) == Some(y.clone()),
            });
        }
        Ok(out)
    }

    /// Table row per term with `M`, `ε` and `β_n(p)` at each prime.
    pub fn to_json(&self, primes: &[u64]) -> Value {
        let rows: Vec<Value> = self
            .terms
            .iter()
            .map(|s| {
                let betas: serde_json::Map<String, Value> = primes
                    .iter()
                    .map(|&p| (p.to_string(), json!(fmt_q(&s.beta(self.delta.big_d(), p)))))
                    .collect();
                json!({
                    "n": s.n,
                    "W": s.w,
                    "k_n": s.k_n,
                    "M": fmt_q(&s.m),
                    "eps": fmt_q(&s.eps),
                    "level": s.level,
                    "beta": betas,
                })
            })
            .collect();
        json!({
            "d1": self.delta.d1(),
            "d2": self.delta.d2(),
            "class": [self.class.r1, self.class.r2],
            "model": self.model,
            "rows": rows,
        })
    }
}

fn big_p(p: u64, m: u32) -> u64 {
    assert!(m >= 1, "character level starts at 1");
    p.pow(m - 1)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HodgeGap {
    pub n: u64,
    pub x: u64,
    #[serde(with = "crate::rat::serde_q")]
    pub gap: Q,
    /// `M_{F_n}/(p−1)`.
    #[serde(with = "crate::rat::serde_q")]
    pub cumulative: Q,
    /// `ε_n/(p−1)`.
    #[serde(with = "crate::rat::serde_q")]
    pub per_segment: Q,
    /// Whether `(x, y)` lies on the convexified polygon.
    pub on_polygon: bool,
}

/// Hull of `(k, min_S Σ w(S) + M_S/(p−1))` over the minimal-weight
/// `k`-subsets `S`, for `k ≤ kmax`.
///
/// `budget` caps the number of assignment problems solved.
pub fn gnp_brute(
    delta: &RectDelta,
    spec: CostSpec,
    p: u64,
    kmax: usize,
    budget: u64,
    exec: Exec,
) -> Result<NewtonPolygon, GnpError> {
    let pts = delta.points_up_to_weight_num(kmax as u64 * delta.big_d());
    let pts = &pts[..kmax.min(pts.len())];
    let mut needed = 0u64;
    let mut jobs: Vec<(usize, Vec<LatticePoint>)> = Vec::new();
    let all = delta.points_up_to_weight_num(delta.weight_num(*pts.last().unwrap_or(&LatticePoint::ORIGIN)));
    for k in 1..=pts.len() {
        let wk = delta.weight_num(pts[k - 1]);
        let below: Vec<LatticePoint> = all.iter().copied().filter(|v| delta.weight_num(*v) < wk).collect();
        let level: Vec<LatticePoint> = all.iter().copied().filter(|v| delta.weight_num(*v) == wk).collect();
        let r = k - below.len();
        let subsets = binomial(level.len() as u64, r as u64);
        needed = needed.saturating_add(subsets);
        if needed > budget {
            return Err(GnpError::Budget { needed, budget });
        }
        for combo in combinations(level.len(), r) {
            let mut s = below.clone();
            s.extend(combo.iter().map(|&i| level[i]));
            jobs.push((k, s));
        }
    }
    let pm1 = qi(p as i64 - 1);
    let values = exec.map_slice(&jobs, |(k, s)| {
        let a = min_assignment(&cost_matrix(delta, spec, s), Exec::Sequential);
        let wsum: Q = s.iter().map(|v| delta.weight(*v)).sum();
        (*k, a.map(|a| wsum + a.value() / &pm1))
    });
    let mut best: BTreeMap<usize, Option<Q>> = BTreeMap::new();
    for (k, v) in values {
        let e = best.entry(k).or_insert(None);
        if let Ok(v) = v {
            if e.as_ref().is_none_or(|b| v < *b) {
                *e = Some(v);
            }
        }
    }
    let mut pts_v = vec![(0u64, Valuation::Finite(Q::zero()))];
    for (k, v) in best {
        pts_v.push((k as u64, v.map_or(Valuation::Infinite, Valuation::Finite)));
    }
    Ok(NewtonPolygon::from_valuations(&pts_v)?)
}

fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u64, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

/// `r`-subsets of `0..n` in lexicographic order.
fn combinations(n: usize, r: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(r);
    fn rec(start: usize, n: usize, r: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < r - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, r, cur, out);
            cur.pop();
        }
    }
    rec(0, n, r, &mut cur, &mut out);
    out
}

/// Weighted arithmetic progression of a base multiset: with `P = p^{m−1}`,
/// `∐_{i=1}^{2P−1} ∐_j ((i−1+α_j)/P)^{N(i)}`.
pub fn weighted_progression(base: &SlopeMultiset, p: u64, m: u32) -> SlopeMultiset {
    let pp = big_p(p, m);
    let mut out = SlopeMultiset::new();
    for i in 1..2 * pp {
        let ni = if i <= pp { i } else { 2 * pp - i };
        for (a, mult) in base.iter() {
            out.add((qi(i as i64 - 1) + a) / qi(pp as i64), ni * mult);
        }
    }
    out
}

/// One slope bucket `(i−1, i]` of the characteristic series.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EigenBucket {
    pub i: u64,
    pub computed: u64,
    pub claimed: u64,
    pub matches: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EigenReport {
    /// Multiplicity of slope 0.
    pub slope_zero: u64,
    /// Half the multiplicity of slope 1 in the L-multiset.
    pub delta_correction: u64,
    pub buckets: Vec<EigenBucket>,
}

/// Degrees of the slope clusters `(i−1, i]` of `c` for `i ≤ i_max`,
/// compared with `(2i−1)·D + 1 + δ`.
///
/// `c` must be complete up to slope `i_max`, and `l` is the L-multiset
/// whose slope-1 multiplicity defines `δ = mult/2`.
pub fn eigencurve_components(
    c: &SlopeMultiset,
    known_up_to: &Q,
    l: &SlopeMultiset,
    delta: &RectDelta,
    i_max: u64,
) -> Result<EigenReport, GnpError> {
    if *known_up_to < qi(i_max as i64) {
        return Err(PolygonError::IncompleteInput {
            known: fmt_q(known_up_to),
            needed: i_max.to_string(),
        }
        .into());
    }
    let delta_correction = l.multiplicity(&Q::one()) / 2;
    let slope_zero = c.multiplicity(&Q::zero());
    let buckets = (1..=i_max)
        .map(|i| {
            let lo = qi(i as i64 - 1);
            let hi = qi(i as i64);
            let computed = c.iter().filter(|(s, _)| **s > lo && **s <= hi).map(|(_, m)| m).sum();
            let claimed = (2 * i - 1) * delta.big_d() + 1 + delta_correction;
            EigenBucket {
                i,
                computed,
                claimed,
                matches: computed == claimed,
            }
        })
        .collect();
    Ok(EigenReport {
        slope_zero,
        delta_correction,
        buckets,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polygon::hodge_l_slopes;

    fn d33() -> RectDelta {
        RectDelta::new(3, 3).unwrap()
    }

    fn ms(pairs: &[((i64, i64), u64)]) -> SlopeMultiset {
        SlopeMultiset::from_pairs(pairs.iter().map(|&((n, d), m)| (q(n, d), m)))
    }

    fn cls(r1: u32, r2: u32) -> ResidueClass {
        ResidueClass::new(&d33(), r1, r2).unwrap()
    }

    #[test]
    fn residue_costs() {
        let d = d33();
        let spec = CostSpec::Class(cls(2, 2), CostModel::Residue);
        let c = |a: (u32, u32), b: (u32, u32)| {
            entry_cost(&d, spec, LatticePoint::new(a.0, a.1), LatticePoint::new(b.0, b.1))
        };
        assert_eq!(c((1, 0), (1, 0)), Some(6));
        assert_eq!(c((1, 0), (0, 1)), None);
        assert_eq!(c((0, 0), (0, 0)), Some(0));
        assert_eq!(c((0, 0), (1, 0)), None);
    }

    #[test]
    fn goldens_for_class_two_two() {
        let d = d33();
        let f = GnpFormula::new(&d, cls(2, 2), CostModel::Residue, Exec::default()).unwrap();
        let ms_: Vec<Q> = f.terms.iter().map(|t| t.m.clone()).collect();
        assert_eq!(ms_, vec![qi(0), qi(2), q(11, 3)]);
        assert_eq!(f.epsilon(3), Some(&q(2, 3)));
        assert_eq!(f.epsilon(6), Some(&q(1, 3)));
        let snp = f.snp(5).unwrap();
        assert_eq!(snp.slopes(), ms(&[((0, 1), 1), ((1, 2), 3), ((3, 4), 5)]));
        assert_eq!(snp.vertices(), &[(0, qi(0)), (1, qi(0)), (4, q(3, 2)), (9, q(21, 4))]);
        assert!(snp.lies_above(&hodge_c(&d, &q(2, 3)).truncate(9).unwrap()));
        assert_eq!(
            f.snp(7),
            Err(GnpError::ResidueMismatch {
                p: 7,
                class: "(2,2)".into()
            })
        );
    }

    #[test]
    fn ceiling_model_at_five() {
        let d = d33();
        let f = GnpFormula::new(&d, cls(2, 2), CostModel::Ceiling, Exec::default()).unwrap();
        assert_eq!(f.epsilon(3), Some(&q(2, 3)));
        assert_eq!(f.epsilon(6), Some(&q(-4, 15)));
        assert_eq!(f.snp_slopes(5).unwrap(), ms(&[((0, 1), 1), ((1, 2), 3), ((3, 5), 5)]));
        // subsets other than the F_n do better at p = 5
        let brute = gnp_brute(&d, CostSpec::AtPrime(5), 5, 9, 10_000, Exec::default()).unwrap();
        assert_eq!(brute.vertices(), &[(0, qi(0)), (1, qi(0)), (7, qi(3)), (9, q(9, 2))]);
    }

    #[test]
    fn ceiling_formal_matches_large_primes() {
        let d = RectDelta::new(3, 4).unwrap();
        for class in ResidueClass::all_nontrivial(&d) {
            let Some(p) = class.prime_above(&d, 2 * d.big_d() * d.big_d()) else {
                continue;
            };
            let pts = d.points_up_to_weight_num(2 * d.big_d());
            let formal = cost_matrix(&d, CostSpec::Class(class, CostModel::Ceiling), &pts);
            let at_p = cost_matrix(&d, CostSpec::AtPrime(p), &pts);
            assert_eq!(formal, at_p, "class {class}, p={p}");
        }
    }

    #[test]
    fn gnp_l_and_friends() {
        let d = d33();
        let f = GnpFormula::new(&d, cls(2, 2), CostModel::Residue, Exec::default()).unwrap();
        let l = f.gnp_l(5).unwrap();
        assert_eq!(
            l,
            ms(&[
                ((0, 1), 1),
                ((1, 2), 3),
                ((3, 4), 5),
                ((5, 4), 5),
                ((3, 2), 3),
                ((2, 1), 1)
            ])
        );
        assert_eq!(l.weighted_sum(), qi(18));
        assert_eq!(
            f.gnp_c(5, &qi(1)).unwrap(),
            ms(&[((0, 1), 1), ((1, 2), 3), ((3, 4), 5), ((1, 1), 2)])
        );
        assert_eq!(f.gnp_c(5, &qi(0)).unwrap(), ms(&[((0, 1), 1)]));
        let c2 = f.gnp_c(5, &qi(2)).unwrap();
        // i = 2 contributes 2·W(3) = 6 at 1 + β_3, and i = 1 adds 2 − β_3 = 3/2
        assert_eq!(c2.multiplicity(&(qi(1) + q(1, 2))), 6 + 3);
        assert_eq!(f.gnp_l_m(5, 1).unwrap(), l);
        let l2 = f.gnp_l_m(5, 2).unwrap();
        assert_eq!(l2.total(), 450);
        assert_eq!(l2.iter().find(|(s, _)| !s.is_zero()).unwrap().0, &q(1, 10));
        assert_eq!(weighted_progression(&l, 5, 2), l2);
        assert_eq!(f.zeta_polygon(5, 1).unwrap().total(), 72);
        assert_eq!(f.zeta_polygon(5, 2).unwrap().total(), 9072);
        // the p → ∞ limit of gnp_l is the symmetric hull, not HP_L
        let limit = f.gnp_l_t(1_000_000_007);
        assert_eq!(limit.total(), hodge_l_slopes(&d).total());
        assert_ne!(limit.truncate_at(&q(1, 1)), hodge_l_slopes(&d).truncate_at(&q(1, 1)));
    }

    #[test]
    fn gaps_and_eigencurve() {
        let d = d33();
        let f = GnpFormula::new(&d, cls(2, 2), CostModel::Residue, Exec::default()).unwrap();
        let g = f.gap_to_hodge(5).unwrap();
        assert_eq!(g[0].gap, qi(0));
        assert_eq!(
            (g[1].x, g[1].gap.clone(), g[1].cumulative.clone()),
            (4, q(1, 2), q(1, 2))
        );
        let mut prev = None;
        for p in [5u64, 11, 17, 23] {
            if !f.class.contains(&d, p) {
                continue;
            }
            let last = f.gap_to_hodge(p).unwrap().last().unwrap().gap.clone();
            if let Some(pr) = prev {
                assert!(last < pr);
            }
            prev = Some(last);
        }
        let c = f.gnp_c(5, &qi(3)).unwrap();
        let l = f.gnp_l(5).unwrap();
        let rep = eigencurve_components(&c, &qi(3), &l, &d, 3).unwrap();
        assert_eq!(rep.slope_zero, 1);
        assert_eq!(rep.buckets[0].computed, 10);
        assert_eq!(rep.buckets[0].claimed, 10);
        assert_eq!(rep.buckets[1].computed, 28);
        let total: u64 = rep.buckets.iter().map(|b| b.computed).sum();
        assert_eq!(total + rep.slope_zero, c.total());
        assert!(eigencurve_components(&c, &qi(2), &l, &d, 3).is_err());
    }

    #[test]
    fn brute_force_matches_formula_above_threshold() {
        let d = d33();
        let f = GnpFormula::new(&d, cls(2, 2), CostModel::Residue, Exec::default()).unwrap();
        let brute = gnp_brute(
            &d,
            CostSpec::Class(cls(2, 2), CostModel::Residue),
            83,
            9,
            10_000,
            Exec::default(),
        )
        .unwrap();
        assert_eq!(brute, f.snp(83).unwrap());
        let one = gnp_brute(&d, CostSpec::AtPrime(5), 5, 1, 10, Exec::default()).unwrap();
        assert_eq!(one.slopes(), ms(&[((0, 1), 1)]));
        assert!(matches!(
            gnp_brute(&d, CostSpec::AtPrime(5), 5, 9, 3, Exec::default()),
            Err(GnpError::Budget { .. })
        ));
    }
}
