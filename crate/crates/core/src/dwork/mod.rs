//! Truncated Dwork matrices, characteristic series `C_f*(T,s)` and the
//! Newton polygons extracted from them.

mod bounds;
mod charpoly;
mod flat;
mod grid;
mod matrix;
mod walks;

use num_traits::ToPrimitive;
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

pub use bounds::order_lower_bounds;
pub use matrix::DworkMatrix;

use crate::exec::Exec;
use crate::fpoly::FPoly;
use crate::padic::{specialize_t_unchecked, CycResidue, GaloisRing, PadicError, PiValuation, SeriesOrder, TSeries};
use crate::polygon::{hodge_c, NewtonPolygon, PolygonError, SlopeMultiset, Valuation};
use crate::polytope::RectDelta;
use crate::rat::{ceil_q, fmt_q, q, qi, Q};
use flat::Flat;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DworkError {
    #[error("bad input: {0}")]
    BadInput(String),
    #[error("T-precision {have} below the required {need}")]
    PrecisionExhausted { need: usize, have: usize },
    #[error("enumeration needs {needed} steps, budget is {budget}")]
    Budget { needed: u64, budget: u64 },
    #[error("incomplete input: {0}")]
    IncompleteInput(String),
    #[error(transparent)]
    Padic(#[from] PadicError),
    #[error(transparent)]
    Polygon(#[from] PolygonError),
}

/// Truncation parameters: `p`-adic precision `N`, `T`-precision, basis
/// weight bound and number of `H_k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DworkParams {
    pub np: u32,
    pub nt: usize,
    #[serde(with = "crate::rat::serde_q")]
    pub wmax: Q,
    pub kmax: usize,
}

impl DworkParams {
    /// `kmax = D`; `wmax` one above the weight of the `kmax`-th point, which
    /// keeps every coefficient below the `T`-precision free of truncation
    /// error at the Hodge bound; `N_T = a(p−1)(⌈HP_C(kmax)+1⌉ + 4)`.
    pub fn defaults(delta: &RectDelta, p: u64, a: u32) -> Self {
        let kmax = delta.big_d() as usize;
        Self::for_kmax(delta, p, a, kmax)
    }

    pub fn for_kmax(delta: &RectDelta, p: u64, a: u32, kmax: usize) -> Self {
        let pts = delta.points_up_to_weight_num(kmax as u64 * delta.big_d());
        let wk = pts
            .get(kmax.max(1) - 1)
            .map_or(Q::from_integer(0.into()), |v| delta.weight(*v));
        let wmax = Q::from_integer(ceil_q(&wk)) + qi(1);
        let height = hodge_c(delta, &qi(kmax as i64))
            .value_at(kmax as u64)
            .unwrap_or_else(|| qi(0));
        let h = ceil_q(&(height + qi(1))).to_usize().unwrap_or(0);
        let nt = a as usize * (p as usize - 1) * (h + 4);
        DworkParams { np: 2, nt, wmax, kmax }
    }
}

/// How `H_k` were obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CharRoute {
    /// Division-free Berkowitz recursion.
    Berkowitz,
    /// Traces of matrix powers and Newton's identities (`kmax < p`).
    Traces,
}

/// `H_0..H_kmax` of `det(1 − A s)` modulo `(p^N, T^{N_T})`.
#[derive(Clone, Debug)]
pub struct CharSeries {
    delta: RectDelta,
    p: u64,
    wmax: Q,
    basis_len: usize,
    route: CharRoute,
    flat: Flat,
    h: Vec<Vec<u64>>,
    exact_below: Vec<usize>,
}

/// `⌈(p−1)(Σ of the k−1 smallest basis weights + w_out)⌉`: every `k`-minor
/// term involving a point outside the basis has at least this order.
fn truncation_orders(delta: &RectDelta, p: u64, wmax: &Q, basis_len: usize, kmax: usize, nt: usize) -> Vec<usize> {
    let d = delta.big_d();
    let wmax_num = (wmax * qi(d as i64)).floor().to_integer().to_u64().unwrap_or(0);
    let w_out = delta.next_weight_num(wmax_num);
    let pts = delta.points_up_to_weight_num(wmax_num);
    (0..=kmax)
        .map(|k| {
            if k == 0 {
                return nt;
            }
            if k > basis_len {
                return 0;
            }
            let small: u64 = pts[..k - 1].iter().map(|v| delta.weight_num(*v)).sum();
            let e = ((p - 1) * (small + w_out)).div_ceil(d) as usize;
            e.min(nt)
        })
        .collect()
}

impl CharSeries {
    /// Berkowitz always; the trace route is used instead when `kmax < p`
    /// and `route` asks for it.
    pub fn compute(m: &DworkMatrix, kmax: usize, exec: Exec) -> Result<Self, DworkError> {
        Self::compute_with(m, kmax, CharRoute::Berkowitz, exec)
    }

    pub fn compute_with(m: &DworkMatrix, kmax: usize, route: CharRoute, exec: Exec) -> Result<Self, DworkError> {
        if kmax > m.size() {
            return Err(DworkError::BadInput(format!(
                "kmax {kmax} exceeds basis size {}",
                m.size()
            )));
        }
        let fl = m.flat.clone();
        let n = m.size();
        let a = m.linear_entries(exec);
        let h = match route {
            CharRoute::Berkowitz => charpoly::berkowitz(&fl, &a, n, kmax, exec),
            CharRoute::Traces => {
                let tr = charpoly::power_traces(&fl, &a, n, kmax, exec);
                charpoly::h_from_traces(&fl, &tr).ok_or_else(|| {
                    DworkError::BadInput(format!("trace route needs kmax < p (kmax {kmax}, p {})", m.p()))
                })?
            }
        };
        let exact_below = truncation_orders(m.delta(), m.p(), m.wmax(), n, kmax, fl.nt);
        Ok(CharSeries {
            delta: *m.delta(),
            p: m.p(),
            wmax: m.wmax().clone(),
            basis_len: n,
            route,
            flat: fl,
            h,
            exact_below,
        })
    }

    pub fn delta(&self) -> &RectDelta {
        &self.delta
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn a(&self) -> usize {
        self.flat.a
    }

    pub fn q(&self) -> u64 {
        self.p.pow(self.flat.a as u32)
    }

    pub fn np(&self) -> u32 {
        self.flat.ring.prec()
    }

    pub fn nt(&self) -> usize {
        self.flat.nt
    }

    pub fn wmax(&self) -> &Q {
        &self.wmax
    }

    pub fn kmax(&self) -> usize {
        self.h.len() - 1
    }

    pub fn basis_len(&self) -> usize {
        self.basis_len
    }

    pub fn route(&self) -> CharRoute {
        self.route
    }

    pub fn ring(&self) -> &GaloisRing {
        &self.flat.ring
    }

    pub fn h(&self, k: usize) -> TSeries<GaloisRing> {
        self.flat.to_tseries(&self.h[k])
    }

    /// Coefficients of `H_k` below this index agree with the untruncated
    /// operator (modulo `p^N`).
    pub fn exact_below(&self, k: usize) -> usize {
        self.exact_below[k]
    }

    /// `T`-order of `H_k` as far as it is determined.
    pub fn order(&self, k: usize) -> SeriesOrder {
        let bound = self.exact_below[k];
        match self.flat.order(&self.h[k]) {
            SeriesOrder::Exact(j) if j < bound => SeriesOrder::Exact(j),
            _ => SeriesOrder::AtLeast(bound),
        }
    }

    /// The same series with `H_1` perturbed by `+T^j`, for fault injection.
    pub fn with_corrupted_h1(&self, j: usize) -> Self {
        let mut out = self.clone();
        if self.kmax() >= 1 && j < self.nt() {
            let idx = j * self.flat.a;
            out.h[1][idx] = (out.h[1][idx] + 1) % self.flat.m;
        }
        out
    }

    /// `tr(A^k)` for `k = 1..=kmax`, recovered from the `H_k`.
    pub fn traces(&self, kmax: usize) -> Vec<TSeries<GaloisRing>> {
        charpoly::traces_from_h(&self.flat, &self.h, kmax.min(self.kmax()))
            .iter()
            .map(|t| self.flat.to_tseries(t))
            .collect()
    }

    pub fn to_json(&self) -> Value {
        let h: Vec<Value> = (0..=self.kmax())
            .map(|k| {
                let coeffs: Vec<Value> = self.h[k].chunks(self.flat.a).map(|c| json!(c)).collect();
                json!({"k": k, "order": order_json(self.order(k)), "exact_below": self.exact_below[k], "coeffs": coeffs})
            })
            .collect();
        json!({
            "p": self.p, "a": self.flat.a, "np": self.np(), "nt": self.nt(),
            "wmax": fmt_q(&self.wmax), "basis": self.basis_len, "route": self.route, "h": h,
        })
    }
}

fn order_json(o: SeriesOrder) -> Value {
    match o {
        SeriesOrder::Exact(j) => json!(j),
        SeriesOrder::AtLeast(j) => json!(format!(">={j}")),
    }
}

/// Builds the matrix and its characteristic series.
pub fn char_series(f: &FPoly, params: &DworkParams, exec: Exec) -> Result<CharSeries, DworkError> {
    let m = DworkMatrix::assemble(f, &params.wmax, params.np, params.nt, exec)?;
    CharSeries::compute(&m, params.kmax.min(m.size()), exec)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OrderStatus {
    /// Observed order equals the proven lower bound.
    Certified,
    /// Observed order is an upper bound only.
    Upper,
    /// Nothing nonzero below the exactness bound.
    AtLeast,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrderEntry {
    pub k: usize,
    /// First nonzero coefficient index, when below `exact_below`.
    pub observed: Option<usize>,
    pub exact_below: usize,
    pub lower: Option<u64>,
    pub status: OrderStatus,
}

/// `NP_{T^{a(p−1)}}` of the computed series together with its certificate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NpReport {
    pub polygon: NewtonPolygon,
    /// Hull of the proven lower bounds (only for `a = 1`).
    pub lower: Option<NewtonPolygon>,
    /// `polygon` is exactly the Newton polygon of the untruncated series on
    /// `[0, kmax]`.
    pub certified: bool,
    /// Some order is only known as a lower bound.
    pub partial: bool,
    pub orders: Vec<OrderEntry>,
}

/// Subsets examined per `k` when proving lower bounds.
pub const LOWER_BOUND_BUDGET: u64 = 2_000_000;

/// Newton polygon of `(k, ord_T H_k / (a(p−1)))`, certified against the
/// assignment lower bounds when `a = 1`.
pub fn np_c(c: &CharSeries, exec: Exec) -> Result<NpReport, DworkError> {
    let kmax = c.kmax();
    let scale = qi((c.a() as u64 * (c.p - 1)) as i64);
    let lower = if c.a() == 1 {
        Some(order_lower_bounds(&c.delta, c.p, kmax, LOWER_BOUND_BUDGET, exec)?)
    } else {
        None
    };
    let mut orders = Vec::with_capacity(kmax + 1);
    let mut mixed = Vec::new();
    let mut upper_only = Vec::new();
    let mut partial = false;
    for k in 0..=kmax {
        let (observed, bound) = match c.order(k) {
            SeriesOrder::Exact(j) => (Some(j), j),
            SeriesOrder::AtLeast(b) => (None, b),
        };
        let lk = lower.as_ref().map(|l| l[k]);
        let status = match (observed, lk) {
            (None, _) => OrderStatus::AtLeast,
            (Some(j), Some(l)) if j as u64 == l => OrderStatus::Certified,
            _ => OrderStatus::Upper,
        };
        partial |= observed.is_none();
        let v = qi(bound as i64) / &scale;
        mixed.push((k as u64, Valuation::Finite(v.clone())));
        upper_only.push((
            k as u64,
            if observed.is_some() {
                Valuation::Finite(v)
            } else {
                Valuation::Infinite
            },
        ));
        orders.push(OrderEntry {
            k,
            observed,
            exact_below: c.exact_below(k),
            lower: lk,
            status,
        });
    }
    let lower_poly = match &lower {
        Some(l) => Some(NewtonPolygon::from_valuations(
            &l.iter()
                .enumerate()
                .map(|(k, &v)| (k as u64, Valuation::Finite(qi(v as i64) / &scale)))
                .collect::<Vec<_>>(),
        )?),
        None => None,
    };
    let upper_poly = NewtonPolygon::from_valuations(&upper_only)?;
    let certified = lower_poly.as_ref() == Some(&upper_poly) && upper_poly.length() == kmax as u64;
    let polygon = if certified {
        upper_poly
    } else {
        NewtonPolygon::from_valuations(&mixed)?
    };
    Ok(NpReport {
        polygon,
        lower: lower_poly,
        certified,
        partial,
        orders,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StabilityReport {
    pub stable: bool,
    pub base: NewtonPolygon,
    pub refined: NewtonPolygon,
    pub refined_params: DworkParams,
}

/// Recomputes with `wmax + 1` and `N_T + D`; stable iff the polygon on
/// `[0, kmax]` is unchanged.
pub fn stability_check(f: &FPoly, params: &DworkParams, exec: Exec) -> Result<StabilityReport, DworkError> {
    let polygon = |pr: &DworkParams| -> Result<NewtonPolygon, DworkError> {
        let m = DworkMatrix::assemble(f, &pr.wmax, pr.np, pr.nt, exec)?;
        if m.size() < pr.kmax {
            return Ok(NewtonPolygon::trivial());
        }
        let c = CharSeries::compute(&m, pr.kmax, exec)?;
        Ok(polygon_of_orders(&c))
    };
    let refined_params = DworkParams {
        wmax: &params.wmax + qi(1),
        nt: params.nt + f.delta().big_d() as usize,
        ..params.clone()
    };
    let base = polygon(params)?;
    let refined = polygon(&refined_params)?;
    let stable = base.length() == params.kmax as u64 && base == refined;
    Ok(StabilityReport {
        stable,
        base,
        refined,
        refined_params,
    })
}

/// Hull of the determined orders, `AtLeast` bounds taken at face value.
pub fn polygon_of_orders(c: &CharSeries) -> NewtonPolygon {
    let scale = qi((c.a() as u64 * (c.p - 1)) as i64);
    let pts: Vec<(u64, Valuation)> = (0..=c.kmax())
        .map(|k| (k as u64, Valuation::Finite(qi(c.order(k).value() as i64) / &scale)))
        .collect();
    NewtonPolygon::from_valuations(&pts).expect("H_0 is present")
}

/// `H_k(ζ_{p^m} − 1)` modulo `p^N`, requiring `N_T ≥ N·φ(p^m)`.
pub fn specialize_char(c: &CharSeries, m: u32) -> Result<Vec<CycResidue>, DworkError> {
    if m == 0 {
        return Err(DworkError::BadInput("character order m must be at least 1".into()));
    }
    let need = c.np() as usize * phi(c.p, m) as usize;
    if c.nt() < need {
        return Err(DworkError::PrecisionExhausted { need, have: c.nt() });
    }
    (0..=c.kmax())
        .map(|k| Ok(specialize_t_unchecked(&c.h(k), m)?))
        .collect()
}

fn phi(p: u64, m: u32) -> u64 {
    (p - 1) * p.pow(m - 1)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SpecializedPolygon {
    pub m: u32,
    /// `v_π(H_k(π_χ))`, `None` when only a lower bound is known.
    pub valuations: Vec<Option<u64>>,
    /// Caps below which valuations are exact.
    pub caps: Vec<u64>,
    /// Normalized by `a(p−1)`, the `π_χ^{a(p−1)}`-adic scale.
    pub polygon: NewtonPolygon,
    pub partial: bool,
}

/// Newton polygon of the specialized coefficients, on the same scale as
/// the `T`-adic polygon.
pub fn specialized_polygon(c: &CharSeries, m: u32) -> Result<SpecializedPolygon, DworkError> {
    let vals = specialize_char(c, m)?;
    let scale = qi((c.a() as u64 * (c.p - 1)) as i64);
    let mut valuations = Vec::new();
    let mut caps = Vec::new();
    let mut pts = Vec::new();
    let mut partial = false;
    for (k, v) in vals.iter().enumerate() {
        let cap = c.exact_below(k) as u64;
        let (val, bound) = match v.pi_valuation_capped(cap) {
            PiValuation::Exact(x) => (Some(x), x),
            PiValuation::AtLeast(b) => (None, b),
        };
        partial |= val.is_none();
        valuations.push(val);
        caps.push(cap.min(c.np() as u64 * phi(c.p, m)));
        pts.push((k as u64, Valuation::Finite(qi(bound as i64) / &scale)));
    }
    Ok(SpecializedPolygon {
        m,
        valuations,
        caps,
        polygon: NewtonPolygon::from_valuations(&pts)?,
        partial,
    })
}

/// First `D` slopes of the `C`-polygon followed by their `2`-complements in
/// reverse order.
pub fn l_polygon(c_slopes: &SlopeMultiset, big_d: u64) -> Result<SlopeMultiset, DworkError> {
    if c_slopes.total() < big_d {
        return Err(DworkError::IncompleteInput(format!(
            "{} slopes known, need {big_d}",
            c_slopes.total()
        )));
    }
    let first = c_slopes.first(big_d);
    Ok(first.union(&first.reflect(&qi(2))))
}

/// `S_k(T) = (q^k − 1)²·tr(A^k)` for `k = 1..=kmax`, from the `H_k`.
pub fn power_sums_from_c(c: &CharSeries, kmax: usize) -> Vec<TSeries<GaloisRing>> {
    let ring = c.ring().clone();
    c.traces(kmax)
        .into_iter()
        .enumerate()
        .map(|(i, t)| {
            let qk = c.q().pow(i as u32 + 1) - 1;
            let f = ((qk as u128 * qk as u128) % ring.pn() as u128) as u64;
            t.scale_u64(f)
        })
        .collect()
}

/// `tr(A^k)` of the untruncated operator modulo `(p^N, T^{N_T})`, by
/// summing closed walks (independent of any basis truncation).
pub fn exact_traces(
    f: &FPoly,
    np: u32,
    nt: usize,
    kmax: usize,
    exec: Exec,
) -> Result<Vec<TSeries<GaloisRing>>, DworkError> {
    let delta = *f.delta();
    let ring = matrix::ring_for(f, np)?;
    let basis = walks::walk_basis(&delta, f.p(), nt);
    let grid = grid::BGrid::build(f, &ring, nt, matrix::grid_dims(&delta, f.p(), nt, &basis), exec)?;
    let fl = grid.flat.clone();
    Ok(walks::exact_traces(&grid, &delta, f.p(), kmax, exec)
        .iter()
        .map(|t| fl.to_tseries(t))
        .collect())
}

/// Scaled-by-`(p−1)` value helper used in reports: `j/(a(p−1))`.
pub fn normalized_order(j: usize, a: usize, p: u64) -> Q {
    q(j as i64, (a as u64 * (p - 1)) as i64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{exp_sum_t, DEFAULT_BUDGET};
    use crate::polytope::LatticePoint;

    fn delta33() -> RectDelta {
        RectDelta::new(3, 3).unwrap()
    }

    fn all_ones(p: u64) -> FPoly {
        let d = delta33();
        let mut f = FPoly::new(d, p, 1).unwrap();
        for v in d.points() {
            if !v.is_origin() {
                f.set_int(v, 1).unwrap();
            }
        }
        f
    }

    fn golden(p: u64) -> FPoly {
        let d = delta33();
        let mut f = FPoly::new(d, p, 1).unwrap();
        for (i, v) in d.points().into_iter().enumerate() {
            f.set_int(v, (3 * i as i64 + 1) % p as i64).unwrap();
        }
        f
    }

    fn residues(s: &TSeries<GaloisRing>) -> Vec<u64> {
        s.coeffs().iter().map(|c| c[0]).collect()
    }

    #[test]
    fn matrix_entries() {
        let mut f = all_ones(5);
        f.set_int(LatticePoint::ORIGIN, 1).unwrap();
        let m = DworkMatrix::assemble(&f, &qi(2), 2, 12, Exec::Parallel).unwrap();
        let o = LatticePoint::ORIGIN;
        let (e10, e01) = (LatticePoint::new(1, 0), LatticePoint::new(0, 1));
        let one_plus_t = residues(&m.entry_at(o, o).unwrap());
        assert_eq!(&one_plus_t[..3], &[1, 1, 0]);
        assert!(one_plus_t[2..].iter().all(|&c| c == 0));
        assert!(m.entry_at(e10, e01).unwrap().is_zero());
        assert_eq!(m.entry_at(e10, e10).unwrap().order(), SeriesOrder::Exact(2));
    }

    #[test]
    fn char_series_routes_and_basis_order() {
        let f = golden(7);
        let m = DworkMatrix::assemble(&f, &qi(2), 2, 24, Exec::Parallel).unwrap();
        let b = CharSeries::compute_with(&m, 6, CharRoute::Berkowitz, Exec::Parallel).unwrap();
        let t = CharSeries::compute_with(&m, 6, CharRoute::Traces, Exec::Sequential).unwrap();
        for k in 0..=6 {
            assert_eq!(b.h(k), t.h(k), "H_{k}");
        }
        assert!(CharSeries::compute_with(&m, 7, CharRoute::Traces, Exec::Sequential).is_err());
        let n = m.size();
        let perm: Vec<usize> = (0..n).rev().collect();
        let r = CharSeries::compute(&m.permuted(&perm), 6, Exec::Parallel).unwrap();
        for k in 0..=6 {
            assert_eq!(b.h(k), r.h(k));
        }
        assert_eq!(residues(&b.h(0))[0], 1);
        assert_eq!(b.order(1), SeriesOrder::Exact(0));
    }

    #[test]
    fn certified_polygon_at_five() {
        for f in [all_ones(5), golden(5)] {
            let params = DworkParams::defaults(f.delta(), 5, 1);
            assert_eq!(
                (params.np, params.nt, params.wmax.clone(), params.kmax),
                (2, 40, qi(2), 9)
            );
            let c = char_series(&f, &params, Exec::Parallel).unwrap();
            let r = np_c(&c, Exec::Parallel).unwrap();
            assert!(r.certified);
            let v = vec![(0, qi(0)), (1, qi(0)), (7, qi(3)), (9, q(9, 2))];
            assert_eq!(r.polygon, NewtonPolygon::from_vertices(v).unwrap());
            assert!(r.polygon.lies_above(&hodge_c(f.delta(), &qi(9))));
            assert_eq!(c.order(4), SeriesOrder::Exact(6));
        }
    }

    #[test]
    fn power_sums_match_oracle() {
        let f = golden(5);
        let nt = 40;
        let exact = exact_traces(&f, 2, nt, 2, Exec::Parallel).unwrap();
        for k in 1..=2u32 {
            let s = exp_sum_t(&f, k, 2, nt, DEFAULT_BUDGET, Exec::Parallel).unwrap();
            let qk = 5u64.pow(k) - 1;
            let dw = exact[k as usize - 1].scale_u64(qk * qk % 25);
            assert_eq!(residues(&s), residues(&dw), "k={k}");
        }
        let c = char_series(&f, &DworkParams::defaults(f.delta(), 5, 1), Exec::Parallel).unwrap();
        let ps = power_sums_from_c(&c, 2);
        let s1 = exp_sum_t(&f, 1, 2, nt, DEFAULT_BUDGET, Exec::Parallel).unwrap();
        let e = c.exact_below(1);
        assert_eq!(residues(&ps[0])[..e], residues(&s1)[..e]);
    }

    #[test]
    fn frobenius_twist_order_matches_oracle() {
        let d = delta33();
        let mut f = FPoly::new(d, 5, 3).unwrap();
        for (i, v) in d.points().into_iter().enumerate() {
            f.set(v, &[(i % 5) as u64, (2 * i % 5) as u64, ((i * i + 1) % 5) as u64])
                .unwrap();
        }
        let nt = 16;
        let tr = exact_traces(&f, 2, nt, 1, Exec::Parallel).unwrap();
        let s = exp_sum_t(&f, 1, 2, nt, DEFAULT_BUDGET, Exec::Parallel).unwrap();
        // (124)² ≡ 1 mod 25
        assert_eq!(residues(&tr[0]), residues(&s));
        assert!(tr[0].coeffs().iter().all(|c| c[1..].iter().all(|&x| x == 0)));
    }

    #[test]
    fn stability_and_truncation() {
        let f = golden(5);
        let params = DworkParams::defaults(f.delta(), 5, 1);
        assert!(stability_check(&f, &params, Exec::Parallel).unwrap().stable);
        let tiny = DworkParams {
            wmax: qi(0),
            kmax: 2,
            ..params
        };
        assert!(!stability_check(&f, &tiny, Exec::Parallel).unwrap().stable);
    }

    #[test]
    fn specialization_matches_t_adic() {
        let f = golden(5);
        let params = DworkParams {
            np: 6,
            ..DworkParams::defaults(f.delta(), 5, 1)
        };
        let c = char_series(&f, &params, Exec::Parallel).unwrap();
        let t = polygon_of_orders(&c);
        // φ(5) = 4 needs N = 6 to see order 18; φ(25) = 20 needs only N = 2
        let c2 = char_series(
            &f,
            &DworkParams {
                np: 2,
                ..params.clone()
            },
            Exec::Parallel,
        )
        .unwrap();
        for (m, c) in [(1, &c), (2, &c2)] {
            let s = specialized_polygon(c, m).unwrap();
            assert!(!s.partial, "m={m}");
            assert_eq!(s.polygon, t, "m={m}");
        }
        assert!(specialized_polygon(&c2, 1).unwrap().partial);
        let h0 = &specialize_char(&c, 1).unwrap()[0];
        assert_eq!(h0.coeffs()[0], 1);
        assert!(h0.coeffs()[1..].iter().all(|&x| x == 0));
        let low = DworkParams {
            np: 6,
            nt: 20,
            ..params
        };
        let c = char_series(&f, &low, Exec::Parallel).unwrap();
        assert!(matches!(
            specialize_char(&c, 1),
            Err(DworkError::PrecisionExhausted { need: 24, have: 20 })
        ));
    }

    #[test]
    fn l_polygon_reflects() {
        let c = SlopeMultiset::from_pairs([(qi(0), 1), (q(1, 2), 3), (q(3, 4), 5)]);
        let l = l_polygon(&c, 9).unwrap();
        assert_eq!(l.total(), 18);
        assert_eq!(l.weighted_sum(), qi(18));
        assert_eq!(l.multiplicity(&q(5, 4)), 5);
        assert_eq!(l.multiplicity(&qi(2)), 1);
        assert!(matches!(l_polygon(&c.first(4), 9), Err(DworkError::IncompleteInput(_))));
    }
}
