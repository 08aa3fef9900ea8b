//! Randomized invariants across modules.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use proptest::prelude::*;

use crate::dwork::{char_series, CharRoute, CharSeries, DworkMatrix, DworkParams};
use crate::exec::Exec;
use crate::fpoly::FPoly;
use crate::gnp::{
    eigencurve_components, min_assignment_exhaustive, min_assignment_hungarian, weighted_progression, CostMatrix,
    CostModel, GnpFormula, ResidueClass,
};
use crate::padic::{CycInt, GaloisRing, TSeries};
use crate::polygon::{hodge_c, NewtonPolygon, Valuation};
use crate::polytope::RectDelta;
use crate::rat::{q, qi, Q};
use crate::symbolic::{g_poly, Witness};

fn delta() -> impl Strategy<Value = RectDelta> {
    (3u32..=6, 3u32..=6).prop_map(|(a, b)| RectDelta::new(a, b).unwrap())
}

fn small_delta() -> impl Strategy<Value = RectDelta> {
    (3u32..=4, 3u32..=4).prop_map(|(a, b)| RectDelta::new(a, b).unwrap())
}

fn class_of(d: &RectDelta, seed: u32) -> ResidueClass {
    let all = ResidueClass::all_nontrivial(d);
    all[seed as usize % all.len()]
}

fn series_eq(a: &TSeries<GaloisRing>, b: &TSeries<GaloisRing>) -> bool {
    a.prec() == b.prec() && (0..a.prec()).all(|j| a.coeff(j) == b.coeff(j))
}

fn f_from(d: &RectDelta, p: u64, coeffs: &[u64]) -> FPoly {
    let mut f = FPoly::new(*d, p, 1).unwrap();
    for (v, c) in d.points().into_iter().zip(coeffs) {
        f.set_int(v, (*c % p) as i64).unwrap();
    }
    f
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn weights_fill_the_fundamental_rectangle(d in delta()) {
        let total: u64 = d.i_set().iter().map(|&n| d.w_count(n)).sum();
        prop_assert_eq!(total, d.big_d());
        let h: Vec<i64> = (0..=2 * d.big_d() + 3).map(|k| d.h_count(k)).collect();
        prop_assert!(h.iter().all(|&x| x >= 0));
        prop_assert_eq!(h.iter().sum::<i64>(), 2 * d.big_d() as i64);
        prop_assert!(h[2 * d.big_d() as usize + 1..].iter().all(|&x| x == 0));
    }

    #[test]
    fn filtration_is_monotone(d in delta(), a in 0u64..40, b in 0u64..40) {
        let (lo, hi) = (a.min(b), a.max(b));
        let small = d.filtration(lo);
        let big = d.filtration(hi);
        prop_assert!(small.iter().all(|v| big.contains(v)));
        prop_assert!(big.iter().all(|v| d.weight_num(*v) <= hi));
    }

    #[test]
    fn polygon_minorizes_and_round_trips(vals in proptest::collection::vec(proptest::option::of(0i64..60), 1..14)) {
        let pts: Vec<(u64, Valuation)> = vals
            .iter()
            .enumerate()
            .map(|(k, v)| (k as u64, v.map_or(Valuation::Infinite, |x| Valuation::Finite(q(x, 7)))))
            .collect();
        prop_assume!(vals.iter().any(Option::is_some));
        let poly = NewtonPolygon::from_valuations(&pts).unwrap();
        let slopes: Vec<Q> = poly.slopes().expanded();
        prop_assert!(slopes.windows(2).all(|w| w[0] <= w[1]));
        for (k, v) in &pts {
            if let (Valuation::Finite(y), Some(at)) = (v, poly.value_at(*k)) {
                prop_assert!(at <= *y);
            }
        }
        let back: Vec<(u64, Valuation)> = poly.vertices().iter().map(|(x, y)| (*x, Valuation::Finite(y.clone()))).collect();
        let again = NewtonPolygon::from_valuations(&back).unwrap();
        prop_assert_eq!(again.slopes(), poly.slopes());
        let shift = poly.vertices()[0].0;
        if shift == 0 && poly.vertices()[0].1.is_zero() {
            prop_assert_eq!(NewtonPolygon::from_slopes(&poly.slopes()), poly);
        }
    }

    #[test]
    fn assignment_solvers_agree(n in 1usize..=7, cells in proptest::collection::vec(proptest::option::weighted(0.8, -20i64..40), 49)) {
        let m = CostMatrix::from_scaled(n, 3, cells[..n * n].to_vec());
        let a = min_assignment_exhaustive(&m, Exec::Parallel);
        prop_assert_eq!(&a, &min_assignment_exhaustive(&m, Exec::Sequential));
        prop_assert_eq!(a, min_assignment_hungarian(&m));
    }

    #[test]
    fn formula_invariants(d in small_delta(), seed in 0u32..64, p_idx in 0usize..6) {
        let class = class_of(&d, seed);
        prop_assume!(class.is_realizable(&d));
        let p = class.prime_above(&d, [0, 10, 30, 60, 100, 200][p_idx]).unwrap();
        let f = GnpFormula::new(&d, class, CostModel::Residue, Exec::Parallel).unwrap();
        let lcm = BigInt::from(d.lcm());
        for t in &f.terms {
            let jump = &t.eps * qi(t.w as i64);
            prop_assert!(lcm.is_multiple_of(jump.denom()));
            prop_assert!(lcm.is_multiple_of(t.m.denom()));
        }
        let l = f.gnp_l(p).unwrap();
        prop_assert_eq!(l.total(), 2 * d.big_d());
        prop_assert_eq!(l.reflect(&qi(2)), l.clone());
        let mmax = if p < 50 { 3 } else { 2 };
        for m in 1..=mmax {
            prop_assert_eq!(weighted_progression(&l, p, m), f.gnp_l_m(p, m).unwrap());
        }
        let snp = f.snp(p).unwrap();
        let hodge = hodge_c(&d, &qi(2)).truncate(snp.length()).unwrap();
        prop_assert!(snp.lies_above(&hodge));
        if p > d.big_d() * d.big_d() - d.big_d() + 1 {
            prop_assert!(f.is_convex_at(p));
        }
        let top = qi(3);
        let c = f.gnp_c(p, &top).unwrap();
        let e = eigencurve_components(&c, &top, &l, &d, 3).unwrap();
        let bucketed: u64 = e.buckets.iter().map(|b| b.computed).sum();
        prop_assert_eq!(e.slope_zero + bucketed, c.total());
    }

    #[test]
    fn galois_ring_laws(x in 0u64..625, y in 0u64..625, e in 1usize..=2, n in 1u32..=3) {
        let r = GaloisRing::new(5, n, e).unwrap();
        let a = r.from_coeffs(&[x % 25, x / 25]);
        let b = r.from_coeffs(&[y % 25, y / 25]);
        let ab = r.mul(&a, &b);
        prop_assert_eq!(r.teichmuller(&ab), r.mul(&r.teichmuller(&a), &r.teichmuller(&b)));
        let s = r.add(&a, &b);
        prop_assert_eq!(r.trace(&s), (r.trace(&a) + r.trace(&b)) % r.pn());
        prop_assert_eq!(r.trace(&r.frobenius(&a)), r.trace(&a));
    }

    #[test]
    fn pi_valuation_is_additive(p_idx in 0usize..3, m in 1u32..=2, xs in proptest::collection::vec(-30i64..30, 24), ys in proptest::collection::vec(-30i64..30, 24)) {
        let p = [3u64, 5, 7][p_idx];
        let phi = ((p - 1) * p.pow(m - 1)) as usize;
        let a = CycInt::from_coeffs(p, m, xs[..phi.min(24)].iter().map(|&c| BigInt::from(c)).collect());
        let b = CycInt::from_coeffs(p, m, ys[..phi.min(24)].iter().map(|&c| BigInt::from(c)).collect());
        if let (Some(va), Some(vb)) = (a.pi_valuation(), b.pi_valuation()) {
            prop_assert_eq!(a.mul(&b).pi_valuation(), Some(va + vb));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn g_poly_is_homogeneous(seed in 0u32..8, n_idx in 0usize..3) {
        let d = RectDelta::new(3, 3).unwrap();
        let class = class_of(&d, seed);
        let n = d.i_set()[n_idx];
        let g = g_poly(&d, &class, n, 0, Witness::default_for(&d, &class), 5_000_000, Exec::Parallel).unwrap();
        let k = g.k_n as u32;
        // normalized vertex variables are dropped, so degrees are at most k_n
        prop_assert!(g.poly.degrees().iter().all(|&deg| deg <= k));
    }

    #[test]
    fn char_series_is_basis_invariant(coeffs in proptest::collection::vec(0u64..5, 16), rot in 1usize..48) {
        let d = RectDelta::new(3, 3).unwrap();
        let f = f_from(&d, 5, &coeffs);
        let params = DworkParams { np: 2, nt: 16, wmax: qi(1), kmax: 4 };
        let m = DworkMatrix::assemble(&f, &params.wmax, params.np, params.nt, Exec::Parallel).unwrap();
        let n = m.size();
        let perm: Vec<usize> = (0..n).map(|i| (i * rot + 3) % n).collect();
        prop_assume!({
            let mut s = perm.clone();
            s.sort();
            s.dedup();
            s.len() == n
        });
        let base = CharSeries::compute(&m, 4, Exec::Parallel).unwrap();
        let moved = CharSeries::compute(&m.permuted(&perm), 4, Exec::Sequential).unwrap();
        let traced = CharSeries::compute_with(&m, 4, CharRoute::Traces, Exec::Parallel).unwrap();
        let direct = char_series(&f, &params, Exec::Parallel).unwrap();
        for k in 0..=4 {
            prop_assert!(series_eq(&base.h(k), &moved.h(k)));
            prop_assert!(series_eq(&base.h(k), &traced.h(k)));
            prop_assert!(series_eq(&base.h(k), &direct.h(k)));
        }
    }
}
