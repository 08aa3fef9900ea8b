//! Brute-force exponential sums over `(F_{q^k}^*)²`, as cyclotomic integers
//! for a fixed character and as truncated `T`-series.

use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::exec::Exec;
use crate::fpoly::FPoly;
use crate::padic::{checked_pow, mulmod, specialize_t_unchecked};
use crate::padic::{default_modulus, CycInt, CycResidue, GaloisRing, GrElem, PadicError, TSeries};

/// Default cap on `(q^k)²`, the number of points summed.
pub const DEFAULT_BUDGET: u64 = 1 << 26;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("sum needs {needed} points, budget is {budget}")]
    BudgetExceeded { needed: u64, budget: u64 },
    #[error("bad input: {0}")]
    BadInput(String),
    #[error(transparent)]
    Padic(#[from] PadicError),
}

/// Counts of `Tr(f̂(x̂)) mod p^prec` over `x ∈ (F_{q^k}^*)²`, indexed by the
/// residue. `modulus` selects the representation of `F_{q^k}` (default
/// modulus when `None`).
pub fn trace_histogram(
    f: &FPoly,
    k: u32,
    prec: u32,
    modulus: Option<Vec<u64>>,
    budget: u64,
    exec: Exec,
) -> Result<Vec<u64>, OracleError> {
    if k == 0 {
        return Err(OracleError::BadInput("extension degree k must be at least 1".into()));
    }
    let p = f.p();
    let deg = f.a() as usize * k as usize;
    let qk = checked_pow(p, deg as u32).ok_or(OracleError::BudgetExceeded {
        needed: u64::MAX,
        budget,
    })?;
    let needed = qk.checked_mul(qk).unwrap_or(u64::MAX);
    if needed > budget {
        return Err(OracleError::BudgetExceeded { needed, budget });
    }
    let big = match modulus {
        Some(m) => GaloisRing::with_modulus(p, prec, m)?,
        None => GaloisRing::with_modulus(p, prec, default_modulus(p, deg))?,
    };
    let order = (qk - 1) as usize;
    let g = big.teichmuller(&big.multiplicative_generator());
    let mut powers: Vec<GrElem> = Vec::with_capacity(order);
    let mut cur = big.one();
    for _ in 0..order {
        powers.push(cur.clone());
        cur = big.mul(&cur, &g);
    }
    // image of the generator y of F_q = F_p[y]/(g_a)
    let small_mod = f.field_modulus();
    let y_img = if f.a() == 1 {
        None
    } else {
        let root = powers
            .iter()
            .find(|z| {
                let mut acc = big.zero();
                for c in small_mod.iter().rev() {
                    acc = big.add(&big.mul(&acc, z), &big.from_u64(*c));
                }
                big.residue(&acc).iter().all(|&c| c == 0)
            })
            .ok_or_else(|| OracleError::BadInput("F_q does not embed".into()))?;
        Some(root.clone())
    };
    let lift = |c: &[u64]| -> GrElem {
        let mut acc = big.zero();
        match &y_img {
            None => acc = big.from_u64(c[0]),
            Some(y) => {
                for x in c.iter().rev() {
                    acc = big.add(&big.mul(&acc, y), &big.from_u64(*x));
                }
            }
        }
        big.teichmuller(&acc)
    };
    let pm = big.pn();
    let terms: Vec<((usize, usize), Vec<u64>)> = f
        .iter()
        .map(|(v, c)| {
            let a = lift(c);
            let table = exec.map_slice(&powers, |z| big.trace(&big.mul(&a, z)));
            ((v.v1 as usize, v.v2 as usize), table)
        })
        .collect();
    let hists = exec.map_range(order, |i| {
        let mut h = vec![0u64; pm as usize];
        for j in 0..order {
            let mut t = 0u64;
            for ((v1, v2), table) in &terms {
                t += table[(i * v1 + j * v2) % order];
            }
            h[(t % pm) as usize] += 1;
        }
        h
    });
    let mut out = vec![0u64; pm as usize];
    for h in hists {
        for (o, x) in out.iter_mut().zip(h) {
            *o += x;
        }
    }
    Ok(out)
}

/// `Σ_x ζ_{p^m}^{Tr(f̂(x̂))}` over `(F_{q^k}^*)²`.
pub fn exp_sum_chi(f: &FPoly, m: u32, k: u32, budget: u64, exec: Exec) -> Result<CycInt, OracleError> {
    if m == 0 {
        return Err(OracleError::BadInput("character order m must be at least 1".into()));
    }
    let h = trace_histogram(f, k, m, None, budget, exec)?;
    let counts: Vec<(u64, u64)> = h
        .iter()
        .enumerate()
        .filter(|(_, &n)| n > 0)
        .map(|(t, &n)| (t as u64, n))
        .collect();
    Ok(CycInt::from_exponent_counts(f.p(), m, &counts))
}

/// Trace precision `N + ⌈log_p N_T⌉` that determines `C(t, j) mod p^N` for `j < N_T`.
pub fn binomial_precision(p: u64, np: u32, nt: usize) -> u32 {
    let mut e = 0u32;
    let mut pw = 1u64;
    while pw < nt as u64 {
        pw = pw.saturating_mul(p);
        e += 1;
    }
    np + e
}

/// `Σ_x (1+T)^{Tr(f̂(x̂))}` modulo `(p^N, T^{N_T})`.
pub fn exp_sum_t(
    f: &FPoly,
    k: u32,
    np: u32,
    nt: usize,
    budget: u64,
    exec: Exec,
) -> Result<TSeries<GaloisRing>, OracleError> {
    let prec = binomial_precision(f.p(), np, nt);
    let h = trace_histogram(f, k, prec, None, budget, exec)?;
    let ring = GaloisRing::prime_ring(f.p(), np)?;
    Ok(series_from_histogram(&ring, &h, nt))
}

/// `Σ_t h[t]·(1+T)^t` with `t` read as an integer in `[0, len)`.
pub fn series_from_histogram(ring: &GaloisRing, h: &[u64], nt: usize) -> TSeries<GaloisRing> {
    let m = ring.pn();
    let mut row = vec![0u64; nt];
    if nt > 0 {
        row[0] = 1 % m;
    }
    let mut acc = vec![0u64; nt];
    for &n in h {
        if n > 0 {
            let n = n % m;
            for (a, r) in acc.iter_mut().zip(&row) {
                *a = (*a + mulmod(n, *r, m)) % m;
            }
        }
        // row ← row·(1+T)
        for j in (1..nt).rev() {
            row[j] = (row[j] + row[j - 1]) % m;
        }
    }
    TSeries::from_coeffs(ring, acc.into_iter().map(|c| ring.from_u64(c)).collect(), nt)
}

/// Which sums [`cross_check`] compares.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CrossCheckParams {
    pub ks: Vec<u32>,
    pub ms: Vec<u32>,
    pub np: u32,
    pub nt: usize,
    pub budget: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckRow {
    pub k: u32,
    /// `"T"` or `"chi:m"`.
    pub mode: String,
    pub pass: bool,
    /// Index of the first differing coefficient (`T`-power for series,
    /// `ζ`-power for characters).
    pub first_mismatch: Option<usize>,
    /// `T`-precision of the comparison.
    pub compared_below: usize,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CrossCheckReport {
    pub rows: Vec<CheckRow>,
    pub warnings: Vec<String>,
    pub pass: bool,
}

impl CrossCheckReport {
    pub fn to_json(&self) -> Value {
        json!(self)
    }
}

/// Compares brute-force sums with the Dwork side `S_k(T)`, given as
/// `dwork[k−1]` known exactly below `exact[k−1]`.
///
/// Per `k`: the `T`-series mod `(p^N, T^{min(N_T, exact)})`, and for each
/// `m` the character sum against the specialization of the oracle series
/// (when the precision allows) and of the Dwork series.
pub fn cross_check(
    f: &FPoly,
    dwork: &[TSeries<GaloisRing>],
    exact: &[usize],
    params: &CrossCheckParams,
    exec: Exec,
) -> CrossCheckReport {
    let mut rows = Vec::new();
    let mut warnings = Vec::new();
    if params.ks.is_empty() {
        warnings.push("empty k range: nothing compared".into());
    }
    let p = f.p();
    for &k in &params.ks {
        let idx = k as usize - 1;
        let Some(ds) = dwork.get(idx) else {
            warnings.push(format!("k={k}: no Dwork series supplied"));
            continue;
        };
        let upto = params.nt.min(exact.get(idx).copied().unwrap_or(0)).min(ds.prec());
        let oracle = match exp_sum_t(f, k, params.np, params.nt, params.budget, exec) {
            Ok(s) => s,
            Err(e) => {
                rows.push(CheckRow {
                    k,
                    mode: "T".into(),
                    pass: false,
                    first_mismatch: None,
                    compared_below: 0,
                    detail: e.to_string(),
                });
                continue;
            }
        };
        let red = |s: &TSeries<GaloisRing>, j: usize| s.coeff(j)[0] % checked_pow(p, params.np).unwrap();
        let mismatch = (0..upto).find(|&j| red(&oracle, j) != red(ds, j));
        rows.push(CheckRow {
            k,
            mode: "T".into(),
            pass: mismatch.is_none(),
            first_mismatch: mismatch,
            compared_below: upto,
            detail: format!("mod ({p}^{}, T^{upto})", params.np),
        });
        for &m in &params.ms {
            let mode = format!("chi:{m}");
            let chi = match exp_sum_chi(f, m, k, params.budget, exec).and_then(|c| Ok(c.reduce(params.np)?)) {
                Ok(c) => c,
                Err(e) => {
                    rows.push(CheckRow {
                        k,
                        mode,
                        pass: false,
                        first_mismatch: None,
                        compared_below: 0,
                        detail: e.to_string(),
                    });
                    continue;
                }
            };
            let phi = ((p - 1) * p.pow(m - 1)) as usize;
            let need = params.np as usize * phi;
            let mut fails = Vec::new();
            let mut compared = Vec::new();
            if params.nt >= need {
                compared.push("oracle series");
                if let Some(i) = diff_index(&chi, &specialize_t_unchecked(&oracle, m)) {
                    fails.push(("oracle series", i));
                }
            }
            if upto >= need {
                compared.push("Dwork series");
                if let Some(i) = diff_index(&chi, &specialize_t_unchecked(ds, m)) {
                    fails.push(("Dwork series", i));
                }
            }
            if compared.is_empty() {
                warnings.push(format!(
                    "k={k} {mode}: T-precision below {need}, character sum not compared"
                ));
            }
            rows.push(CheckRow {
                k,
                mode,
                pass: fails.is_empty() && !compared.is_empty(),
                first_mismatch: fails.first().map(|f| f.1),
                compared_below: need,
                detail: if fails.is_empty() {
                    format!("matches specialization of {}", compared.join(" and "))
                } else {
                    format!(
                        "differs from specialization of {}",
                        fails.iter().map(|f| f.0).collect::<Vec<_>>().join(" and ")
                    )
                },
            });
        }
    }
    let pass = rows.iter().all(|r| r.pass);
    CrossCheckReport { rows, warnings, pass }
}

fn diff_index(a: &CycResidue, b: &Result<CycResidue, PadicError>) -> Option<usize> {
    match b {
        Ok(b) => a.coeffs().iter().zip(b.coeffs()).position(|(x, y)| x != y),
        Err(_) => Some(0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dwork::{char_series, power_sums_from_c, DworkParams};
    use crate::padic::{is_irreducible_mod_p, specialize_t};
    use crate::polytope::{LatticePoint, RectDelta};
    use num_bigint::BigInt;

    fn delta33() -> RectDelta {
        RectDelta::new(3, 3).unwrap()
    }

    fn golden(p: u64) -> FPoly {
        let d = delta33();
        let mut f = FPoly::new(d, p, 1).unwrap();
        for (i, v) in d.points().into_iter().enumerate() {
            f.set_int(v, (3 * i as i64 + 1) % p as i64).unwrap();
        }
        f
    }

    fn x1_plus_x2(p: u64) -> FPoly {
        let mut f = FPoly::new(delta33(), p, 1).unwrap();
        f.set_int(LatticePoint::new(1, 0), 1).unwrap();
        f.set_int(LatticePoint::new(0, 1), 1).unwrap();
        f
    }

    #[test]
    fn linear_sum_is_one() {
        for k in 1..=2 {
            let s = exp_sum_chi(&x1_plus_x2(5), 1, k, DEFAULT_BUDGET, Exec::Parallel).unwrap();
            assert_eq!(s, CycInt::one(5, 1), "k={k}");
        }
    }

    #[test]
    fn trivial_character_counts_points() {
        let f = golden(5);
        for k in 1..=2u32 {
            let h = trace_histogram(&f, k, 2, None, DEFAULT_BUDGET, Exec::Sequential).unwrap();
            let qk = 5u64.pow(k) - 1;
            assert_eq!(h.iter().sum::<u64>(), qk * qk);
            let s = exp_sum_t(&f, k, 2, 8, DEFAULT_BUDGET, Exec::Parallel).unwrap();
            assert_eq!(s.coeff(0)[0], qk * qk % 25);
        }
    }

    #[test]
    fn independent_of_field_model() {
        let f = golden(5);
        let default = default_modulus(5, 2);
        let other = (0..25u64)
            .map(|c| vec![c % 5, c / 5, 1])
            .find(|g| *g != default && is_irreducible_mod_p(g, 5))
            .unwrap();
        let a = trace_histogram(&f, 2, 3, None, DEFAULT_BUDGET, Exec::Parallel).unwrap();
        let b = trace_histogram(&f, 2, 3, Some(other), DEFAULT_BUDGET, Exec::Sequential).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn specialization_commutes_with_summation() {
        let f = golden(5);
        for (m, np, nt) in [(1u32, 3u32, 12usize), (2, 2, 40)] {
            let s = exp_sum_t(&f, 1, np, nt, DEFAULT_BUDGET, Exec::Parallel).unwrap();
            let via_t = specialize_t(&s, m).unwrap();
            let direct = exp_sum_chi(&f, m, 1, DEFAULT_BUDGET, Exec::Parallel)
                .unwrap()
                .reduce(np)
                .unwrap();
            assert_eq!(via_t, direct, "m={m}");
        }
    }

    #[test]
    fn cross_check_catches_corruption_and_empty_ranges() {
        let f = golden(5);
        let c = char_series(&f, &DworkParams::defaults(f.delta(), 5, 1), Exec::Parallel).unwrap();
        let params = CrossCheckParams {
            ks: vec![1],
            ms: vec![],
            np: 2,
            nt: 40,
            budget: DEFAULT_BUDGET,
        };
        let exact = vec![c.exact_below(1)];
        let good = cross_check(&f, &power_sums_from_c(&c, 1), &exact, &params, Exec::Parallel);
        assert!(good.pass, "{:?}", good.rows);
        let bad_c = c.with_corrupted_h1(1);
        let bad = cross_check(&f, &power_sums_from_c(&bad_c, 1), &exact, &params, Exec::Parallel);
        assert!(!bad.pass);
        assert_eq!(bad.rows[0].first_mismatch, Some(1));
        let empty = CrossCheckParams { ks: vec![], ..params };
        let r = cross_check(&f, &[], &[], &empty, Exec::Parallel);
        assert!(r.pass && r.rows.is_empty() && !r.warnings.is_empty());
    }

    #[test]
    fn budget_and_input_errors() {
        let f = golden(5);
        assert_eq!(
            trace_histogram(&f, 3, 2, None, 1000, Exec::Parallel),
            Err(OracleError::BudgetExceeded {
                needed: 125 * 125,
                budget: 1000
            })
        );
        assert!(matches!(
            exp_sum_chi(&f, 0, 1, DEFAULT_BUDGET, Exec::Parallel),
            Err(OracleError::BadInput(_))
        ));
        let zero = FPoly::new(delta33(), 5, 1).unwrap();
        let s = exp_sum_chi(&zero, 1, 1, DEFAULT_BUDGET, Exec::Parallel).unwrap();
        assert_eq!(s, CycInt::from_int(5, 1, BigInt::from(16)));
    }
}
