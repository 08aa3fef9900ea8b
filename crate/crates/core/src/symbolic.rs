//! Exact polynomials in the coefficients `a_v` of `f`: the expansion
//! coefficients `B_v`, the factorial factors `U` and `Q`, the genericity
//! polynomials `G` and their nonvanishing witnesses.
//!
//! Variables `a_{0,0}`, `a_{d1,0}`, `a_{0,d2}` and `a_{d1,d2}` are fixed to 1
//! everywhere in this module.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::exec::Exec;
use crate::fpoly::FPoly;
use crate::gnp::{
    cost_matrix, for_each_at_level, min_assignment, perm_sign, CostModel, CostSpec, GnpError, ResidueClass,
};
use crate::padic::{artin_hasse_coeffs, is_prime};
use crate::polytope::{LatticePoint, RectDelta, Simplex};
use crate::rat::{fmt_q, parse_q, q_mod, Q};

/// Default cap on the number of permutations visited per enumeration.
pub const DEFAULT_BUDGET: u64 = 50_000_000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SymbolicError {
    #[error("permutation uses a pair with a negative factorial argument")]
    InfeasiblePermutation,
    #[error("enumeration needs more than {needed} permutations, budget is {budget}")]
    Budget { needed: u64, budget: u64 },
    #[error("no nonzero level below {bound} for n={n}")]
    NotFound { n: u64, bound: u64 },
    #[error("bad reduction: {0}")]
    BadReduction(String),
    #[error("bad witness: {0}")]
    BadWitness(String),
    #[error("greedy witness construction got stuck at row {row}")]
    NoWitness { row: usize },
    #[error("unsupported input: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Gnp(#[from] GnpError),
}

/// The four normalized points.
fn is_normalized(delta: &RectDelta, v: LatticePoint) -> bool {
    (v.v1 == 0 || v.v1 == delta.d1()) && (v.v2 == 0 || v.v2 == delta.d2())
}

/// A monomial `∏ a_v^{e_v}` as sorted `(v, e_v)` pairs with `e_v > 0`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(Vec<(LatticePoint, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    /// Builds a monomial from factors, dropping the normalized variables.
    pub fn new(delta: &RectDelta, factors: impl IntoIterator<Item = (LatticePoint, u32)>) -> Self {
        let mut map: BTreeMap<LatticePoint, u32> = BTreeMap::new();
        for (v, e) in factors {
            if e > 0 && !is_normalized(delta, v) {
                *map.entry(v).or_default() += e;
            }
        }
        Monomial(map.into_iter().collect())
    }

    pub fn factors(&self) -> &[(LatticePoint, u32)] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    pub fn exponent(&self, v: LatticePoint) -> u32 {
        self.0.iter().find(|(w, _)| *w == v).map_or(0, |(_, e)| *e)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut map: BTreeMap<LatticePoint, u32> = self.0.iter().copied().collect();
        for &(v, e) in &other.0 {
            *map.entry(v).or_default() += e;
        }
        Monomial(map.into_iter().collect())
    }

    /// `Σ e_v·v`.
    pub fn weight_vector(&self) -> (u64, u64) {
        self.0.iter().fold((0, 0), |(a, b), (v, e)| {
            (a + *e as u64 * v.v1 as u64, b + *e as u64 * v.v2 as u64)
        })
    }

    fn to_json(&self) -> Value {
        let m: serde_json::Map<String, Value> = self.0.iter().map(|(v, e)| (v.key(), json!(e))).collect();
        Value::Object(m)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|(v, e)| match e {
                1 => format!("a_{{{},{}}}", v.v1, v.v2),
                _ => format!("a_{{{},{}}}^{e}", v.v1, v.v2),
            })
            .collect();
        write!(f, "{}", parts.join("·"))
    }
}

/// Polynomial in the `a_v` with exact rational coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MPoly {
    terms: BTreeMap<Monomial, Q>,
}

impl MPoly {
    pub fn zero() -> Self {
        MPoly::default()
    }

    pub fn constant(c: Q) -> Self {
        let mut p = MPoly::zero();
        p.add_term(Monomial::one(), c);
        p
    }

    pub fn add_term(&mut self, m: Monomial, c: Q) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(m).or_insert_with(Q::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.retain(|_, c| !c.is_zero());
        }
    }

    pub fn add_assign(&mut self, other: &MPoly) {
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c.clone());
        }
    }

    pub fn mul(&self, other: &MPoly) -> MPoly {
        let mut out = MPoly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Monomial, &Q)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> Option<&Q> {
        self.terms.get(m)
    }

    pub fn support(&self) -> Vec<Monomial> {
        self.terms.keys().cloned().collect()
    }

    /// Distinct total degrees of the monomials.
    pub fn degrees(&self) -> Vec<u32> {
        let mut d: Vec<u32> = self.terms.keys().map(Monomial::degree).collect();
        d.sort_unstable();
        d.dedup();
        d
    }

    /// All coefficients are integers.
    pub fn is_integral(&self) -> bool {
        self.terms.values().all(|c| c.is_integer())
    }

    /// Value mod `p` at `a_v = value(v)`; `None` if a coefficient has `p` in
    /// its denominator.
    pub fn eval_mod(&self, p: u64, value: impl Fn(LatticePoint) -> u64) -> Option<u64> {
        let mut acc = 0u64;
        for (m, c) in &self.terms {
            let mut t = q_mod(c, p)?;
            for &(v, e) in m.factors() {
                t = t * pow_mod(value(v) % p, e as u64, p) % p;
            }
            acc = (acc + t) % p;
        }
        Some(acc)
    }

    /// `[{"monomial":{"1,0":2},"coeff":"-35"}, …]` in monomial order.
    pub fn to_json(&self) -> Value {
        Value::Array(
            self.terms
                .iter()
                .map(|(m, c)| json!({"monomial": m.to_json(), "coeff": fmt_q(c)}))
                .collect(),
        )
    }

    pub fn from_json(delta: &RectDelta, v: &Value) -> Option<MPoly> {
        let mut out = MPoly::zero();
        for t in v.as_array()? {
            let mono = t.get("monomial")?.as_object()?;
            let mut factors = Vec::new();
            for (k, e) in mono {
                factors.push((LatticePoint::parse_key(k)?, e.as_u64()?.try_into().ok()?));
            }
            out.add_term(Monomial::new(delta, factors), parse_q(t.get("coeff")?.as_str()?)?);
        }
        Some(out)
    }
}

impl fmt::Display for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().map(|(m, c)| format!("({})·{m}", fmt_q(c))).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    while e > 0 {
        if e & 1 == 1 {
            r = ((r as u128 * b as u128) % m as u128) as u64;
        }
        b = ((b as u128 * b as u128) % m as u128) as u64;
        e >>= 1;
    }
    r
}

/// A power series in `π` with [`MPoly`] coefficients, truncated.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PiPoly {
    terms: Vec<(u32, MPoly)>,
}

impl PiPoly {
    pub fn terms(&self) -> &[(u32, MPoly)] {
        &self.terms
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Lowest `π`-power with a nonzero coefficient.
    pub fn order(&self) -> Option<u32> {
        self.terms.first().map(|(k, _)| *k)
    }

    pub fn leading(&self) -> Option<&MPoly> {
        self.terms.first().map(|(_, c)| c)
    }

    pub fn coeff(&self, k: u32) -> Option<&MPoly> {
        self.terms.iter().find(|(j, _)| *j == k).map(|(_, c)| c)
    }
}

struct BEnum<'a> {
    delta: &'a RectDelta,
    pts: Vec<LatticePoint>,
    u: Vec<Q>,
    max: u32,
    chosen: Vec<(LatticePoint, u32)>,
    out: BTreeMap<u32, MPoly>,
}

impl BEnum<'_> {
    fn run(&mut self, idx: usize, rem: (u32, u32), count: u32, coeff: Q) {
        if rem == (0, 0) {
            let mono = Monomial::new(self.delta, self.chosen.iter().copied());
            for j0 in 0..=self.max - count {
                let c = &coeff * &self.u[j0 as usize];
                self.out.entry(count + j0).or_default().add_term(mono.clone(), c);
            }
            return;
        }
        if idx == self.pts.len() {
            return;
        }
        let lower = ord_b(self.delta, LatticePoint::new(rem.0, rem.1));
        if count + lower > self.max {
            return;
        }
        let w = self.pts[idx];
        let mut j = 0u32;
        let mut r = rem;
        loop {
            let c = &coeff * &self.u[j as usize];
            if j > 0 {
                self.chosen.push((w, j));
            }
            self.run(idx + 1, r, count + j, c);
            if j > 0 {
                self.chosen.pop();
            }
            if r.0 < w.v1 || r.1 < w.v2 || count + j + 1 > self.max {
                break;
            }
            r = (r.0 - w.v1, r.1 - w.v2);
            j += 1;
        }
    }
}

/// `B_v = Σ ∏ u_{j_w} a_w^{j_w} π^{Σ j_w}` over all `(j_w)_{w∈Δ}` with
/// `Σ j_w·w = v`, keeping powers up to `max_pi`.
pub fn b_poly(delta: &RectDelta, p: u64, v: LatticePoint, max_pi: u32) -> PiPoly {
    let pts: Vec<LatticePoint> = delta.points().into_iter().filter(|w| !w.is_origin()).rev().collect();
    let mut e = BEnum {
        delta,
        pts,
        u: artin_hasse_coeffs(p, max_pi as usize),
        max: max_pi,
        chosen: Vec::new(),
        out: BTreeMap::new(),
    };
    if ord_b(delta, v) <= max_pi {
        e.run(0, (v.v1, v.v2), 0, Q::one());
    }
    PiPoly {
        terms: e.out.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
    }
}

/// `π`-order of `B_v`: the least number of nonzero points of `Δ` summing to
/// `v`, which is `⌈w(v)⌉`.
pub fn ord_b(delta: &RectDelta, v: LatticePoint) -> u32 {
    let d = delta.big_d();
    delta.weight_num(v).div_ceil(d) as u32
}

/// [`ord_b`] by dynamic programming over the box below `v`.
pub fn ord_b_enumerated(delta: &RectDelta, v: LatticePoint) -> u32 {
    let (n1, n2) = (v.v1 as usize + 1, v.v2 as usize + 1);
    let pts: Vec<LatticePoint> = delta.points().into_iter().filter(|w| !w.is_origin()).collect();
    let mut best = vec![u32::MAX; n1 * n2];
    best[0] = 0;
    for a in 0..n1 {
        for b in 0..n2 {
            if a == 0 && b == 0 {
                continue;
            }
            let mut m = u32::MAX;
            for w in &pts {
                let (wa, wb) = (w.v1 as usize, w.v2 as usize);
                if wa <= a && wb <= b {
                    let prev = best[(a - wa) * n2 + (b - wb)];
                    if prev != u32::MAX {
                        m = m.min(prev + 1);
                    }
                }
            }
            best[a * n2 + b] = m;
        }
    }
    best[n1 * n2 - 1]
}

/// Coordinatewise stand-ins `(p1, p2)` for a prime of a residue class.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub p1: u64,
    pub p2: u64,
}

impl Witness {
    pub fn prime(p: u64) -> Self {
        Witness { p1: p, p2: p }
    }

    /// The pair from [`ResidueClass::witness_pair`] above `2D²`.
    pub fn default_for(delta: &RectDelta, class: &ResidueClass) -> Self {
        let d = delta.big_d();
        let (p1, p2) = class.witness_pair(delta, 2 * d * d);
        Witness { p1, p2 }
    }

    fn check(&self, delta: &RectDelta, class: &ResidueClass) -> Result<(), SymbolicError> {
        if self.p1 % delta.d1() as u64 != class.r1 as u64 || self.p2 % delta.d2() as u64 != class.r2 as u64 {
            return Err(SymbolicError::BadWitness(format!(
                "({},{}) not in class {class}",
                self.p1, self.p2
            )));
        }
        Ok(())
    }
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.p1 == self.p2 {
            write!(f, "{}", self.p1)
        } else {
            write!(f, "({},{})", self.p1, self.p2)
        }
    }
}

fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * k)
}

/// `(⌊(p1·i1 − j1)/d1⌋, ⌊(p2·i2 − j2)/d2⌋)`, or `None` off the quadrant.
fn floor_pair(delta: &RectDelta, w: Witness, i: LatticePoint, j: LatticePoint) -> Option<(u64, u64)> {
    let a = w.p1 as i64 * i.v1 as i64 - j.v1 as i64;
    let b = w.p2 as i64 * i.v2 as i64 - j.v2 as i64;
    (a >= 0 && b >= 0).then(|| ((a / delta.d1() as i64) as u64, (b / delta.d2() as i64) as u64))
}

/// The two factorial arguments of the `(i, j)` factor of `Q`: the larger
/// floor minus the smaller one, and the smaller one. Off the diagonal this
/// is the simplex-wise formula; on it either order may occur.
fn q_args(delta: &RectDelta, w: Witness, i: LatticePoint, j: LatticePoint) -> Option<(u64, u64)> {
    let (f1, f2) = floor_pair(delta, w, i, j)?;
    let on_diagonal = i.v1 as u64 * delta.d2() as u64 == i.v2 as u64 * delta.d1() as u64;
    match delta.simplex_class(i) {
        _ if on_diagonal => Some((f1.min(f2), f1.abs_diff(f2))),
        Simplex::S2 => Some((f1, f2.checked_sub(f1)?)),
        Simplex::S1 => Some((f2, f1.checked_sub(f2)?)),
    }
}

/// The two factorial arguments of the row-`i` factor of `U`.
fn u_args(delta: &RectDelta, w: Witness, i: LatticePoint) -> (u64, u64) {
    let (d1, d2) = (delta.d1() as i64, delta.d2() as i64);
    let x1 = w.p1 as i64 * i.v1 as i64 * d2;
    let x2 = w.p2 as i64 * i.v2 as i64 * d1;
    let big_d = d1 * d2;
    let (a, b) = match delta.simplex_class(i) {
        Simplex::S2 => (x1 / big_d, (x2 - x1).max(0) / big_d),
        Simplex::S1 => (x2 / big_d, (x1 - x2).max(0) / big_d),
    };
    (a as u64, b as u64)
}

fn q_entry(delta: &RectDelta, w: Witness, i: LatticePoint, j: LatticePoint) -> Option<Q> {
    let (a, b) = q_args(delta, w, i, j)?;
    Some(Q::new(BigInt::one(), factorial(a) * factorial(b)))
}

/// `Q_{S,σ} = Q_{S1,σ}·Q_{S2,σ}` with `σ(pts[t]) = pts[perm[t]]`.
pub fn q_factor(delta: &RectDelta, p: u64, pts: &[LatticePoint], perm: &[usize]) -> Result<Q, SymbolicError> {
    q_factor_with(delta, Witness::prime(p), pts, perm)
}

pub fn q_factor_with(delta: &RectDelta, w: Witness, pts: &[LatticePoint], perm: &[usize]) -> Result<Q, SymbolicError> {
    let mut acc = Q::one();
    for (t, &s) in perm.iter().enumerate() {
        acc *= q_entry(delta, w, pts[t], pts[s]).ok_or(SymbolicError::InfeasiblePermutation)?;
    }
    Ok(acc)
}

/// `U_{k_n,p}`.
pub fn u_factor(delta: &RectDelta, p: u64, n: u64) -> BigInt {
    u_factor_with(delta, Witness::prime(p), n)
}

pub fn u_factor_with(delta: &RectDelta, w: Witness, n: u64) -> BigInt {
    delta
        .filtration(n)
        .into_iter()
        .map(|i| {
            let (a, b) = u_args(delta, w, i);
            factorial(a) * factorial(b)
        })
        .product()
}

/// `r_σ(i) = (R·i − σ(i)) mod (d1, d2)` as a point of the residue box.
fn residue(delta: &RectDelta, class: &ResidueClass, i: LatticePoint, j: LatticePoint) -> LatticePoint {
    let (d1, d2) = (delta.d1() as i64, delta.d2() as i64);
    let a = (class.r1 as i64 * i.v1 as i64 - j.v1 as i64).rem_euclid(d1);
    let b = (class.r2 as i64 * i.v2 as i64 - j.v2 as i64).rem_euclid(d2);
    LatticePoint::new(a as u32, b as u32)
}

/// `G^ℓ_{k_n,R}` built at one witness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GPoly {
    pub class: ResidueClass,
    pub n: u64,
    pub k_n: usize,
    pub level: u64,
    pub witness: Witness,
    /// Number of permutations at the level.
    pub perms: u64,
    pub poly: MPoly,
}

impl GPoly {
    pub fn to_json(&self) -> Value {
        json!({
            "class": [self.class.r1, self.class.r2],
            "n": self.n,
            "k_n": self.k_n,
            "level": self.level,
            "witness": [self.witness.p1, self.witness.p2],
            "perms": self.perms,
            "poly": self.poly.to_json(),
        })
    }
}

/// Per-entry data shared by the level enumeration.
struct Entries {
    k: usize,
    cells: usize,
    residue_idx: Vec<usize>,
    /// `U_i·Q_{ij}·L_i`, an integer, or `None` when undefined.
    num: Vec<Option<BigInt>>,
    /// `∏ L_i`.
    denom: BigInt,
}

impl Entries {
    fn new(delta: &RectDelta, class: &ResidueClass, w: Witness, pts: &[LatticePoint]) -> Entries {
        let k = pts.len();
        let d2 = delta.d2() as usize;
        let mut residue_idx = Vec::with_capacity(k * k);
        let mut num = Vec::with_capacity(k * k);
        let mut denom = BigInt::one();
        for &i in pts {
            let (ua, ub) = u_args(delta, w, i);
            let u = Q::from_integer(factorial(ua) * factorial(ub));
            let row: Vec<Option<Q>> = pts.iter().map(|&j| q_entry(delta, w, i, j).map(|q| &u * q)).collect();
            let l = row.iter().flatten().fold(BigInt::one(), |acc, e| acc.lcm(e.denom()));
            for (&j, e) in pts.iter().zip(row) {
                let r = residue(delta, class, i, j);
                residue_idx.push(r.v1 as usize * d2 + r.v2 as usize);
                num.push(e.map(|e| (e * Q::from_integer(l.clone())).to_integer()));
            }
            denom *= l;
        }
        Entries {
            k,
            cells: delta.big_d() as usize,
            residue_idx,
            num,
            denom,
        }
    }
}

type Acc = HashMap<Vec<u32>, BigInt>;

/// `Σ_{σ ∈ Sym^ℓ(F_n)} (−1)^{k_n} sgn(σ)·U·Q·∏ a_{r_σ(i)}`, enumerating the
/// permutations of cost exactly `M⁰ + ℓ/D` under the residue model.
pub fn g_poly(
    delta: &RectDelta,
    class: &ResidueClass,
    n: u64,
    level: u64,
    witness: Witness,
    budget: u64,
    exec: Exec,
) -> Result<GPoly, SymbolicError> {
    witness.check(delta, class)?;
    let pts = delta.filtration(n);
    let k = pts.len();
    let m = cost_matrix(delta, CostSpec::Class(*class, CostModel::Residue), &pts);
    let target = min_assignment(&m, exec)?.scaled + level as i64;
    let e = Entries::new(delta, class, witness, &pts);
    let k_sign: i32 = if k % 2 == 0 { 1 } else { -1 };
    let branches = exec.map_range(k.max(1), |c| -> Result<(Acc, u64), SymbolicError> {
        let mut acc: Acc = HashMap::new();
        let mut count = 0u64;
        let mut err = None;
        let first = (k > 0).then_some(c);
        for_each_at_level(&m, target, first, |perm| {
            count += 1;
            if count > budget {
                err = Some(SymbolicError::Budget { needed: count, budget });
                return false;
            }
            let mut key = vec![0u32; e.cells];
            let mut prod = BigInt::from(k_sign * perm_sign(perm));
            for (i, &j) in perm.iter().enumerate() {
                match &e.num[i * e.k + j] {
                    Some(v) => prod *= v,
                    None => {
                        err = Some(SymbolicError::InfeasiblePermutation);
                        return false;
                    }
                }
                key[e.residue_idx[i * e.k + j]] += 1;
            }
            *acc.entry(key).or_insert_with(BigInt::zero) += prod;
            true
        });
        match err {
            Some(e) => Err(e),
            None => Ok((acc, count)),
        }
    });
    let mut total: Acc = HashMap::new();
    let mut perms = 0u64;
    for b in branches {
        let (acc, count) = b?;
        perms += count;
        if perms > budget {
            return Err(SymbolicError::Budget { needed: perms, budget });
        }
        for (key, v) in acc {
            *total.entry(key).or_insert_with(BigInt::zero) += v;
        }
    }
    let d2 = delta.d2() as usize;
    let mut poly = MPoly::zero();
    for (key, v) in total {
        if v.is_zero() {
            continue;
        }
        let factors = key
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(idx, &c)| (LatticePoint::new((idx / d2) as u32, (idx % d2) as u32), c));
        poly.add_term(Monomial::new(delta, factors), Q::new(v, e.denom.clone()));
    }
    Ok(GPoly {
        class: *class,
        n,
        k_n: k,
        level,
        witness,
        perms,
        poly,
    })
}

/// The least `ℓ < D²` with `G^ℓ_{k_n,R} ≠ 0` at the default witness.
pub fn least_level(
    delta: &RectDelta,
    class: &ResidueClass,
    n: u64,
    budget: u64,
    exec: Exec,
) -> Result<GPoly, SymbolicError> {
    least_level_with(delta, class, n, Witness::default_for(delta, class), budget, exec)
}

pub fn least_level_with(
    delta: &RectDelta,
    class: &ResidueClass,
    n: u64,
    witness: Witness,
    budget: u64,
    exec: Exec,
) -> Result<GPoly, SymbolicError> {
    let bound = delta.big_d() * delta.big_d();
    let mut spent = 0u64;
    for level in 0..bound {
        let g = g_poly(delta, class, n, level, witness, budget - spent, exec)?;
        if !g.poly.is_zero() {
            return Ok(g);
        }
        spent += g.perms;
    }
    Err(SymbolicError::NotFound { n, bound })
}

/// A permutation found by the greedy Ξ-order construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct XiWitness {
    pub perm: Vec<usize>,
    pub monomial: Monomial,
    pub level: u64,
}

/// Whether the unassigned rows can still be matched to the unused columns
/// through allowed entries (augmenting paths).
fn completes(k: usize, allowed: &[bool], perm: &[Option<usize>], col_used: &[bool]) -> bool {
    fn augment(i: usize, k: usize, allowed: &[bool], owner: &mut [Option<usize>], seen: &mut [bool]) -> bool {
        for j in 0..k {
            if allowed[i * k + j] && !seen[j] {
                seen[j] = true;
                if owner[j].is_none_or(|o| augment(o, k, allowed, owner, seen)) {
                    owner[j] = Some(i);
                    return true;
                }
            }
        }
        false
    }
    let mut owner: Vec<Option<usize>> = vec![None; k];
    for (j, used) in col_used.iter().enumerate() {
        if *used {
            // a sentinel row that can never be re-routed
            owner[j] = Some(usize::MAX);
        }
    }
    let free_rows: Vec<usize> = (0..k).filter(|&i| perm[i].is_none()).collect();
    for i in free_rows {
        let mut seen: Vec<bool> = col_used.to_vec();
        if !augment(i, k, allowed, &mut owner, &mut seen) {
            return false;
        }
    }
    true
}

/// Ξ-order key of a residue: weight, then first coordinate, then second.
fn xi_key(delta: &RectDelta, r: LatticePoint) -> (u64, u32, u32) {
    (delta.weight_num(r), r.v1, r.v2)
}

/// Repeatedly assigns the highest-Ξ residues inside the diagonal blocks
/// `(F_n)_1 × (F_n)_1` and `(F_n)_2 × (F_n)_2` of the residue matrix,
/// crossing off rows and columns. An entry is skipped when taking it would
/// leave the remaining rows without a feasible completion.
pub fn xi_witness(delta: &RectDelta, class: &ResidueClass, n: u64, exec: Exec) -> Result<XiWitness, SymbolicError> {
    let pts = delta.filtration(n);
    let k = pts.len();
    let m = cost_matrix(delta, CostSpec::Class(*class, CostModel::Residue), &pts);
    let allowed: Vec<bool> = (0..k * k)
        .map(|e| {
            let (i, j) = (e / k, e % k);
            delta.simplex_class(pts[i]) == delta.simplex_class(pts[j]) && m.scaled(i, j).is_some()
        })
        .collect();
    let mut order: Vec<(usize, usize)> = (0..k)
        .flat_map(|i| (0..k).map(move |j| (i, j)))
        .filter(|&(i, j)| allowed[i * k + j])
        .collect();
    // stable sort keeps row-major order among equal residues
    order.sort_by_key(|&(i, j)| std::cmp::Reverse(xi_key(delta, residue(delta, class, pts[i], pts[j]))));
    let mut perm: Vec<Option<usize>> = vec![None; k];
    let mut col_used = vec![false; k];
    for (i, j) in order {
        if perm[i].is_some() || col_used[j] {
            continue;
        }
        perm[i] = Some(j);
        col_used[j] = true;
        if !completes(k, &allowed, &perm, &col_used) {
            perm[i] = None;
            col_used[j] = false;
        }
    }
    if let Some(row) = perm.iter().position(Option::is_none) {
        return Err(SymbolicError::NoWitness { row });
    }
    let perm: Vec<usize> = perm.into_iter().flatten().collect();
    let monomial = Monomial::new(
        delta,
        perm.iter()
            .enumerate()
            .map(|(i, &j)| (residue(delta, class, pts[i], pts[j]), 1)),
    );
    let m0 = min_assignment(&m, exec)?.scaled;
    let cost = m.perm_cost(&perm).ok_or(SymbolicError::InfeasiblePermutation)?;
    Ok(XiWitness {
        perm,
        monomial,
        level: (cost - m0) as u64,
    })
}

/// Number of permutations at `level` whose monomial `∏ a_{r_σ(i)}` equals
/// `monomial`.
pub fn perms_with_monomial(
    delta: &RectDelta,
    class: &ResidueClass,
    n: u64,
    level: u64,
    monomial: &Monomial,
    budget: u64,
    exec: Exec,
) -> Result<u64, SymbolicError> {
    let pts = delta.filtration(n);
    let m = cost_matrix(delta, CostSpec::Class(*class, CostModel::Residue), &pts);
    let target = min_assignment(&m, exec)?.scaled + level as i64;
    let mut hits = 0u64;
    let mut seen = 0u64;
    for_each_at_level(&m, target, None, |perm| {
        seen += 1;
        let mono = Monomial::new(
            delta,
            perm.iter()
                .enumerate()
                .map(|(i, &j)| (residue(delta, class, pts[i], pts[j]), 1)),
        );
        if mono == *monomial {
            hits += 1;
        }
        seen <= budget
    });
    if seen > budget {
        return Err(SymbolicError::Budget { needed: seen, budget });
    }
    Ok(hits)
}

/// Membership of `f` in the generic loci.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    /// `G(f)·∏ a_v ≠ 0`.
    InU,
    /// `G(f) ≠ 0` but some `a_v` vanishes.
    InU0Only,
    /// `G(f) = 0`.
    Outside,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Verdict::InU => "IN_U",
            Verdict::InU0Only => "IN_U0_ONLY",
            Verdict::Outside => "OUTSIDE",
        };
        write!(f, "{s}")
    }
}

/// `G^{ℓ(n)}_{k_n,R}` at the prime itself, for one `n ∈ I_D`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenericityComponent {
    pub n: u64,
    pub k_n: usize,
    pub level: u64,
    pub level_witness: Witness,
    pub poly: MPoly,
}

/// The genericity polynomials of the class of a prime `p`, ready to be
/// evaluated at many `f`.
#[derive(Clone, Debug)]
pub struct GenericityPolys {
    pub delta: RectDelta,
    pub p: u64,
    pub class: ResidueClass,
    pub components: Vec<GenericityComponent>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ComponentValue {
    pub n: u64,
    pub level: u64,
    pub value: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GenericityReport {
    pub p: u64,
    pub class: ResidueClass,
    pub verdict: Verdict,
    /// `G(f)` mod `p` up to a nonzero normalization factor.
    pub g_value: u64,
    pub full_support: bool,
    pub components: Vec<ComponentValue>,
}

impl GenericityPolys {
    /// Levels come from the default witness of the class; the polynomials
    /// themselves are rebuilt with `U` and `Q` at `p`.
    pub fn build(delta: &RectDelta, p: u64, budget: u64, exec: Exec) -> Result<Self, SymbolicError> {
        if !is_prime(p) || delta.big_d() % p == 0 {
            return Err(SymbolicError::BadReduction(format!("{p} is not a prime coprime to D")));
        }
        let class = ResidueClass::of_prime(delta, p);
        let mut components = Vec::new();
        if !class.is_trivial() {
            for n in delta.i_set() {
                let lw = Witness::default_for(delta, &class);
                let least = least_level_with(delta, &class, n, lw, budget, exec)?;
                let g = g_poly(delta, &class, n, least.level, Witness::prime(p), budget, exec)?;
                components.push(GenericityComponent {
                    n,
                    k_n: g.k_n,
                    level: g.level,
                    level_witness: lw,
                    poly: g.poly,
                });
            }
        }
        Ok(GenericityPolys {
            delta: *delta,
            p,
            class,
            components,
        })
    }

    /// Evaluates every component at `f` after moving the vertex
    /// coefficients to 1 by `x_c ↦ λ_c·x_c`, `f ↦ c·f`.
    pub fn test(&self, f: &FPoly) -> Result<GenericityReport, SymbolicError> {
        let p = self.p;
        if f.p() != p || f.delta() != &self.delta {
            return Err(SymbolicError::Unsupported(
                "f does not match the prime or rectangle".into(),
            ));
        }
        if f.a() != 1 {
            return Err(SymbolicError::Unsupported("genericity is tested over F_p only".into()));
        }
        let coeff = |v: LatticePoint| f.prime_field_coeff(v).unwrap_or(0) % p;
        let [v10, v01, v11] = self.delta.vertices();
        let (a10, a01, a11) = (coeff(v10), coeff(v01), coeff(v11));
        if a10 == 0 || a01 == 0 || a11 == 0 {
            return Err(SymbolicError::BadReduction(
                "a vertex coefficient vanishes mod p".into(),
            ));
        }
        let inv = |x: u64| pow_mod(x, p - 2, p);
        // λ1^{d1} and λ2^{d2}
        let l1 = a01 * inv(a11) % p;
        let l2 = a10 * inv(a11) % p;
        let (d1, d2) = (self.delta.d1() as u64, self.delta.d2() as u64);
        let mut components = Vec::new();
        let mut g_value = 1u64;
        for comp in &self.components {
            let base = comp
                .poly
                .iter()
                .map(|(m, _)| m.weight_vector())
                .fold((u64::MAX, u64::MAX), |(a, b), (x, y)| (a.min(x), b.min(y)));
            let mut value = 0u64;
            for (m, c) in comp.poly.iter() {
                let (s1, s2) = m.weight_vector();
                if (s1 - base.0) % d1 != 0 || (s2 - base.1) % d2 != 0 {
                    return Err(SymbolicError::Unsupported(format!(
                        "monomial {m} breaks the residue grading"
                    )));
                }
                let mut t = q_mod(c, p).ok_or_else(|| {
                    SymbolicError::BadReduction(format!("coefficient {} of {m} is not p-integral", fmt_q(c)))
                })?;
                for &(v, e) in m.factors() {
                    t = t * pow_mod(coeff(v), e as u64, p) % p;
                }
                t = t * pow_mod(l1, (s1 - base.0) / d1, p) % p;
                t = t * pow_mod(l2, (s2 - base.1) / d2, p) % p;
                value = (value + t) % p;
            }
            g_value = g_value * value % p;
            components.push(ComponentValue {
                n: comp.n,
                level: comp.level,
                value,
            });
        }
        let full_support = f.full_support();
        let verdict = match (g_value != 0, full_support) {
            (false, _) => Verdict::Outside,
            (true, true) => Verdict::InU,
            (true, false) => Verdict::InU0Only,
        };
        Ok(GenericityReport {
            p,
            class: self.class,
            verdict,
            g_value,
            full_support,
            components,
        })
    }

    pub fn to_json(&self) -> Value {
        json!({
            "d1": self.delta.d1(),
            "d2": self.delta.d2(),
            "p": self.p,
            "class": [self.class.r1, self.class.r2],
            "components": self.components.iter().map(|c| json!({
                "n": c.n,
                "k_n": c.k_n,
                "level": c.level,
                "level_witness": [c.level_witness.p1, c.level_witness.p2],
                "terms": c.poly.len(),
                "poly": c.poly.to_json(),
            })).collect::<Vec<_>>(),
        })
    }
}

/// One-shot [`GenericityPolys::build`] followed by [`GenericityPolys::test`].
pub fn genericity_test(f: &FPoly, budget: u64, exec: Exec) -> Result<GenericityReport, SymbolicError> {
    GenericityPolys::build(f.delta(), f.p(), budget, exec)?.test(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d33() -> RectDelta {
        RectDelta::new(3, 3).unwrap()
    }

    fn mono(delta: &RectDelta, f: &[((u32, u32), u32)]) -> Monomial {
        Monomial::new(delta, f.iter().map(|&((a, b), e)| (LatticePoint::new(a, b), e)))
    }

    #[test]
    fn b_poly_examples() {
        let d = d33();
        let b0 = b_poly(&d, 5, LatticePoint::ORIGIN, 6);
        let u = artin_hasse_coeffs(5, 6);
        assert_eq!(b0.order(), Some(0));
        for (k, c) in b0.terms() {
            assert_eq!(c, &MPoly::constant(u[*k as usize].clone()));
        }
        let b30 = b_poly(&d, 5, LatticePoint::new(3, 0), 4);
        assert_eq!(b30.order(), Some(1));
        assert_eq!(b30.leading().unwrap(), &MPoly::constant(Q::one()));
        let b40 = b_poly(&d, 5, LatticePoint::new(4, 0), 4);
        assert_eq!(b40.order(), Some(2));
        let lead = b40.leading().unwrap();
        assert_eq!(lead.coeff(&mono(&d, &[((1, 0), 1)])), Some(&Q::one()));
        assert_eq!(lead.coeff(&mono(&d, &[((2, 0), 2)])), Some(&crate::rat::q(1, 2)));
        assert_eq!(lead.len(), 2);
        assert!(b_poly(&d, 5, LatticePoint::new(9, 9), 2).is_empty());
    }

    #[test]
    fn ord_b_closed_form_matches_enumeration() {
        let d = d33();
        assert_eq!(ord_b(&d, LatticePoint::ORIGIN), 0);
        assert_eq!(ord_b(&d, LatticePoint::new(4, 4)), 2);
        assert_eq!(ord_b(&d, LatticePoint::new(0, 4)), 2);
        for d in [d33(), RectDelta::new(3, 4).unwrap(), RectDelta::new(4, 6).unwrap()] {
            for a in 0..15 {
                for b in 0..15 {
                    let v = LatticePoint::new(a, b);
                    assert_eq!(ord_b(&d, v), ord_b_enumerated(&d, v), "{v}");
                }
            }
        }
    }

    #[test]
    fn factor_examples() {
        let d = d33();
        assert_eq!(q_factor(&d, 5, &[LatticePoint::ORIGIN], &[0]).unwrap(), Q::one());
        assert_eq!(u_factor(&d, 5, 0), BigInt::one());
        let i = LatticePoint::new(1, 0);
        assert_eq!(q_factor(&d, 5, &[i], &[0]).unwrap(), Q::one());
        assert!(u_factor(&d, 5, 3) % 5u32 != BigInt::zero());
        let bad = [LatticePoint::new(0, 1), LatticePoint::new(1, 0)];
        assert_eq!(
            q_factor(&d, 5, &bad, &[1, 0]),
            Err(SymbolicError::InfeasiblePermutation)
        );
    }

    #[test]
    fn leading_b_coefficient_carries_q() {
        // the coefficient of a_r in the leading term of B_{p·i−j}, with r the
        // residue of p·i − j, is the (i, j) factor of Q
        let d = d33();
        let p = 5;
        let class = ResidueClass::of_prime(&d, p);
        let pts = d.filtration(3);
        for &i in &pts {
            for &j in &pts {
                let Some(v) = i.scaled_minus(p as u32, j) else { continue };
                let r = residue(&d, &class, i, j);
                let (a, b) = ((v.v1 - r.v1) / 3, (v.v2 - r.v2) / 3);
                let uses = a.max(b) + u32::from(!r.is_origin());
                if uses != ord_b(&d, v) {
                    continue;
                }
                let b = b_poly(&d, p, v, ord_b(&d, v));
                let lead = b.leading().unwrap();
                let m = Monomial::new(&d, [(r, 1)]);
                let qf = q_entry(&d, Witness::prime(p), i, j).unwrap();
                assert_eq!(lead.coeff(&m), Some(&qf), "i={i} j={j}");
            }
        }
    }

    #[test]
    fn g_poly_examples() {
        let d = d33();
        for class in ResidueClass::all_nontrivial(&d) {
            let w = Witness::default_for(&d, &class);
            let g = g_poly(&d, &class, 0, 0, w, DEFAULT_BUDGET, Exec::Sequential).unwrap();
            assert_eq!(g.poly, MPoly::constant(-Q::one()));
        }
        let class = ResidueClass::new(&d, 2, 2).unwrap();
        let g = g_poly(&d, &class, 3, 0, Witness::prime(83), DEFAULT_BUDGET, Exec::Parallel).unwrap();
        assert!(!g.poly.is_zero());
        assert!(g.poly.is_integral());
        let h = g_poly(&d, &class, 3, 0, Witness::prime(167), DEFAULT_BUDGET, Exec::Sequential).unwrap();
        assert_eq!(g.poly.support(), h.poly.support());
        let s = g_poly(&d, &class, 3, 0, Witness::prime(83), DEFAULT_BUDGET, Exec::Sequential).unwrap();
        assert_eq!(s, g);
        assert!(matches!(
            g_poly(&d, &class, 3, 0, Witness::prime(83), 0, Exec::Sequential),
            Err(SymbolicError::Budget { .. })
        ));
        assert!(g_poly(&d, &class, 3, 0, Witness::prime(97), 1, Exec::Sequential).is_err());
    }

    #[test]
    fn xi_witness_trivial_and_block_diagonal() {
        let d = d33();
        for class in ResidueClass::all_nontrivial(&d) {
            let w = xi_witness(&d, &class, 0, Exec::Sequential).unwrap();
            assert_eq!((w.perm, w.monomial), (vec![0], Monomial::one()));
        }
        let class = ResidueClass::new(&d, 2, 2).unwrap();
        let pts = d.filtration(6);
        let w = xi_witness(&d, &class, 6, Exec::Sequential).unwrap();
        for (i, &j) in w.perm.iter().enumerate() {
            assert_eq!(d.simplex_class(pts[i]), d.simplex_class(pts[j]));
        }
    }

    #[test]
    fn json_round_trip() {
        let d = d33();
        let mut p = MPoly::zero();
        p.add_term(mono(&d, &[((1, 0), 2)]), crate::rat::qi(-35));
        p.add_term(Monomial::one(), crate::rat::q(1, 2));
        let j = p.to_json();
        assert_eq!(j[1], json!({"monomial": {"1,0": 2}, "coeff": "-35"}));
        assert_eq!(MPoly::from_json(&d, &j), Some(p));
    }
}
