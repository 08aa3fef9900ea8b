//! Galois rings `GR(p^N, e) = (Z/p^N)[x]/(ĝ)` with Frobenius, trace and
//! Teichmüller lifts.

use std::fmt;
use std::sync::Arc;

use smallvec::{smallvec, SmallVec};

use super::PadicError;

pub type GrElem = SmallVec<[u64; 4]>;

#[inline]
pub(crate) fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub(crate) fn checked_pow(p: u64, n: u32) -> Option<u64> {
    let mut r: u64 = 1;
    for _ in 0..n {
        r = r.checked_mul(p)?;
    }
    Some(r)
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

pub(crate) fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Conway polynomials for small `(p, e)`, coefficients low to high, monic.
const CONWAY: &[(u64, usize, &[u64])] = &[
    (2, 1, &[1, 1]),
    (2, 2, &[1, 1, 1]),
    (2, 3, &[1, 1, 0, 1]),
    (2, 4, &[1, 1, 0, 0, 1]),
    (3, 1, &[1, 1]),
    (3, 2, &[2, 2, 1]),
    (3, 3, &[1, 2, 0, 1]),
    (3, 4, &[2, 0, 0, 2, 1]),
    (5, 1, &[3, 1]),
    (5, 2, &[2, 4, 1]),
    (5, 3, &[3, 3, 0, 1]),
    (5, 4, &[2, 4, 4, 0, 1]),
    (7, 1, &[4, 1]),
    (7, 2, &[3, 6, 1]),
    (7, 3, &[4, 0, 6, 1]),
    (11, 1, &[9, 1]),
    (11, 2, &[2, 7, 1]),
    (13, 1, &[11, 1]),
    (13, 2, &[2, 12, 1]),
    (17, 1, &[14, 1]),
    (17, 2, &[3, 16, 1]),
];

// ---- polynomials over F_p, low to high, trimmed ----

fn fp_trim(mut a: Vec<u64>) -> Vec<u64> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn fp_inv(a: u64, p: u64) -> u64 {
    let mut r = 1;
    let mut b = a % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, b, p);
        }
        b = mulmod(b, b, p);
        e >>= 1;
    }
    r
}

fn fp_rem(a: &[u64], g: &[u64], p: u64) -> Vec<u64> {
    let mut a = fp_trim(a.to_vec());
    let g = fp_trim(g.to_vec());
    let dg = g.len() - 1;
    let lead_inv = fp_inv(g[dg], p);
    while a.len() > dg {
        let k = a.len() - 1;
        let c = mulmod(a[k], lead_inv, p);
        for i in 0..=dg {
            let s = k - dg + i;
            a[s] = (a[s] + p - mulmod(c, g[i], p)) % p;
        }
        a = fp_trim(a);
    }
    a
}

fn fp_mulmod(a: &[u64], b: &[u64], g: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut c = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            c[i + j] = (c[i + j] + mulmod(x, y, p)) % p;
        }
    }
    fp_rem(&c, g, p)
}

fn fp_powmod(base: &[u64], mut e: u64, g: &[u64], p: u64) -> Vec<u64> {
    let mut r = vec![1u64];
    let mut b = fp_rem(base, g, p);
    while e > 0 {
        if e & 1 == 1 {
            r = fp_mulmod(&r, &b, g, p);
        }
        b = fp_mulmod(&b, &b, g, p);
        e >>= 1;
    }
    r
}

fn fp_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut a = fp_trim(a.to_vec());
    let mut b = fp_trim(b.to_vec());
    while !b.is_empty() {
        let r = fp_rem(&a, &b, p);
        a = b;
        b = r;
    }
    a
}

fn fp_sub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let n = a.len().max(b.len());
    let v = (0..n)
        .map(|i| (a.get(i).copied().unwrap_or(0) + p - b.get(i).copied().unwrap_or(0)) % p)
        .collect();
    fp_trim(v)
}

/// Rabin's test: `g` (monic, degree e) is irreducible over F_p.
pub fn is_irreducible_mod_p(g: &[u64], p: u64) -> bool {
    let g: Vec<u64> = g.iter().map(|c| c % p).collect();
    let g = fp_trim(g);
    if g.len() < 2 {
        return false;
    }
    let e = g.len() - 1;
    if e == 1 {
        return true;
    }
    let x = vec![0u64, 1];
    let mut xp = x.clone();
    for _ in 0..e {
        xp = fp_powmod(&xp, p, &g, p);
    }
    if !fp_sub(&xp, &x, p).is_empty() {
        return false;
    }
    for r in prime_factors(e as u64) {
        let mut y = x.clone();
        for _ in 0..(e as u64 / r) {
            y = fp_powmod(&y, p, &g, p);
        }
        let d = fp_gcd(&g, &fp_sub(&y, &x, p), p);
        if d.len() > 1 {
            return false;
        }
    }
    true
}

/// `g` irreducible and the class of `x` generates `F_q^*`.
pub fn is_primitive_mod_p(g: &[u64], p: u64) -> bool {
    if !is_irreducible_mod_p(g, p) {
        return false;
    }
    let e = g.len() - 1;
    let q1 = p.pow(e as u32) - 1;
    let x = vec![0u64, 1];
    prime_factors(q1)
        .into_iter()
        .all(|r| fp_powmod(&x, q1 / r, g, p) != vec![1])
}

/// Conway polynomial when tabulated, else the first primitive polynomial
/// in lexicographic order of coefficients.
pub fn default_modulus(p: u64, e: usize) -> Vec<u64> {
    if let Some((_, _, c)) = CONWAY.iter().find(|(pp, ee, _)| *pp == p && *ee == e) {
        return c.to_vec();
    }
    let total = p.pow(e as u32);
    for idx in 0..total {
        let mut g = Vec::with_capacity(e + 1);
        let mut t = idx;
        for _ in 0..e {
            g.push(t % p);
            t /= p;
        }
        g.reverse();
        g.push(1);
        if g[0] != 0 && is_primitive_mod_p(&g, p) {
            return g;
        }
    }
    unreachable!("a primitive polynomial always exists")
}

struct Inner {
    p: u64,
    prec: u32,
    e: usize,
    pn: u64,
    modulus: Vec<u64>,
    frob_x: GrElem,
    trace_basis: Vec<u64>,
}

/// The Galois ring `GR(p^N, e)`. Cloning is cheap (shared descriptor).
#[derive(Clone)]
pub struct GaloisRing(Arc<Inner>);

impl fmt::Debug for GaloisRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "GR({}^{}, {}; {:?})",
            self.0.p, self.0.prec, self.0.e, self.0.modulus
        )
    }
}

impl PartialEq for GaloisRing {
    fn eq(&self, other: &Self) -> bool {
        self.0.p == other.0.p && self.0.prec == other.0.prec && self.0.modulus == other.0.modulus
    }
}

impl GaloisRing {
    pub fn new(p: u64, prec: u32, e: usize) -> Result<Self, PadicError> {
        if !is_prime(p) {
            return Err(PadicError::NotPrime(p));
        }
        Self::with_modulus(p, prec, default_modulus(p, e.max(1)))
    }

    /// `Z/p^N` as a degree-one Galois ring.
    pub fn prime_ring(p: u64, prec: u32) -> Result<Self, PadicError> {
        Self::new(p, prec, 1)
    }

    /// Ring with an explicit monic modulus; coefficients are read mod `p^N`
    /// and must reduce to an irreducible polynomial mod p.
    pub fn with_modulus(p: u64, prec: u32, modulus: Vec<u64>) -> Result<Self, PadicError> {
        if !is_prime(p) {
            return Err(PadicError::NotPrime(p));
        }
        if prec == 0 {
            return Err(PadicError::BadModulus("precision must be positive".into()));
        }
        let pn = checked_pow(p, prec)
            .filter(|&v| v < (1u64 << 62))
            .ok_or(PadicError::Overflow)?;
        let e = modulus
            .len()
            .checked_sub(1)
            .filter(|&e| e >= 1)
            .ok_or_else(|| PadicError::BadModulus("degree 0".into()))?;
        if modulus[e] % pn != 1 {
            return Err(PadicError::BadModulus("modulus must be monic".into()));
        }
        if !is_irreducible_mod_p(&modulus, p) {
            return Err(PadicError::Reducible);
        }
        let modulus: Vec<u64> = modulus.iter().map(|c| c % pn).collect();
        let ring = GaloisRing(Arc::new(Inner {
            p,
            prec,
            e,
            pn,
            modulus,
            frob_x: smallvec![0; e],
            trace_basis: vec![0; e],
        }));
        let frob_x = ring.frob_of_generator();
        let ring = ring.into_inner_with(|inner| inner.frob_x = frob_x);
        let trace_basis: Vec<u64> = (0..e)
            .map(|i| {
                let mut xi = ring.zero();
                xi[i] = 1;
                ring.trace_slow(&xi)
            })
            .collect();
        Ok(ring.into_inner_with(|inner| inner.trace_basis = trace_basis))
    }

    fn into_inner_with(self, f: impl FnOnce(&mut Inner)) -> Self {
        let mut inner = Arc::try_unwrap(self.0).ok().expect("descriptor not yet shared");
        f(&mut inner);
        GaloisRing(Arc::new(inner))
    }

    pub fn p(&self) -> u64 {
        self.0.p
    }

    pub fn prec(&self) -> u32 {
        self.0.prec
    }

    pub fn degree(&self) -> usize {
        self.0.e
    }

    /// `p^N`.
    pub fn pn(&self) -> u64 {
        self.0.pn
    }

    /// Size of the residue field, `q = p^e`.
    pub fn residue_size(&self) -> u64 {
        self.0.p.pow(self.0.e as u32)
    }

    pub fn modulus(&self) -> &[u64] {
        &self.0.modulus
    }

    /// Same modulus (reduced) at another precision.
    pub fn at_precision(&self, prec: u32) -> Result<Self, PadicError> {
        Self::with_modulus(self.0.p, prec, self.0.modulus.clone())
    }

    pub fn zero(&self) -> GrElem {
        smallvec![0; self.0.e]
    }

    pub fn one(&self) -> GrElem {
        self.from_u64(1)
    }

    pub fn from_u64(&self, n: u64) -> GrElem {
        let mut z = self.zero();
        z[0] = n % self.0.pn;
        z
    }

    pub fn from_i64(&self, n: i64) -> GrElem {
        let m = self.0.pn as i128;
        let r = ((n as i128 % m) + m) % m;
        self.from_u64(r as u64)
    }

    /// Element from coefficients in the power basis (reduced mod p^N).
    pub fn from_coeffs(&self, c: &[u64]) -> GrElem {
        let mut z = self.zero();
        for (i, &v) in c.iter().enumerate().take(self.0.e) {
            z[i] = v % self.0.pn;
        }
        if c.len() > self.0.e {
            let full: Vec<u64> = c.iter().map(|v| v % self.0.pn).collect();
            return self.reduce_poly(full);
        }
        z
    }

    /// The class of `x`.
    pub fn generator(&self) -> GrElem {
        self.from_coeffs(&[0, 1])
    }

    pub fn is_zero(&self, a: &GrElem) -> bool {
        a.iter().all(|&c| c == 0)
    }

    pub fn add(&self, a: &GrElem, b: &GrElem) -> GrElem {
        let m = self.0.pn;
        a.iter().zip(b.iter()).map(|(&x, &y)| (x + y) % m).collect()
    }

    pub fn add_assign(&self, a: &mut GrElem, b: &GrElem) {
        let m = self.0.pn;
        for (x, &y) in a.iter_mut().zip(b.iter()) {
            *x = (*x + y) % m;
        }
    }

    pub fn sub(&self, a: &GrElem, b: &GrElem) -> GrElem {
        let m = self.0.pn;
        a.iter().zip(b.iter()).map(|(&x, &y)| (x + m - y) % m).collect()
    }

    pub fn neg(&self, a: &GrElem) -> GrElem {
        let m = self.0.pn;
        a.iter().map(|&x| (m - x) % m).collect()
    }

    pub fn scale(&self, a: &GrElem, k: u64) -> GrElem {
        let m = self.0.pn;
        let k = k % m;
        a.iter().map(|&x| mulmod(x, k, m)).collect()
    }

    pub fn mul(&self, a: &GrElem, b: &GrElem) -> GrElem {
        let e = self.0.e;
        let m = self.0.pn;
        if e == 1 {
            return smallvec![mulmod(a[0], b[0], m)];
        }
        let mut c = vec![0u64; 2 * e - 1];
        for i in 0..e {
            if a[i] == 0 {
                continue;
            }
            for j in 0..e {
                c[i + j] = (c[i + j] + mulmod(a[i], b[j], m)) % m;
            }
        }
        self.reduce_poly(c)
    }

    fn reduce_poly(&self, mut c: Vec<u64>) -> GrElem {
        let e = self.0.e;
        let m = self.0.pn;
        let g = &self.0.modulus;
        while c.len() > e {
            let k = c.len() - 1;
            let lead = c[k];
            if lead != 0 {
                for i in 0..e {
                    let s = k - e + i;
                    c[s] = (c[s] + m - mulmod(lead, g[i], m)) % m;
                }
            }
            c.pop();
        }
        c.resize(e, 0);
        c.into_iter().collect()
    }

    pub fn pow(&self, a: &GrElem, mut k: u64) -> GrElem {
        let mut r = self.one();
        let mut b = a.clone();
        while k > 0 {
            if k & 1 == 1 {
                r = self.mul(&r, &b);
            }
            b = self.mul(&b, &b);
            k >>= 1;
        }
        r
    }

    /// Reduction mod p as a coefficient vector.
    pub fn residue(&self, a: &GrElem) -> Vec<u64> {
        a.iter().map(|&c| c % self.0.p).collect()
    }

    pub fn is_unit(&self, a: &GrElem) -> bool {
        self.residue(a).iter().any(|&c| c != 0)
    }

    pub fn inv(&self, a: &GrElem) -> Option<GrElem> {
        if !self.is_unit(a) {
            return None;
        }
        // a^{q-2} inverts mod p; Newton z ← z(2 − az) lifts to p^N.
        let mut z = self.pow(a, self.residue_size() - 2);
        let two = self.from_u64(2);
        let mut precision = 1;
        while precision < self.0.prec {
            z = self.mul(&z, &self.sub(&two, &self.mul(a, &z)));
            precision *= 2;
        }
        Some(z)
    }

    fn eval_modulus(&self, y: &GrElem) -> (GrElem, GrElem) {
        let g = &self.0.modulus;
        let mut val = self.zero();
        let mut der = self.zero();
        for &c in g.iter().rev() {
            der = self.add(&self.mul(&der, y), &val);
            val = self.add(&self.mul(&val, y), &self.from_u64(c));
        }
        (val, der)
    }

    fn frob_of_generator(&self) -> GrElem {
        let e = self.0.e;
        if e == 1 {
            return self.zero();
        }
        let mut y = self.pow(&self.generator(), self.0.p);
        let mut precision = 1;
        while precision < self.0.prec {
            let (g, dg) = self.eval_modulus(&y);
            let inv = self.inv(&dg).expect("modulus is separable");
            y = self.sub(&y, &self.mul(&g, &inv));
            precision *= 2;
        }
        y
    }

    /// The Frobenius automorphism (reduces to `α ↦ α^p`).
    pub fn frobenius(&self, a: &GrElem) -> GrElem {
        if self.0.e == 1 {
            return a.clone();
        }
        let mut acc = self.zero();
        for &c in a.iter().rev() {
            acc = self.mul(&acc, &self.0.frob_x);
            acc[0] = (acc[0] + c) % self.0.pn;
        }
        acc
    }

    /// `σ^k` for any integer `k` (taken mod the degree).
    pub fn frobenius_pow(&self, a: &GrElem, k: i64) -> GrElem {
        let e = self.0.e as i64;
        let k = ((k % e) + e) % e;
        let mut r = a.clone();
        for _ in 0..k {
            r = self.frobenius(&r);
        }
        r
    }

    /// Teichmüller lift of the residue of `a`: `a^{q^{N−1}}`.
    pub fn teichmuller(&self, a: &GrElem) -> GrElem {
        let q = self.residue_size();
        let mut r = a.clone();
        for _ in 1..self.0.prec {
            r = self.pow(&r, q);
        }
        r
    }

    fn trace_slow(&self, a: &GrElem) -> u64 {
        let mut acc = self.zero();
        let mut cur = a.clone();
        for _ in 0..self.0.e {
            acc = self.add(&acc, &cur);
            cur = self.frobenius(&cur);
        }
        debug_assert!(acc[1..].iter().all(|&c| c == 0), "trace lands in the prime subring");
        acc[0]
    }

    /// Trace to `Z/p^N`, as a linear functional on the power basis.
    pub fn trace(&self, a: &GrElem) -> u64 {
        let m = self.0.pn;
        a.iter()
            .zip(self.0.trace_basis.iter())
            .fold(0, |acc, (&x, &t)| (acc + mulmod(x, t, m)) % m)
    }

    /// An element whose residue generates `F_q^*`.
    pub fn multiplicative_generator(&self) -> GrElem {
        let p = self.0.p;
        let q1 = self.residue_size() - 1;
        let factors = prime_factors(q1);
        let e = self.0.e;
        for idx in 1..=q1 {
            let mut c = Vec::with_capacity(e);
            let mut t = idx;
            for _ in 0..e {
                c.push(t % p);
                t /= p;
            }
            // Try x first when the modulus is primitive.
            let cand = if idx == 1 && e > 1 {
                self.generator()
            } else {
                self.from_coeffs(&c)
            };
            let ok = factors.iter().all(|&r| {
                let y = self.pow(&cand, q1 / r);
                self.residue(&y) != self.residue(&self.one())
            });
            if ok && self.is_unit(&cand) {
                return cand;
            }
        }
        unreachable!("F_q^* is cyclic")
    }
}
