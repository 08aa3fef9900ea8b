//! Power series in `T` truncated at a fixed order.

use std::fmt;

use num_traits::{One, Zero};

use super::galois::{mulmod, GaloisRing, GrElem};
use crate::rat::Q;

/// Commutative coefficient ring for [`TSeries`].
pub trait CoeffRing: Clone + Send + Sync {
    type Elem: Clone + PartialEq + fmt::Debug + Send + Sync;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn from_i64(&self, n: i64) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;

    fn neg(&self, a: &Self::Elem) -> Self::Elem {
        self.sub(&self.zero(), a)
    }

    /// `out[k] += Σ_{i+j=k} a[i]·b[j]` for every `k < out.len()`.
    fn conv_acc(&self, a: &[Self::Elem], b: &[Self::Elem], out: &mut [Self::Elem]) {
        let n = out.len();
        let (sa, sb) = (first_nonzero(self, a), first_nonzero(self, b));
        for i in sa..a.len().min(n) {
            if self.is_zero(&a[i]) {
                continue;
            }
            for j in sb..b.len().min(n - i) {
                let t = self.mul(&a[i], &b[j]);
                out[i + j] = self.add(&out[i + j], &t);
            }
        }
    }
}

fn first_nonzero<R: CoeffRing + ?Sized>(r: &R, a: &[R::Elem]) -> usize {
    a.iter().position(|x| !r.is_zero(x)).unwrap_or(a.len())
}

/// The rational numbers.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Rationals;

impl CoeffRing for Rationals {
    type Elem = Q;

    fn zero(&self) -> Q {
        Q::zero()
    }
    fn one(&self) -> Q {
        Q::one()
    }
    fn from_i64(&self, n: i64) -> Q {
        Q::from_integer(n.into())
    }
    fn is_zero(&self, a: &Q) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &Q, b: &Q) -> Q {
        a + b
    }
    fn sub(&self, a: &Q, b: &Q) -> Q {
        a - b
    }
    fn mul(&self, a: &Q, b: &Q) -> Q {
        a * b
    }
}

impl CoeffRing for GaloisRing {
    type Elem = GrElem;

    fn zero(&self) -> GrElem {
        GaloisRing::zero(self)
    }
    fn one(&self) -> GrElem {
        GaloisRing::one(self)
    }
    fn from_i64(&self, n: i64) -> GrElem {
        GaloisRing::from_i64(self, n)
    }
    fn is_zero(&self, a: &GrElem) -> bool {
        GaloisRing::is_zero(self, a)
    }
    fn add(&self, a: &GrElem, b: &GrElem) -> GrElem {
        GaloisRing::add(self, a, b)
    }
    fn sub(&self, a: &GrElem, b: &GrElem) -> GrElem {
        GaloisRing::sub(self, a, b)
    }
    fn mul(&self, a: &GrElem, b: &GrElem) -> GrElem {
        GaloisRing::mul(self, a, b)
    }
    fn neg(&self, a: &GrElem) -> GrElem {
        GaloisRing::neg(self, a)
    }

    fn conv_acc(&self, a: &[GrElem], b: &[GrElem], out: &mut [GrElem]) {
        if self.degree() != 1 {
            let n = out.len();
            let (sa, sb) = (first_nonzero(self, a), first_nonzero(self, b));
            for i in sa..a.len().min(n) {
                if GaloisRing::is_zero(self, &a[i]) {
                    continue;
                }
                for j in sb..b.len().min(n - i) {
                    let t = GaloisRing::mul(self, &a[i], &b[j]);
                    GaloisRing::add_assign(self, &mut out[i + j], &t);
                }
            }
            return;
        }
        let m = self.pn();
        let av: Vec<u64> = a.iter().map(|x| x[0]).collect();
        let bv: Vec<u64> = b.iter().map(|x| x[0]).collect();
        let mut acc = vec![0u64; out.len()];
        conv_u64(&av, &bv, &mut acc, m);
        for (o, v) in out.iter_mut().zip(acc) {
            o[0] = (o[0] + v) % m;
        }
    }
}

/// `out[k] = Σ_{i+j=k} a[i]·b[j] mod m` (overwrites `out`), skipping
/// leading zeros of both inputs.
pub(crate) fn conv_u64(a: &[u64], b: &[u64], out: &mut [u64], m: u64) {
    let n = out.len();
    for o in out.iter_mut() {
        *o = 0;
    }
    if a.is_empty() || b.is_empty() {
        return;
    }
    let sa = a.iter().position(|&x| x != 0).unwrap_or(a.len());
    let sb = b.iter().position(|&x| x != 0).unwrap_or(b.len());
    if sa + sb >= n {
        return;
    }
    if m < (1 << 21) {
        // Products < 2^42; up to 2^21 terms fit in u64 before reduction.
        for k in sa + sb..n {
            let lo = sa.max(k.saturating_sub(b.len() - 1));
            let hi = (k - sb).min(a.len() - 1);
            let mut s: u64 = 0;
            for i in lo..=hi {
                s += a[i] * b[k - i];
            }
            out[k] = s % m;
        }
    } else {
        for k in sa + sb..n {
            let lo = sa.max(k.saturating_sub(b.len() - 1));
            let hi = (k - sb).min(a.len() - 1);
            let mut s: u128 = 0;
            for i in lo..=hi {
                s += a[i] as u128 * b[k - i] as u128;
            }
            out[k] = (s % m as u128) as u64;
        }
    }
}

/// T-adic order of a truncated series.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeriesOrder {
    /// Least index with a nonzero coefficient.
    Exact(usize),
    /// Every stored coefficient vanishes: order is at least the precision.
    AtLeast(usize),
}

impl SeriesOrder {
    pub fn value(self) -> usize {
        match self {
            SeriesOrder::Exact(n) | SeriesOrder::AtLeast(n) => n,
        }
    }

    pub fn is_exact(self) -> bool {
        matches!(self, SeriesOrder::Exact(_))
    }
}

/// Power series `Σ c_k T^k` known modulo `T^prec`.
#[derive(Clone)]
pub struct TSeries<R: CoeffRing> {
    ring: R,
    coeffs: Vec<R::Elem>,
}

impl<R: CoeffRing> fmt::Debug for TSeries<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TSeries").field("coeffs", &self.coeffs).finish()
    }
}

impl<R: CoeffRing> PartialEq for TSeries<R> {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs
    }
}

impl<R: CoeffRing> TSeries<R> {
    pub fn zero(ring: &R, prec: usize) -> Self {
        TSeries {
            coeffs: vec![ring.zero(); prec],
            ring: ring.clone(),
        }
    }

    pub fn one(ring: &R, prec: usize) -> Self {
        Self::constant(ring, ring.one(), prec)
    }

    pub fn constant(ring: &R, c: R::Elem, prec: usize) -> Self {
        let mut s = Self::zero(ring, prec);
        if prec > 0 {
            s.coeffs[0] = c;
        }
        s
    }

    /// The series `T`.
    pub fn t(ring: &R, prec: usize) -> Self {
        let mut s = Self::zero(ring, prec);
        if prec > 1 {
            s.coeffs[1] = ring.one();
        }
        s
    }

    /// Coefficients beyond `prec` are dropped; missing ones are zero.
    pub fn from_coeffs(ring: &R, mut coeffs: Vec<R::Elem>, prec: usize) -> Self {
        coeffs.resize(prec, ring.zero());
        TSeries {
            ring: ring.clone(),
            coeffs,
        }
    }

    pub fn ring(&self) -> &R {
        &self.ring
    }

    pub fn prec(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[R::Elem] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> &R::Elem {
        &self.coeffs[k]
    }

    pub fn set_coeff(&mut self, k: usize, c: R::Elem) {
        self.coeffs[k] = c;
    }

    pub fn into_coeffs(self) -> Vec<R::Elem> {
        self.coeffs
    }

    /// Drops information beyond `T^prec` (never extends).
    pub fn truncate(&self, prec: usize) -> Self {
        let p = prec.min(self.prec());
        TSeries {
            ring: self.ring.clone(),
            coeffs: self.coeffs[..p].to_vec(),
        }
    }

    pub fn order(&self) -> SeriesOrder {
        match self.coeffs.iter().position(|c| !self.ring.is_zero(c)) {
            Some(k) => SeriesOrder::Exact(k),
            None => SeriesOrder::AtLeast(self.prec()),
        }
    }

    pub fn is_zero(&self) -> bool {
        !self.order().is_exact()
    }

    fn common(&self, other: &Self) -> usize {
        self.prec().min(other.prec())
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.common(other);
        let coeffs = (0..n)
            .map(|k| self.ring.add(&self.coeffs[k], &other.coeffs[k]))
            .collect();
        TSeries {
            ring: self.ring.clone(),
            coeffs,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.common(other);
        let coeffs = (0..n)
            .map(|k| self.ring.sub(&self.coeffs[k], &other.coeffs[k]))
            .collect();
        TSeries {
            ring: self.ring.clone(),
            coeffs,
        }
    }

    pub fn neg(&self) -> Self {
        let coeffs = self.coeffs.iter().map(|c| self.ring.neg(c)).collect();
        TSeries {
            ring: self.ring.clone(),
            coeffs,
        }
    }

    pub fn scale(&self, c: &R::Elem) -> Self {
        let coeffs = self.coeffs.iter().map(|x| self.ring.mul(x, c)).collect();
        TSeries {
            ring: self.ring.clone(),
            coeffs,
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(&self.ring, self.common(other));
        self.ring.conv_acc(&self.coeffs, &other.coeffs, &mut out.coeffs);
        out
    }

    /// `self += a·b`.
    pub fn mul_acc(&mut self, a: &Self, b: &Self) {
        self.ring.conv_acc(&a.coeffs, &b.coeffs, &mut self.coeffs);
    }

    pub fn pow(&self, mut k: u64) -> Self {
        let mut r = Self::one(&self.ring, self.prec());
        let mut b = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                r = r.mul(&b);
            }
            k >>= 1;
            if k > 0 {
                b = b.mul(&b);
            }
        }
        r
    }

    /// `Σ a_j self^j` by Horner; `self` should have zero constant term.
    pub fn compose_into(&self, outer: &[R::Elem]) -> Self {
        let mut acc = Self::zero(&self.ring, self.prec());
        for c in outer.iter().rev() {
            acc = acc.mul(self);
            acc.coeffs[0] = self.ring.add(&acc.coeffs[0], c);
        }
        acc
    }
}

impl TSeries<GaloisRing> {
    /// Inverse of a series with unit constant term.
    pub fn inverse(&self) -> Option<Self> {
        let r = &self.ring;
        let c0inv = r.inv(&self.coeffs[0])?;
        let n = self.prec();
        let mut out = vec![r.zero(); n];
        if n == 0 {
            return Some(TSeries {
                ring: r.clone(),
                coeffs: out,
            });
        }
        out[0] = c0inv.clone();
        for k in 1..n {
            let mut s = r.zero();
            for i in 1..=k {
                s = r.add(&s, &r.mul(&self.coeffs[i], &out[k - i]));
            }
            out[k] = r.neg(&r.mul(&s, &c0inv));
        }
        Some(TSeries {
            ring: r.clone(),
            coeffs: out,
        })
    }

    /// Coefficientwise ring automorphism `σ^k`.
    pub fn frobenius_pow(&self, k: i64) -> Self {
        let coeffs = self.coeffs.iter().map(|c| self.ring.frobenius_pow(c, k)).collect();
        TSeries {
            ring: self.ring.clone(),
            coeffs,
        }
    }

    /// Constant components of the coefficients, when all lie in `Z/p^N`.
    pub fn prime_subring_coeffs(&self) -> Option<Vec<u64>> {
        self.coeffs
            .iter()
            .map(|c| c[1..].iter().all(|&x| x == 0).then_some(c[0]))
            .collect()
    }

    pub fn scale_u64(&self, k: u64) -> Self {
        let m = self.ring.pn();
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| c.iter().map(|&x| mulmod(x, k % m, m)).collect())
            .collect();
        TSeries {
            ring: self.ring.clone(),
            coeffs,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::q;

    #[test]
    fn order_marker() {
        let r = GaloisRing::prime_ring(5, 2).unwrap();
        let z = TSeries::zero(&r, 7);
        assert_eq!(z.order(), SeriesOrder::AtLeast(7));
        let t = TSeries::t(&r, 7);
        assert_eq!(t.pow(3).order(), SeriesOrder::Exact(3));
        assert_eq!(t.pow(9).order(), SeriesOrder::AtLeast(7));
    }

    #[test]
    fn fast_and_generic_products_agree() {
        let r = GaloisRing::prime_ring(7, 3).unwrap();
        let a: Vec<GrElem> = (0..20u64).map(|i| r.from_u64(i * i * 13 + 5)).collect();
        let b: Vec<GrElem> = (0..20u64)
            .map(|i| r.from_u64(if i < 3 { 0 } else { i * 101 }))
            .collect();
        let mut fast = vec![r.zero(); 20];
        r.conv_acc(&a, &b, &mut fast);
        let mut slow = vec![r.zero(); 20];
        for i in 0..20 {
            for j in 0..20 - i {
                slow[i + j] = r.add(&slow[i + j], &r.mul(&a[i], &b[j]));
            }
        }
        assert_eq!(fast, slow);
    }

    #[test]
    fn inverse_round_trip() {
        let r = GaloisRing::new(5, 3, 2).unwrap();
        let coeffs: Vec<GrElem> = (0..12u64).map(|i| r.from_coeffs(&[i + 1, 3 * i])).collect();
        let s = TSeries::from_coeffs(&r, coeffs, 12);
        let inv = s.inverse().unwrap();
        assert_eq!(s.mul(&inv), TSeries::one(&r, 12));
    }

    #[test]
    fn rational_composition() {
        // exp(T) − 1 composed into log(1+x) gives T.
        let n = 10;
        let rr = Rationals;
        let mut fact = Q::one();
        let mut e = vec![Q::zero()];
        for k in 1..n {
            fact = fact * Q::from_integer((k as i64).into());
            e.push(Q::one() / fact.clone());
        }
        let em1 = TSeries::from_coeffs(&rr, e, n);
        let log: Vec<Q> = (0..n)
            .map(|k| {
                if k == 0 {
                    Q::zero()
                } else {
                    q(if k % 2 == 1 { 1 } else { -1 }, k as i64)
                }
            })
            .collect();
        assert_eq!(em1.compose_into(&log), TSeries::t(&rr, n));
    }
}
