//! Cyclotomic integers `Z[ζ_{p^m}] = Z[x]/Φ_{p^m}(x)` and their residues
//! modulo `p^N`, with valuations at `π = ζ − 1`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::galois::{checked_pow, mulmod};
use super::PadicError;
use crate::rat::vp_int;

fn phi_of(p: u64, m: u32) -> usize {
    ((p - 1) * p.pow(m - 1)) as usize
}

/// Reduces a coefficient vector of any length modulo `Φ_{p^m}`, using
/// `x^φ = −Σ_{i<p−1} x^{i·p^{m−1}}`.
fn reduce_big(mut c: Vec<BigInt>, p: u64, m: u32) -> Vec<BigInt> {
    let phi = phi_of(p, m);
    let step = p.pow(m - 1) as usize;
    while c.len() > phi {
        let d = c.len() - 1;
        let lead = c.pop().unwrap();
        if lead.is_zero() {
            continue;
        }
        let base = d - phi;
        for i in 0..(p as usize - 1) {
            c[base + i * step] -= &lead;
        }
    }
    c.resize(phi, BigInt::zero());
    c
}

fn reduce_u64(mut c: Vec<u64>, p: u64, m: u32, pn: u64) -> Vec<u64> {
    let phi = phi_of(p, m);
    let step = p.pow(m - 1) as usize;
    while c.len() > phi {
        let d = c.len() - 1;
        let lead = c.pop().unwrap() % pn;
        if lead == 0 {
            continue;
        }
        let base = d - phi;
        for i in 0..(p as usize - 1) {
            let s = base + i * step;
            c[s] = (c[s] + pn - lead) % pn;
        }
    }
    c.resize(phi, 0);
    c
}

/// An element of `Z[ζ_{p^m}]` in the power basis `1, ζ, …, ζ^{φ−1}`.
#[derive(Clone, PartialEq, Eq)]
pub struct CycInt {
    p: u64,
    m: u32,
    coeffs: Vec<BigInt>,
}

impl fmt::Debug for CycInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "CycInt(p={}, m={}, {:?})",
            self.p,
            self.m,
            self.coeffs.iter().map(|c| c.to_string()).collect::<Vec<_>>()
        )
    }
}

impl CycInt {
    pub fn zero(p: u64, m: u32) -> Self {
        CycInt {
            p,
            m,
            coeffs: vec![BigInt::zero(); phi_of(p, m)],
        }
    }

    pub fn from_int(p: u64, m: u32, n: BigInt) -> Self {
        let mut z = Self::zero(p, m);
        z.coeffs[0] = n;
        z
    }

    pub fn one(p: u64, m: u32) -> Self {
        Self::from_int(p, m, BigInt::one())
    }

    /// `ζ^k`.
    pub fn zeta_pow(p: u64, m: u32, k: u64) -> Self {
        let order = p.pow(m);
        let k = (k % order) as usize;
        let mut c = vec![BigInt::zero(); k + 1];
        c[k] = BigInt::one();
        CycInt {
            p,
            m,
            coeffs: reduce_big(c, p, m),
        }
    }

    /// `π = ζ − 1`.
    pub fn pi(p: u64, m: u32) -> Self {
        Self::zeta_pow(p, m, 1).sub(&Self::one(p, m))
    }

    /// `Σ_t counts[t]·ζ^t`.
    pub fn from_exponent_counts(p: u64, m: u32, counts: &[(u64, u64)]) -> Self {
        let order = p.pow(m) as usize;
        let mut c = vec![BigInt::zero(); order];
        for &(t, n) in counts {
            c[(t % order as u64) as usize] += BigInt::from(n);
        }
        CycInt {
            p,
            m,
            coeffs: reduce_big(c, p, m),
        }
    }

    pub fn from_coeffs(p: u64, m: u32, c: Vec<BigInt>) -> Self {
        CycInt {
            p,
            m,
            coeffs: reduce_big(c, p, m),
        }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn phi(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn add(&self, o: &Self) -> Self {
        let coeffs = self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a + b).collect();
        CycInt {
            p: self.p,
            m: self.m,
            coeffs,
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        let coeffs = self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a - b).collect();
        CycInt {
            p: self.p,
            m: self.m,
            coeffs,
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let n = self.phi();
        let mut c = vec![BigInt::zero(); 2 * n - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        CycInt {
            p: self.p,
            m: self.m,
            coeffs: reduce_big(c, self.p, self.m),
        }
    }

    /// The Galois conjugate `ζ ↦ ζ^u` (`u` prime to p).
    pub fn galois(&self, u: u64) -> Self {
        let order = self.p.pow(self.m);
        let mut c = vec![BigInt::zero(); order as usize];
        for (i, a) in self.coeffs.iter().enumerate() {
            let k = (i as u64 * u) % order;
            c[k as usize] += a;
        }
        CycInt {
            p: self.p,
            m: self.m,
            coeffs: reduce_big(c, self.p, self.m),
        }
    }

    /// Norm to `Z`: the determinant of multiplication by `self`, which equals
    /// `resultant(Φ_{p^m}, c)` since `Φ` is monic.
    pub fn norm(&self) -> BigInt {
        let n = self.phi();
        let mut cols: Vec<Vec<BigInt>> = Vec::with_capacity(n);
        let mut cur = self.clone();
        let x = CycInt::zeta_pow(self.p, self.m, 1);
        for _ in 0..n {
            cols.push(cur.coeffs.clone());
            cur = cur.mul(&x);
        }
        bareiss_det(cols)
    }

    /// `v_π(self)` with `v_π(π) = 1`, or `None` for zero.
    ///
    /// `p` is totally ramified in `Z[ζ_{p^m}]` with residue degree 1, so the
    /// p-adic valuation of the norm is exactly the π-adic valuation.
    pub fn pi_valuation(&self) -> Option<u64> {
        if self.is_zero() {
            return None;
        }
        Some(vp_int(&self.norm(), self.p))
    }

    /// Same valuation via the expansion in powers of `π`: writing
    /// `c(1+π) = Σ b_i π^i` with `i < φ`, the terms `i + φ·v_p(b_i)` are
    /// distinct mod φ, so their minimum is attained once.
    pub fn pi_valuation_by_shift(&self) -> Option<u64> {
        if self.is_zero() {
            return None;
        }
        let b = taylor_shift_big(&self.coeffs);
        let phi = self.phi() as u64;
        b.iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| i as u64 + phi * vp_int(c, self.p))
            .min()
    }

    pub fn reduce(&self, prec: u32) -> Result<CycResidue, PadicError> {
        let pn = checked_pow(self.p, prec).ok_or(PadicError::Overflow)?;
        let big = BigInt::from(pn);
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| u64::try_from(c.mod_floor(&big)).unwrap())
            .collect();
        Ok(CycResidue {
            p: self.p,
            m: self.m,
            prec,
            pn,
            coeffs,
        })
    }
}

/// Coefficients of `c(1+y)` in powers of `y`.
fn taylor_shift_big(c: &[BigInt]) -> Vec<BigInt> {
    let mut b = c.to_vec();
    let n = b.len();
    for i in 0..n {
        for j in (i..n - 1).rev() {
            let t = b[j + 1].clone();
            b[j] += t;
        }
    }
    b
}

fn bareiss_det(mut a: Vec<Vec<BigInt>>) -> BigInt {
    let n = a.len();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * a[n - 1][n - 1].clone()
}

/// π-adic valuation of a residue known modulo `p^N`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PiValuation {
    Exact(u64),
    /// The residue vanishes; the true valuation is at least `N·φ`.
    AtLeast(u64),
}

/// An element of `Z[ζ_{p^m}]/(p^N)`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CycResidue {
    p: u64,
    m: u32,
    prec: u32,
    pn: u64,
    coeffs: Vec<u64>,
}

impl CycResidue {
    pub fn zero(p: u64, m: u32, prec: u32) -> Result<Self, PadicError> {
        let pn = checked_pow(p, prec).ok_or(PadicError::Overflow)?;
        Ok(CycResidue {
            p,
            m,
            prec,
            pn,
            coeffs: vec![0; phi_of(p, m)],
        })
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn phi(&self) -> usize {
        self.coeffs.len()
    }

    /// `Σ c_k π^k` by Horner in `π = ζ − 1`.
    pub fn from_pi_expansion(p: u64, m: u32, prec: u32, c: &[u64]) -> Result<Self, PadicError> {
        let mut acc = Self::zero(p, m, prec)?;
        let pn = acc.pn;
        for &ck in c.iter().rev() {
            // acc ← acc·(x − 1) + ck
            let n = acc.coeffs.len();
            let mut next = vec![0u64; n + 1];
            for i in 0..n {
                next[i + 1] = (next[i + 1] + acc.coeffs[i]) % pn;
                next[i] = (next[i] + pn - acc.coeffs[i]) % pn;
            }
            next[0] = (next[0] + ck % pn) % pn;
            acc.coeffs = reduce_u64(next, p, m, pn);
        }
        Ok(acc)
    }

    pub fn from_exponent_counts(p: u64, m: u32, prec: u32, counts: &[(u64, u64)]) -> Result<Self, PadicError> {
        let pn = checked_pow(p, prec).ok_or(PadicError::Overflow)?;
        let order = p.pow(m) as usize;
        let mut c = vec![0u64; order];
        for &(t, n) in counts {
            let k = (t % order as u64) as usize;
            c[k] = (c[k] + n % pn) % pn;
        }
        Ok(CycResidue {
            p,
            m,
            prec,
            pn,
            coeffs: reduce_u64(c, p, m, pn),
        })
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn sub(&self, o: &Self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .zip(&o.coeffs)
            .map(|(&a, &b)| (a + self.pn - b) % self.pn)
            .collect();
        CycResidue { coeffs, ..self.clone() }
    }

    pub fn scale(&self, k: u64) -> Self {
        let coeffs = self.coeffs.iter().map(|&a| mulmod(a, k % self.pn, self.pn)).collect();
        CycResidue { coeffs, ..self.clone() }
    }

    /// Valuation at π; exact below `N·φ`, a lower bound otherwise.
    pub fn pi_valuation(&self) -> PiValuation {
        let cap = self.prec as u64 * self.phi() as u64;
        let lifted = CycInt {
            p: self.p,
            m: self.m,
            coeffs: self.coeffs.iter().map(|&c| BigInt::from(c)).collect(),
        };
        match lifted.pi_valuation() {
            Some(v) if v < cap => PiValuation::Exact(v),
            _ => PiValuation::AtLeast(cap),
        }
    }

    /// Valuation with an additional cap from the input's own precision.
    pub fn pi_valuation_capped(&self, cap: u64) -> PiValuation {
        match self.pi_valuation() {
            PiValuation::Exact(v) if v < cap => PiValuation::Exact(v),
            PiValuation::Exact(_) => PiValuation::AtLeast(cap),
            PiValuation::AtLeast(c) => PiValuation::AtLeast(c.min(cap)),
        }
    }
}

impl fmt::Display for CycInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            parts.push(match i {
                0 => c.to_string(),
                _ if c.is_one() => format!("ζ^{i}"),
                _ if c.is_negative() => format!("({c})ζ^{i}"),
                _ => format!("{c}ζ^{i}"),
            });
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn valuation_examples() {
        for (p, m) in [(5u64, 1u32), (5, 2), (3, 2), (7, 1)] {
            let pi = CycInt::pi(p, m);
            assert_eq!(pi.pi_valuation(), Some(1));
            let pp = CycInt::from_int(p, m, BigInt::from(p));
            assert_eq!(pp.pi_valuation(), Some((p - 1) * p.pow(m - 1)));
            assert_eq!(CycInt::zero(p, m).pi_valuation(), None);
        }
    }

    #[test]
    fn valuation_is_additive_and_matches_shift() {
        let mut seed = 12345u64;
        let mut next = || {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((seed >> 33) % 11) as i64 - 5
        };
        for (p, m) in [(5u64, 1u32), (5, 2), (3, 2), (7, 1)] {
            let phi = phi_of(p, m);
            for _ in 0..10 {
                let a = CycInt::from_coeffs(p, m, (0..phi).map(|_| BigInt::from(next())).collect());
                let b = CycInt::from_coeffs(p, m, (0..phi).map(|_| BigInt::from(next() * p as i64)).collect());
                if a.is_zero() || b.is_zero() {
                    continue;
                }
                let (va, vb) = (a.pi_valuation().unwrap(), b.pi_valuation().unwrap());
                assert_eq!(a.pi_valuation_by_shift(), Some(va));
                assert_eq!(b.pi_valuation_by_shift(), Some(vb));
                assert_eq!(a.mul(&b).pi_valuation(), Some(va + vb));
            }
        }
    }

    #[test]
    fn power_sums_of_roots() {
        // Σ_{x=1}^{p-1} ζ^x = −1.
        let counts: Vec<(u64, u64)> = (1..5).map(|t| (t, 1)).collect();
        assert_eq!(
            CycInt::from_exponent_counts(5, 1, &counts),
            CycInt::from_int(5, 1, BigInt::from(-1))
        );
        let z = CycInt::zeta_pow(5, 2, 7);
        assert_eq!(z.galois(3), CycInt::zeta_pow(5, 2, 21));
        assert_eq!(CycInt::zeta_pow(5, 2, 25), CycInt::one(5, 2));
    }

    #[test]
    fn pi_expansion_horner() {
        // 1 + π = ζ.
        let r = CycResidue::from_pi_expansion(5, 1, 3, &[1, 1]).unwrap();
        assert_eq!(r, CycInt::zeta_pow(5, 1, 1).reduce(3).unwrap());
        let t = CycResidue::from_pi_expansion(5, 2, 2, &[0, 1]).unwrap();
        assert_eq!(t, CycInt::pi(5, 2).reduce(2).unwrap());
        assert_eq!(t.pi_valuation(), PiValuation::Exact(1));
        let zero = CycResidue::from_pi_expansion(5, 1, 2, &[25]).unwrap();
        assert_eq!(zero.pi_valuation(), PiValuation::AtLeast(8));
    }
}
