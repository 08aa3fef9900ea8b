//! Exact rational helpers and their canonical string form.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serializer};

pub type Q = BigRational;

pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// `"n"` for integers, `"n/d"` otherwise.
pub fn fmt_q(x: &Q) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn parse_q(s: &str) -> Option<Q> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(Q::new(n, d))
        }
        None => Some(Q::from_integer(s.parse().ok()?)),
    }
}

pub fn ceil_q(x: &Q) -> BigInt {
    x.ceil().to_integer()
}

pub fn floor_q(x: &Q) -> BigInt {
    x.floor().to_integer()
}

/// p-adic valuation of a nonzero rational.
pub fn vp_q(x: &Q, p: u64) -> Option<i64> {
    if x.is_zero() {
        return None;
    }
    Some(vp_int(x.numer(), p) as i64 - vp_int(x.denom(), p) as i64)
}

pub fn vp_int(n: &BigInt, p: u64) -> u64 {
    let p = BigInt::from(p);
    let mut n = n.abs();
    let mut v = 0;
    while !n.is_zero() {
        let (qt, r) = n.div_rem(&p);
        if !r.is_zero() {
            break;
        }
        n = qt;
        v += 1;
    }
    v
}

/// Reduces a p-integral rational modulo `modulus` (a power of p).
pub fn q_mod(x: &Q, modulus: u64) -> Option<u64> {
    let m = BigInt::from(modulus);
    let den = x.denom().mod_floor(&m);
    let inv = modinv_big(&den, &m)?;
    let num = x.numer().mod_floor(&m);
    let r = (num * inv).mod_floor(&m);
    Some(u64::try_from(r).expect("residue fits"))
}

fn modinv_big(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.extended_gcd(m);
    if !e.gcd.is_one() {
        return None;
    }
    Some(e.x.mod_floor(m))
}

pub mod serde_q {
    use super::*;

    pub fn serialize<S: Serializer>(x: &Q, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_q(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Q, D::Error> {
        let s = String::deserialize(d)?;
        parse_q(&s).ok_or_else(|| serde::de::Error::custom(format!("bad rational {s:?}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn string_round_trip() {
        for x in [q(0, 1), q(4, 3), q(-7, 2), qi(12)] {
            assert_eq!(parse_q(&fmt_q(&x)).unwrap(), x);
        }
        assert_eq!(fmt_q(&q(6, 4)), "3/2");
        assert_eq!(fmt_q(&q(0, 5)), "0");
        assert!(parse_q("1/0").is_none());
    }

    #[test]
    fn reduction_mod_prime_power() {
        // 5/24 mod 25: 24^{-1} = 24 mod 25, 5*24 = 120 = 20 mod 25
        assert_eq!(q_mod(&q(5, 24), 25), Some(20));
        assert_eq!(q_mod(&q(1, 5), 25), None);
        assert_eq!(vp_q(&q(5, 24), 5), Some(1));
        assert_eq!(vp_q(&q(3, 50), 5), Some(-2));
    }
}
