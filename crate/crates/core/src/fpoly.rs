//! Laurent-free polynomials `f = Σ a_v x^v` over `F_q` supported in `Δ`.
//!
//! Coefficients are elements of `F_q = F_p[y]/(g)` for the default modulus
//! `g` of degree `a`, stored as reduced coefficient vectors in `y`.

use std::collections::BTreeMap;

use serde_json::{json, Value};
use thiserror::Error;

use crate::padic::{default_modulus, is_prime};
use crate::polytope::{LatticePoint, RectDelta};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FPolyError {
    #[error("exponent {0} lies outside Δ")]
    OutsideDelta(String),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("bad input: {0}")]
    BadInput(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FPoly {
    delta: RectDelta,
    p: u64,
    a: u32,
    coeffs: BTreeMap<LatticePoint, Vec<u64>>,
}

impl FPoly {
    pub fn new(delta: RectDelta, p: u64, a: u32) -> Result<Self, FPolyError> {
        if !is_prime(p) {
            return Err(FPolyError::NotPrime(p));
        }
        if a == 0 {
            return Err(FPolyError::BadInput("a must be at least 1".into()));
        }
        Ok(FPoly {
            delta,
            p,
            a,
            coeffs: BTreeMap::new(),
        })
    }

    pub fn delta(&self) -> &RectDelta {
        &self.delta
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn a(&self) -> u32 {
        self.a
    }

    pub fn q(&self) -> u64 {
        self.p.pow(self.a)
    }

    /// Modulus of `F_q` over `F_p` (low to high, monic).
    pub fn field_modulus(&self) -> Vec<u64> {
        default_modulus(self.p, self.a as usize)
    }

    /// Sets `a_v` to the `F_q` element with the given coefficient vector.
    pub fn set(&mut self, v: LatticePoint, c: &[u64]) -> Result<(), FPolyError> {
        if !self.delta.contains(v) {
            return Err(FPolyError::OutsideDelta(v.to_string()));
        }
        if c.len() > self.a as usize {
            return Err(FPolyError::BadInput(format!(
                "coefficient of {v} has more than {} components",
                self.a
            )));
        }
        let mut c: Vec<u64> = c.iter().map(|x| x % self.p).collect();
        c.resize(self.a as usize, 0);
        if c.iter().all(|&x| x == 0) {
            self.coeffs.remove(&v);
        } else {
            self.coeffs.insert(v, c);
        }
        Ok(())
    }

    /// Sets `a_v` to an element of the prime field.
    pub fn set_int(&mut self, v: LatticePoint, c: i64) -> Result<(), FPolyError> {
        let r = c.rem_euclid(self.p as i64) as u64;
        self.set(v, &[r])
    }

    pub fn coeff(&self, v: LatticePoint) -> Option<&[u64]> {
        self.coeffs.get(&v).map(|c| c.as_slice())
    }

    /// Nonzero coefficients in point-key order.
    pub fn iter(&self) -> impl Iterator<Item = (LatticePoint, &[u64])> {
        self.coeffs.iter().map(|(v, c)| (*v, c.as_slice()))
    }

    pub fn support_len(&self) -> usize {
        self.coeffs.len()
    }

    /// `a_v` as an integer when it lies in `F_p` (zero if absent).
    pub fn prime_field_coeff(&self, v: LatticePoint) -> Option<u64> {
        match self.coeffs.get(&v) {
            None => Some(0),
            Some(c) if c[1..].iter().all(|&x| x == 0) => Some(c[0]),
            Some(_) => None,
        }
    }

    /// The three nonzero vertices of `Δ` carry nonzero coefficients.
    pub fn vertices_nonzero(&self) -> bool {
        self.delta.vertices().iter().all(|v| self.coeffs.contains_key(v))
    }

    /// Every lattice point of `Δ` carries a nonzero coefficient.
    pub fn full_support(&self) -> bool {
        self.delta
            .points()
            .iter()
            .all(|v| v.is_origin() || self.coeffs.contains_key(v))
    }

    /// Parses `{"p":5,"a":1,"d1":3,"d2":3,"coeffs":{"1,0":2,"2,1":[1,3]}}`.
    /// Integer coefficients lie in `F_p`; arrays give `F_q` elements.
    pub fn from_json_value(v: &Value) -> Result<Self, FPolyError> {
        let field = |k: &str| -> Result<u64, FPolyError> {
            v.get(k)
                .and_then(Value::as_u64)
                .ok_or_else(|| FPolyError::BadInput(format!("missing or non-integer field {k:?}")))
        };
        let p = field("p")?;
        let a = v.get("a").and_then(Value::as_u64).unwrap_or(1) as u32;
        let d1 = field("d1")? as u32;
        let d2 = field("d2")? as u32;
        let delta = RectDelta::new(d1, d2).map_err(|e| FPolyError::BadInput(e.to_string()))?;
        let mut f = FPoly::new(delta, p, a)?;
        let coeffs = v
            .get("coeffs")
            .and_then(Value::as_object)
            .ok_or_else(|| FPolyError::BadInput("missing \"coeffs\" map".into()))?;
        for (key, val) in coeffs {
            let pt = LatticePoint::parse_key(key)
                .ok_or_else(|| FPolyError::BadInput(format!("bad exponent key {key:?}")))?;
            match val {
                Value::Number(n) => {
                    let c = n
                        .as_i64()
                        .ok_or_else(|| FPolyError::BadInput(format!("bad coefficient at {key}")))?;
                    f.set_int(pt, c)?;
                }
                Value::Array(items) => {
                    let c: Option<Vec<u64>> = items
                        .iter()
                        .map(|x| x.as_i64().map(|c| c.rem_euclid(p as i64) as u64))
                        .collect();
                    let c = c.ok_or_else(|| FPolyError::BadInput(format!("bad coefficient vector at {key}")))?;
                    f.set(pt, &c)?;
                }
                _ => return Err(FPolyError::BadInput(format!("bad coefficient at {key}"))),
            }
        }
        Ok(f)
    }

    pub fn from_json_str(s: &str) -> Result<Self, FPolyError> {
        let v: Value = serde_json::from_str(s).map_err(|e| FPolyError::BadInput(e.to_string()))?;
        Self::from_json_value(&v)
    }

    pub fn to_json(&self) -> Value {
        let coeffs: serde_json::Map<String, Value> = self
            .coeffs
            .iter()
            .map(|(v, c)| {
                let val = if c[1..].iter().all(|&x| x == 0) {
                    json!(c[0])
                } else {
                    json!(c)
                };
                (v.key(), val)
            })
            .collect();
        json!({
            "p": self.p,
            "a": self.a,
            "d1": self.delta.d1(),
            "d2": self.delta.d2(),
            "coeffs": coeffs,
        })
    }
}
