//! Truncated `T`-series over `GR(p^N, a)` stored as flat `u64` slices:
//! coefficient `k` occupies `x[k·a .. (k+1)·a]`.

use smallvec::SmallVec;

use crate::padic::{GaloisRing, GrElem, SeriesOrder, TSeries};

#[derive(Clone, Debug)]
pub(crate) struct Flat {
    pub ring: GaloisRing,
    pub nt: usize,
    pub a: usize,
    pub m: u64,
}

impl Flat {
    pub fn new(ring: &GaloisRing, nt: usize) -> Self {
        Flat {
            ring: ring.clone(),
            nt,
            a: ring.degree(),
            m: ring.pn(),
        }
    }

    pub fn len(&self) -> usize {
        self.nt * self.a
    }

    pub fn zero(&self) -> Vec<u64> {
        vec![0; self.len()]
    }

    pub fn one(&self) -> Vec<u64> {
        let mut x = self.zero();
        if self.nt > 0 {
            x[0] = 1 % self.m;
        }
        x
    }

    fn first_nonzero(&self, x: &[u64]) -> usize {
        x.iter().position(|&c| c != 0).map_or(self.nt, |i| i / self.a)
    }

    pub fn order(&self, x: &[u64]) -> SeriesOrder {
        match x.iter().position(|&c| c != 0) {
            Some(i) => SeriesOrder::Exact(i / self.a),
            None => SeriesOrder::AtLeast(self.nt),
        }
    }

    pub fn is_zero(&self, x: &[u64]) -> bool {
        x.iter().all(|&c| c == 0)
    }

    pub fn add_assign(&self, out: &mut [u64], x: &[u64]) {
        for (o, &v) in out.iter_mut().zip(x) {
            *o = (*o + v) % self.m;
        }
    }

    pub fn neg(&self, x: &[u64]) -> Vec<u64> {
        x.iter().map(|&v| (self.m - v) % self.m).collect()
    }

    /// `out += sign·x·y` modulo `T^nt`.
    fn mul_into(&self, out: &mut [u64], x: &[u64], y: &[u64], negate: bool) {
        let (nt, a, m) = (self.nt, self.a, self.m);
        let sx = self.first_nonzero(x);
        let sy = self.first_nonzero(y);
        if sx + sy >= nt {
            return;
        }
        if a == 1 {
            if m < (1 << 21) {
                for k in sx + sy..nt {
                    let mut s: u64 = 0;
                    for i in sx..=k - sy {
                        s += x[i] * y[k - i];
                    }
                    let s = s % m;
                    out[k] = if negate { (out[k] + m - s) % m } else { (out[k] + s) % m };
                }
            } else {
                for k in sx + sy..nt {
                    let mut s: u128 = 0;
                    for i in sx..=k - sy {
                        s += x[i] as u128 * y[k - i] as u128;
                    }
                    let s = (s % m as u128) as u64;
                    out[k] = if negate { (out[k] + m - s) % m } else { (out[k] + s) % m };
                }
            }
            return;
        }
        let r = &self.ring;
        for i in sx..nt {
            let xi = &x[i * a..(i + 1) * a];
            if xi.iter().all(|&c| c == 0) {
                continue;
            }
            let xe: GrElem = SmallVec::from_slice(xi);
            for j in sy..nt - i {
                let yj = &y[j * a..(j + 1) * a];
                if yj.iter().all(|&c| c == 0) {
                    continue;
                }
                let p = r.mul(&xe, &SmallVec::from_slice(yj));
                let o = &mut out[(i + j) * a..(i + j + 1) * a];
                for (oc, pc) in o.iter_mut().zip(p) {
                    *oc = if negate { (*oc + m - pc) % m } else { (*oc + pc) % m };
                }
            }
        }
    }

    pub fn mul_add(&self, out: &mut [u64], x: &[u64], y: &[u64]) {
        self.mul_into(out, x, y, false)
    }

    pub fn mul_sub(&self, out: &mut [u64], x: &[u64], y: &[u64]) {
        self.mul_into(out, x, y, true)
    }

    pub fn mul(&self, x: &[u64], y: &[u64]) -> Vec<u64> {
        let mut out = self.zero();
        self.mul_add(&mut out, x, y);
        out
    }

    /// Coefficientwise `σ^k`.
    pub fn frobenius_pow(&self, x: &[u64], k: i64) -> Vec<u64> {
        if self.a == 1 {
            return x.to_vec();
        }
        let mut out = Vec::with_capacity(x.len());
        for c in x.chunks(self.a) {
            out.extend(self.ring.frobenius_pow(&SmallVec::from_slice(c), k));
        }
        out
    }

    pub fn to_tseries(&self, x: &[u64]) -> TSeries<GaloisRing> {
        let coeffs = x.chunks(self.a).map(SmallVec::from_slice).collect();
        TSeries::from_coeffs(&self.ring, coeffs, self.nt)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_matches_tseries() {
        for e in [1usize, 2] {
            let r = GaloisRing::new(5, 2, e).unwrap();
            let f = Flat::new(&r, 6);
            let x: Vec<u64> = (0..f.len() as u64).map(|i| (i * 7 + 3) % 25).collect();
            let y: Vec<u64> = (0..f.len() as u64).map(|i| (i * i + 1) % 25).collect();
            let prod = f.mul(&x, &y);
            let expect = f.to_tseries(&x).mul(&f.to_tseries(&y));
            assert_eq!(f.to_tseries(&prod).coeffs(), expect.coeffs());
            let mut z = prod.clone();
            f.mul_sub(&mut z, &x, &y);
            assert!(f.is_zero(&z));
        }
    }
}
