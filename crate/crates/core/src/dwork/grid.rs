//! Coefficients `B_u(T)` of the Dwork splitting function
//! `E_f(x) = ∏_v E(π â_v x^v) = Σ_u B_u x^u`, with `π = π(T)`.

use smallvec::SmallVec;

use super::flat::Flat;
use super::DworkError;
use crate::exec::Exec;
use crate::fpoly::FPoly;
use crate::padic::{artin_hasse_mod, pi_series_mod, GaloisRing, GrElem};
use crate::polytope::LatticePoint;

pub(crate) struct BGrid {
    pub flat: Flat,
    dims: (usize, usize),
    /// Empty vectors mark cells that vanish modulo `T^nt`.
    cells: Vec<Vec<u64>>,
}

impl BGrid {
    /// All `B_u` with `u1 < dims.0`, `u2 < dims.1`, modulo `(p^N, T^nt)`.
    pub fn build(
        f: &FPoly,
        ring: &GaloisRing,
        nt: usize,
        dims: (usize, usize),
        exec: Exec,
    ) -> Result<Self, DworkError> {
        let flat = Flat::new(ring, nt);
        let (a, m) = (flat.a, flat.m);
        let p = ring.p();
        let u = artin_hasse_mod(p, ring.prec(), nt.max(1))?;
        let n_cells = dims.0 * dims.1;
        let idx = |u1: usize, u2: usize| u1 * dims.1 + u2;

        // π-domain: cell u holds Σ_d b_{u,d} π^d, coefficient d at [d·a, (d+1)·a)
        let mut cells: Vec<Vec<u64>> = vec![Vec::new(); n_cells];
        if n_cells == 0 || nt == 0 {
            return Ok(BGrid { flat, dims, cells });
        }
        cells[0] = flat.one();
        let mut origin: Option<GrElem> = None;
        for (v, c) in f.iter() {
            let lift = ring.teichmuller(&ring.from_coeffs(c));
            if v.is_origin() {
                origin = Some(lift);
                continue;
            }
            // factor coefficients u_k â^k
            let mut fac: Vec<GrElem> = Vec::with_capacity(nt);
            let mut pw = ring.one();
            for k in 0..nt {
                fac.push(ring.scale(&pw, u[k]));
                pw = ring.mul(&pw, &lift);
            }
            let (v1, v2) = (v.v1 as usize, v.v2 as usize);
            // lines u0 + k·v with u0 − v outside the quadrant
            let mut starts = Vec::new();
            for u1 in 0..dims.0 {
                for u2 in 0..dims.1 {
                    if u1 < v1 || u2 < v2 {
                        starts.push((u1, u2));
                    }
                }
            }
            let cells_ref = &cells;
            let updates = exec.map_slice(&starts, |&(s1, s2)| {
                let mut line = Vec::new();
                let (mut x1, mut x2) = (s1, s2);
                while x1 < dims.0 && x2 < dims.1 {
                    line.push(idx(x1, x2));
                    x1 += v1;
                    x2 += v2;
                }
                let mut out: Vec<(usize, Vec<u64>)> = Vec::new();
                for (pos, &ci) in line.iter().enumerate() {
                    let mut acc = flat.zero();
                    let mut any = false;
                    for k in 0..=pos.min(nt - 1) {
                        let src = &cells_ref[line[pos - k]];
                        if src.is_empty() {
                            continue;
                        }
                        any = true;
                        shift_mul_add(&flat, ring, &mut acc, src, &fac[k], k);
                    }
                    if any && !flat.is_zero(&acc) {
                        out.push((ci, acc));
                    } else {
                        out.push((ci, Vec::new()));
                    }
                }
                out
            });
            for line in updates {
                for (ci, val) in line {
                    cells[ci] = val;
                }
            }
        }
        if let Some(lift) = origin {
            let mut fac: Vec<GrElem> = Vec::with_capacity(nt);
            let mut pw = ring.one();
            for k in 0..nt {
                fac.push(ring.scale(&pw, u[k]));
                pw = ring.mul(&pw, &lift);
            }
            let mut series = flat.zero();
            for (k, c) in fac.iter().enumerate() {
                series[k * a..(k + 1) * a].copy_from_slice(c);
            }
            cells = exec.map_slice(&cells, |c| if c.is_empty() { Vec::new() } else { flat.mul(c, &series) });
        }

        // substitute π = π(T)
        let pi = pi_series_mod(p, ring.prec(), nt)?;
        let one_dim = Flat::new(&GaloisRing::prime_ring(p, ring.prec())?, nt);
        let mut powers: Vec<Vec<u64>> = Vec::with_capacity(nt);
        let mut cur = one_dim.one();
        for _ in 0..nt {
            powers.push(cur.clone());
            cur = one_dim.mul(&cur, &pi);
        }
        let cells = exec.map_slice(&cells, |c| {
            if c.is_empty() {
                return Vec::new();
            }
            let mut out = flat.zero();
            for d in 0..nt {
                let b = &c[d * a..(d + 1) * a];
                if b.iter().all(|&x| x == 0) {
                    continue;
                }
                let pw = &powers[d];
                for t in d..nt {
                    let s = pw[t];
                    if s == 0 {
                        continue;
                    }
                    for (comp, &bc) in b.iter().enumerate() {
                        let o = &mut out[t * a + comp];
                        *o = ((*o as u128 + bc as u128 * s as u128) % m as u128) as u64;
                    }
                }
            }
            if flat.is_zero(&out) {
                Vec::new()
            } else {
                out
            }
        });
        Ok(BGrid { flat, dims, cells })
    }

    /// `B_u(T)`, or `None` if `u` lies outside the grid or `B_u ≡ 0`.
    pub fn get(&self, u: LatticePoint) -> Option<&[u64]> {
        let (u1, u2) = (u.v1 as usize, u.v2 as usize);
        if u1 >= self.dims.0 || u2 >= self.dims.1 {
            return None;
        }
        let c = &self.cells[u1 * self.dims.1 + u2];
        (!c.is_empty()).then_some(c.as_slice())
    }

    /// Index of the first nonzero coefficient of `B_u`, if any.
    pub fn order(&self, u: LatticePoint) -> Option<usize> {
        self.get(u).map(|c| self.flat.order(c).value())
    }
}

/// `acc += c·π^k·src` in the π-domain (degrees below `nt`).
fn shift_mul_add(flat: &Flat, ring: &GaloisRing, acc: &mut [u64], src: &[u64], c: &GrElem, k: usize) {
    let (nt, a, m) = (flat.nt, flat.a, flat.m);
    if a == 1 {
        let c = c[0];
        if c == 0 {
            return;
        }
        for d in 0..nt - k {
            let s = src[d];
            if s != 0 {
                acc[d + k] = ((acc[d + k] as u128 + s as u128 * c as u128) % m as u128) as u64;
            }
        }
        return;
    }
    if c.iter().all(|&x| x == 0) {
        return;
    }
    for d in 0..nt - k {
        let s = &src[d * a..(d + 1) * a];
        if s.iter().all(|&x| x == 0) {
            continue;
        }
        let prod = ring.mul(c, &SmallVec::from_slice(s));
        for (o, pc) in acc[(d + k) * a..(d + k + 1) * a].iter_mut().zip(prod) {
            *o = (*o + pc) % m;
        }
    }
}
