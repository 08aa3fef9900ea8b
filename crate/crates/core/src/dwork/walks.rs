//! Traces of powers of the full (untruncated) Dwork operator modulo
//! `T^{N_T}`, by summing closed walks whose `T`-order stays below `N_T`.

use super::flat::Flat;
use super::grid::BGrid;
use crate::exec::Exec;
use crate::polytope::{LatticePoint, RectDelta};

/// Points that can lie on a closed walk of order `< nt`.
pub(crate) fn walk_basis(delta: &RectDelta, p: u64, nt: usize) -> Vec<LatticePoint> {
    let d = delta.big_d();
    // (p−1)·w(x) < nt
    let num = (nt as u64 * d).div_ceil(p - 1).saturating_sub(1);
    delta.points_up_to_weight_num(num)
}

struct Walker<'a> {
    grid: &'a BGrid,
    twisted: &'a [Vec<Option<Vec<u64>>>],
    basis: &'a [LatticePoint],
    delta: &'a RectDelta,
    p: u64,
    len: usize,
}

impl Walker<'_> {
    fn entry(&self, step: usize, i: usize, j: usize) -> Option<&Vec<u64>> {
        self.twisted[step % self.twisted.len()][i * self.basis.len() + j].as_ref()
    }

    fn entry_order(&self, i: usize, j: usize) -> Option<usize> {
        let u = self.basis[i].scaled_minus(self.p as u32, self.basis[j])?;
        self.grid.order(u)
    }

    /// `⌈(p·w(x) − w(y))⌉`, a lower bound for the order of any path x → y.
    fn tail_bound(&self, x: usize, y: usize) -> usize {
        let d = self.delta.big_d() as i64;
        let num =
            self.p as i64 * self.delta.weight_num(self.basis[x]) as i64 - self.delta.weight_num(self.basis[y]) as i64;
        if num <= 0 {
            0
        } else {
            ((num + d - 1) / d) as usize
        }
    }

    fn run(&self, fl: &Flat, start: usize, at: usize, step: usize, order: usize, acc: &[u64], out: &mut [u64]) {
        let nt = fl.nt;
        if step + 1 == self.len {
            if let Some(e) = self.entry(step, at, start) {
                fl.mul_add(out, acc, e);
            }
            return;
        }
        for next in 0..self.basis.len() {
            let Some(o) = self.entry_order(at, next) else { continue };
            if order + o + self.tail_bound(next, start) >= nt {
                continue;
            }
            let Some(e) = self.entry(step, at, next) else { continue };
            let prod = fl.mul(acc, e);
            if fl.is_zero(&prod) {
                continue;
            }
            self.run(fl, start, next, step + 1, order + o, &prod, out);
        }
    }
}

/// `tr(A^k)` for `k = 1..=kmax`, where `A` is the `GR`-linear operator, from
/// a grid holding every `B_u` with `u` reachable from [`walk_basis`].
pub(crate) fn exact_traces(grid: &BGrid, delta: &RectDelta, p: u64, kmax: usize, exec: Exec) -> Vec<Vec<u64>> {
    let fl = &grid.flat;
    let basis = walk_basis(delta, p, fl.nt);
    let n = basis.len();
    let a = fl.a;
    // entries of τ^t(M), τ = σ^{-1}, for t = 0..a
    let twisted: Vec<Vec<Option<Vec<u64>>>> = (0..a)
        .map(|t| {
            exec.map_range(n * n, |idx| {
                let u = basis[idx / n].scaled_minus(p as u32, basis[idx % n])?;
                let e = grid.get(u)?;
                Some(fl.frobenius_pow(e, -(t as i64)))
            })
        })
        .collect();
    (1..=kmax)
        .map(|k| {
            let walker = Walker {
                grid,
                twisted: &twisted,
                basis: &basis,
                delta,
                p,
                len: a * k,
            };
            let parts = exec.map_range(n, |s| {
                let mut out = fl.zero();
                if walker.tail_bound(s, s) < fl.nt {
                    walker.run(fl, s, s, 0, 0, &fl.one(), &mut out);
                }
                out
            });
            let mut tr = fl.zero();
            for part in parts {
                fl.add_assign(&mut tr, &part);
            }
            tr
        })
        .collect()
}
