//! Lower bounds for `ord_T H_k` of the untruncated operator (`a = 1`).
//!
//! Each `k`-minor term is a product of entries `B_{p·i − σ(i)}` whose
//! orders are at least `⌈w(p·i − σ(i))⌉`, so
//! `ord_T H_k ≥ min_S ((p−1)·Σ_{i∈S} w(i) + M_S)` with `M_S` the exact
//! ceiling-cost assignment minimum over `S`.

use super::DworkError;
use crate::exec::Exec;
use crate::gnp::{cost_matrix, min_assignment, CostSpec};
use crate::polytope::{LatticePoint, RectDelta};

struct SubsetSearch<'a> {
    delta: &'a RectDelta,
    p: u64,
    pool: &'a [LatticePoint],
    wn: Vec<u64>,
    k: usize,
    /// Best value found, scaled by `D`.
    best: i64,
    visited: u64,
    budget: u64,
    chosen: Vec<usize>,
}

impl SubsetSearch<'_> {
    fn weight_bound(&self, start: usize, remaining: usize, partial: u64) -> Option<i64> {
        let rest: u64 = self.wn.get(start..start + remaining)?.iter().sum();
        Some((self.p as i64 - 1) * (partial + rest) as i64)
    }

    fn run(&mut self, start: usize, partial: u64) -> Result<(), DworkError> {
        let remaining = self.k - self.chosen.len();
        if remaining == 0 {
            self.visited += 1;
            if self.visited > self.budget {
                return Err(DworkError::Budget {
                    needed: self.visited,
                    budget: self.budget,
                });
            }
            let s: Vec<LatticePoint> = self.chosen.iter().map(|&i| self.pool[i]).collect();
            let base = (self.p as i64 - 1) * partial as i64;
            if let Ok(a) = min_assignment(
                &cost_matrix(self.delta, CostSpec::AtPrime(self.p), &s),
                Exec::Sequential,
            ) {
                self.best = self.best.min(base + a.scaled);
            }
            return Ok(());
        }
        for i in start..self.pool.len() {
            match self.weight_bound(i, remaining, partial) {
                Some(b) if b < self.best => {}
                _ => break,
            }
            self.chosen.push(i);
            self.run(i + 1, partial + self.wn[i])?;
            self.chosen.pop();
        }
        Ok(())
    }
}

/// `L_k` for `k = 0..=kmax`, with `budget` capping the subsets examined per `k`.
pub fn order_lower_bounds(
    delta: &RectDelta,
    p: u64,
    kmax: usize,
    budget: u64,
    exec: Exec,
) -> Result<Vec<u64>, DworkError> {
    let d = delta.big_d() as i64;
    let res = exec.map_range(kmax + 1, |k| -> Result<u64, DworkError> {
        if k == 0 {
            return Ok(0);
        }
        let first = delta.points_up_to_weight_num(k as u64 * delta.big_d());
        let first = &first[..k];
        let wsum: u64 = first.iter().map(|v| delta.weight_num(*v)).sum();
        let init = min_assignment(&cost_matrix(delta, CostSpec::AtPrime(p), first), Exec::Sequential)
            .map_err(|_| DworkError::BadInput("identity assignment infeasible".into()))?;
        let best = (p as i64 - 1) * wsum as i64 + init.scaled;
        // any subset beats `best` only if (p−1)(Σ_{k−1 smallest} + w(x)) < best
        let small: u64 = first[..k - 1].iter().map(|v| delta.weight_num(*v)).sum();
        let cap = (best / (p as i64 - 1)) as u64 - small.min((best / (p as i64 - 1)) as u64);
        let pool = delta.points_up_to_weight_num(cap.max(delta.weight_num(first[k - 1])));
        let wn = pool.iter().map(|v| delta.weight_num(*v)).collect();
        let mut s = SubsetSearch {
            delta,
            p,
            pool: &pool,
            wn,
            k,
            best,
            visited: 0,
            budget,
            chosen: Vec::new(),
        };
        s.run(0, 0)?;
        Ok((s.best / d) as u64)
    });
    res.into_iter().collect()
}
