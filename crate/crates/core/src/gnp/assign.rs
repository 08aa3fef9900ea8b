//! Exact minimum-cost assignment with lexicographically least witnesses.

use serde::Serialize;

use super::{CostMatrix, GnpError};
use crate::exec::Exec;
use crate::rat::{q, Q};

/// Largest size handled by [`min_assignment`] with the exhaustive solver.
pub const EXHAUSTIVE_LIMIT: usize = 12;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Assignment {
    /// Minimal total cost in units of `1/scale`.
    pub scaled: i64,
    pub scale: i64,
    /// `perm[i]` is the column assigned to row `i`.
    pub perm: Vec<usize>,
}

impl Assignment {
    pub fn value(&self) -> Q {
        q(self.scaled, self.scale)
    }
}

struct Search<'a> {
    m: &'a CostMatrix,
    best: Option<(i64, Vec<usize>)>,
    perm: Vec<usize>,
}

impl Search<'_> {
    /// Sum over rows `row..` of the cheapest feasible unused column.
    fn bound(&self, row: usize, used: u64) -> Option<i64> {
        let mut total = 0;
        for r in row..self.m.size() {
            let mut best: Option<i64> = None;
            for (c, e) in self.m.row(r).iter().enumerate() {
                if used >> c & 1 == 0 {
                    if let Some(v) = e {
                        best = Some(best.map_or(*v, |b: i64| b.min(*v)));
                    }
                }
            }
            total += best?;
        }
        Some(total)
    }

    fn run(&mut self, row: usize, used: u64, partial: i64) {
        let n = self.m.size();
        if row == n {
            if self.best.as_ref().is_none_or(|(b, _)| partial < *b) {
                self.best = Some((partial, self.perm.clone()));
            }
            return;
        }
        let Some(lb) = self.bound(row, used) else { return };
        if let Some((b, _)) = &self.best {
            if partial + lb >= *b {
                return;
            }
        }
        for c in 0..n {
            if used >> c & 1 == 1 {
                continue;
            }
            if let Some(v) = self.m.scaled(row, c) {
                self.perm.push(c);
                self.run(row + 1, used | 1 << c, partial + v);
                self.perm.pop();
            }
        }
    }
}

/// Branch and bound over all bijections, splitting on the first row's
/// column when `exec` is parallel. Ties resolve to the lexicographically
/// least permutation.
pub fn min_assignment_exhaustive(m: &CostMatrix, exec: Exec) -> Result<Assignment, GnpError> {
    let n = m.size();
    assert!(n <= 64, "exhaustive assignment limited to 64 rows");
    if n == 0 {
        return Ok(Assignment {
            scaled: 0,
            scale: m.scale(),
            perm: vec![],
        });
    }
    let branches = exec.map_range(n, |c| {
        let v = m.scaled(0, c)?;
        let mut s = Search {
            m,
            best: None,
            perm: vec![c],
        };
        s.run(1, 1 << c, v);
        s.best
    });
    branches
        .into_iter()
        .flatten()
        .min()
        .map(|(scaled, perm)| Assignment {
            scaled,
            scale: m.scale(),
            perm,
        })
        .ok_or(GnpError::Infeasible)
}

/// Classical `O(n³)` potentials method on a dense integer matrix; returns
/// the column of each row.
fn hungarian(cost: &[i64], n: usize) -> Vec<usize> {
    const INF: i64 = i64::MAX / 4;
    let mut u = vec![0i64; n + 1];
    let mut v = vec![0i64; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![INF; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = INF;
            let mut j1 = 0;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost[(i0 - 1) * n + (j - 1)] - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut ans = vec![0; n];
    for j in 1..=n {
        ans[p[j] - 1] = j - 1;
    }
    ans
}

/// Optimal value of `m` restricted to the free rows/columns, or `None`.
fn reduced_optimum(m: &CostMatrix, rows: &[usize], cols: &[usize], big: i64) -> Option<i64> {
    let k = rows.len();
    if k == 0 {
        return Some(0);
    }
    let dense: Vec<i64> = rows
        .iter()
        .flat_map(|&r| cols.iter().map(move |&c| m.scaled(r, c).unwrap_or(big)))
        .collect();
    let perm = hungarian(&dense, k);
    perm.iter().enumerate().map(|(i, &j)| m.scaled(rows[i], cols[j])).sum()
}

/// Hungarian method with forbidden entries priced out, followed by
/// row-by-row fixing to extract the lexicographically least optimum.
pub fn min_assignment_hungarian(m: &CostMatrix) -> Result<Assignment, GnpError> {
    let n = m.size();
    let finite = || (0..n).flat_map(|i| m.row(i).iter().flatten().copied());
    let max = finite().max().unwrap_or(0).max(0);
    let min = finite().min().unwrap_or(0).min(0);
    let big = (n as i64 + 1) * (max - min + 1);
    let all: Vec<usize> = (0..n).collect();
    let opt = reduced_optimum(m, &all, &all, big).ok_or(GnpError::Infeasible)?;
    let mut perm = Vec::with_capacity(n);
    let mut fixed_cost = 0;
    let mut free_cols: Vec<usize> = all.clone();
    for r in 0..n {
        let rows: Vec<usize> = (r + 1..n).collect();
        let mut chosen = None;
        for (idx, &c) in free_cols.iter().enumerate() {
            let Some(v) = m.scaled(r, c) else { continue };
            let cols: Vec<usize> = free_cols.iter().copied().filter(|&x| x != c).collect();
            if let Some(rest) = reduced_optimum(m, &rows, &cols, big) {
                if fixed_cost + v + rest == opt {
                    chosen = Some((idx, c, v));
                    break;
                }
            }
        }
        let (idx, c, v) = chosen.expect("optimum must extend row by row");
        free_cols.remove(idx);
        perm.push(c);
        fixed_cost += v;
    }
    Ok(Assignment {
        scaled: opt,
        scale: m.scale(),
        perm,
    })
}

/// Exhaustive search up to [`EXHAUSTIVE_LIMIT`] rows, Hungarian above.
pub fn min_assignment(m: &CostMatrix, exec: Exec) -> Result<Assignment, GnpError> {
    if m.size() <= EXHAUSTIVE_LIMIT {
        min_assignment_exhaustive(m, exec)
    } else {
        min_assignment_hungarian(m)
    }
}

struct LevelWalk<'a, F: FnMut(&[usize]) -> bool> {
    m: &'a CostMatrix,
    target: i64,
    perm: Vec<usize>,
    visit: F,
    stopped: bool,
}

impl<F: FnMut(&[usize]) -> bool> LevelWalk<'_, F> {
    fn run(&mut self, row: usize, used: u64, partial: i64, row_min: &[i64]) {
        let n = self.m.size();
        if row == n {
            if partial == self.target && !(self.visit)(&self.perm) {
                self.stopped = true;
            }
            return;
        }
        if partial + row_min[row] > self.target {
            return;
        }
        for c in 0..n {
            if self.stopped {
                return;
            }
            if used >> c & 1 == 1 {
                continue;
            }
            if let Some(v) = self.m.scaled(row, c) {
                self.perm.push(c);
                self.run(row + 1, used | 1 << c, partial + v, row_min);
                self.perm.pop();
            }
        }
    }
}

/// Calls `visit` on every permutation whose total scaled cost equals
/// `target`, in lexicographic order, restricted to permutations whose first
/// row maps to `first` when given. The walk stops early once `visit`
/// returns `false`.
pub fn for_each_at_level<F: FnMut(&[usize]) -> bool>(m: &CostMatrix, target: i64, first: Option<usize>, visit: F) {
    let n = m.size();
    assert!(n <= 64);
    if n == 0 {
        let mut visit = visit;
        if target == 0 {
            visit(&[]);
        }
        return;
    }
    // suffix sums of row minima as the pruning bound
    let mut row_min = vec![0i64; n + 1];
    for r in (0..n).rev() {
        let Some(mn) = m.row(r).iter().flatten().min() else {
            return;
        };
        row_min[r] = row_min[r + 1] + mn;
    }
    let mut w = LevelWalk {
        m,
        target,
        perm: Vec::with_capacity(n),
        visit,
        stopped: false,
    };
    match first {
        None => w.run(0, 0, 0, &row_min),
        Some(c) => {
            if let Some(v) = m.scaled(0, c) {
                w.perm.push(c);
                w.run(1, 1 << c, v, &row_min);
            }
        }
    }
}

/// Sign of a permutation.
pub fn perm_sign(perm: &[usize]) -> i32 {
    let mut seen = vec![false; perm.len()];
    let mut sign = 1;
    for s in 0..perm.len() {
        if seen[s] {
            continue;
        }
        let mut len = 0;
        let mut k = s;
        while !seen[k] {
            seen[k] = true;
            k = perm[k];
            len += 1;
        }
        if len % 2 == 0 {
            sign = -sign;
        }
    }
    sign
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(n: usize, rows: &[&[Option<i64>]]) -> CostMatrix {
        CostMatrix::from_scaled(n, 1, rows.iter().flat_map(|r| r.iter().copied()).collect())
    }

    #[test]
    fn small_cases() {
        let m = mat(
            3,
            &[
                &[Some(4), Some(1), Some(3)],
                &[Some(2), Some(0), Some(5)],
                &[Some(3), Some(2), Some(2)],
            ],
        );
        let a = min_assignment_exhaustive(&m, Exec::Sequential).unwrap();
        assert_eq!((a.scaled, a.perm.clone()), (5, vec![1, 0, 2]));
        assert_eq!(min_assignment_hungarian(&m).unwrap(), a);
        let f = mat(2, &[&[Some(1), None], &[Some(1), None]]);
        assert_eq!(
            min_assignment_exhaustive(&f, Exec::Sequential),
            Err(GnpError::Infeasible)
        );
        assert_eq!(min_assignment_hungarian(&f), Err(GnpError::Infeasible));
    }

    #[test]
    fn ties_resolve_lexicographically() {
        let m = mat(3, &[&[Some(1); 3], &[Some(1); 3], &[Some(1); 3]]);
        assert_eq!(
            min_assignment_exhaustive(&m, Exec::Parallel).unwrap().perm,
            vec![0, 1, 2]
        );
        assert_eq!(min_assignment_hungarian(&m).unwrap().perm, vec![0, 1, 2]);
    }

    #[test]
    fn signs_and_levels() {
        assert_eq!(perm_sign(&[0, 1, 2]), 1);
        assert_eq!(perm_sign(&[1, 0, 2]), -1);
        assert_eq!(perm_sign(&[1, 2, 0]), 1);
        let m = mat(3, &[&[Some(1); 3], &[Some(1); 3], &[Some(1); 3]]);
        let mut count = 0;
        for_each_at_level(&m, 3, None, |_| {
            count += 1;
            true
        });
        assert_eq!(count, 6);
    }
}
