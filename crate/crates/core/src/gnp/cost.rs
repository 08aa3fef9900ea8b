use serde::{Deserialize, Serialize};

use super::ResidueClass;
use crate::polytope::{LatticePoint, RectDelta, Simplex};
use crate::rat::{q, Q};

/// How the per-entry contribution `cost(i, j)` to `M(S, σ)` is computed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CostModel {
    /// `1 − r_c/d_c` with `r = (R·i − j) mod (d1, d2)`, `c` the simplex of `i`.
    Residue,
    /// `⌈w(p·i − j)⌉ − p·w(i) + w(j)` in its large-`p` form, which depends on
    /// `p` only through its class.
    Ceiling,
}

/// Source of a cost matrix: a residue class under a model, or the exact
/// ceiling costs at a specific prime.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CostSpec {
    Class(ResidueClass, CostModel),
    AtPrime(u64),
}

/// Square matrix of costs in units of `1/D`; `None` marks forbidden pairs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CostMatrix {
    n: usize,
    scale: i64,
    entries: Vec<Option<i64>>,
}

impl CostMatrix {
    pub fn from_scaled(n: usize, scale: i64, entries: Vec<Option<i64>>) -> Self {
        assert_eq!(entries.len(), n * n);
        CostMatrix { n, scale, entries }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    /// Denominator of the stored integer costs.
    pub fn scale(&self) -> i64 {
        self.scale
    }

    pub fn scaled(&self, i: usize, j: usize) -> Option<i64> {
        self.entries[i * self.n + j]
    }

    pub fn get(&self, i: usize, j: usize) -> Option<Q> {
        self.scaled(i, j).map(|c| q(c, self.scale))
    }

    pub fn row(&self, i: usize) -> &[Option<i64>] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    /// Sum of a permutation's costs, `None` if it uses a forbidden pair.
    pub fn perm_cost(&self, perm: &[usize]) -> Option<i64> {
        perm.iter().enumerate().map(|(i, &j)| self.scaled(i, j)).sum()
    }

    /// Submatrix on the given rows and columns.
    pub fn restrict(&self, rows: &[usize], cols: &[usize]) -> CostMatrix {
        assert_eq!(rows.len(), cols.len());
        let entries = rows
            .iter()
            .flat_map(|&r| cols.iter().map(move |&c| (r, c)))
            .map(|(r, c)| self.scaled(r, c))
            .collect();
        CostMatrix {
            n: rows.len(),
            scale: self.scale,
            entries,
        }
    }
}

/// `D·cost(i, j)`, or `None` when the pair is forbidden.
pub fn entry_cost(delta: &RectDelta, spec: CostSpec, i: LatticePoint, j: LatticePoint) -> Option<i64> {
    let big_d = delta.big_d() as i64;
    if let CostSpec::AtPrime(p) = spec {
        let v = i.scaled_minus(p as u32, j)?;
        let ceil = (delta.weight_num(v) as i64 + big_d - 1) / big_d * big_d;
        return Some(ceil - p as i64 * delta.weight_num(i) as i64 + delta.weight_num(j) as i64);
    }
    if i.is_origin() {
        return j.is_origin().then_some(0);
    }
    if (i.v1 == 0 && j.v1 > 0) || (i.v2 == 0 && j.v2 > 0) {
        return None;
    }
    let CostSpec::Class(class, model) = spec else {
        unreachable!()
    };
    let (d1, d2) = (delta.d1() as i64, delta.d2() as i64);
    match model {
        CostModel::Residue => {
            let (ic, jc, rc, dc) = match delta.simplex_class(i) {
                Simplex::S1 => (i.v1, j.v1, class.r1, d1),
                Simplex::S2 => (i.v2, j.v2, class.r2, d2),
            };
            let r = (rc as i64 * ic as i64 - jc as i64).rem_euclid(dc);
            Some(big_d / dc * (dc - r))
        }
        CostModel::Ceiling => {
            let a1 = i.v1 as i64 * d2;
            let a2 = i.v2 as i64 * d1;
            let first = a1 > a2 || (a1 == a2 && j.v1 as i64 * d2 <= j.v2 as i64 * d1);
            let (ic, jc, rc, dc) = if first {
                (i.v1, j.v1, class.r1, d1)
            } else {
                (i.v2, j.v2, class.r2, d2)
            };
            let frac = (jc as i64 - rc as i64 * ic as i64).rem_euclid(dc);
            Some(big_d / dc * (frac - jc as i64) + delta.weight_num(j) as i64)
        }
    }
}

/// Cost matrix on the point list `pts` (rows and columns in list order).
pub fn cost_matrix(delta: &RectDelta, spec: CostSpec, pts: &[LatticePoint]) -> CostMatrix {
    let n = pts.len();
    let entries = pts
        .iter()
        .flat_map(|&i| pts.iter().map(move |&j| entry_cost(delta, spec, i, j)))
        .collect();
    CostMatrix {
        n,
        scale: delta.big_d() as i64,
        entries,
    }
}
