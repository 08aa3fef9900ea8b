use super::flat::Flat;
use super::grid::BGrid;
use super::DworkError;
use crate::exec::Exec;
use crate::fpoly::FPoly;
use crate::padic::{GaloisRing, SeriesOrder, TSeries};
use crate::polytope::{LatticePoint, RectDelta};
use crate::rat::Q;

/// The Dwork operator `ψ ∘ E_f` on monomials of weight `≤ wmax`, with
/// entries `B_{p·i − j}(π(T))` modulo `(p^N, T^{N_T})`.
///
/// For `a > 1` the stored matrix is the `σ^{-1}`-semilinear one; the
/// `GR`-linear operator is the product `M·M^{σ^{-1}}···M^{σ^{-(a−1)}}`.
#[derive(Clone, Debug)]
pub struct DworkMatrix {
    delta: RectDelta,
    p: u64,
    wmax: Q,
    basis: Vec<LatticePoint>,
    pub(crate) flat: Flat,
    /// Row-major; empty vectors are zero entries.
    pub(crate) entries: Vec<Vec<u64>>,
}

pub(crate) fn ring_for(f: &FPoly, np: u32) -> Result<GaloisRing, DworkError> {
    Ok(GaloisRing::with_modulus(f.p(), np, f.field_modulus())?)
}

/// Grid extent holding every `B_u` a matrix on `basis` can reference.
pub(crate) fn grid_dims(delta: &RectDelta, p: u64, nt: usize, basis: &[LatticePoint]) -> (usize, usize) {
    let b1 = basis.iter().map(|v| v.v1 as usize).max().unwrap_or(0);
    let b2 = basis.iter().map(|v| v.v2 as usize).max().unwrap_or(0);
    let cap1 = nt * delta.d1() as usize;
    let cap2 = nt * delta.d2() as usize;
    ((p as usize * b1 + 1).min(cap1), (p as usize * b2 + 1).min(cap2))
}

impl DworkMatrix {
    pub fn assemble(f: &FPoly, wmax: &Q, np: u32, nt: usize, exec: Exec) -> Result<Self, DworkError> {
        let delta = *f.delta();
        let basis = delta.points_up_to_weight(wmax);
        let ring = ring_for(f, np)?;
        let grid = BGrid::build(f, &ring, nt, grid_dims(&delta, f.p(), nt, &basis), exec)?;
        Ok(Self::from_grid(&grid, &delta, f.p(), wmax.clone(), basis, exec))
    }

    pub(crate) fn from_grid(
        grid: &BGrid,
        delta: &RectDelta,
        p: u64,
        wmax: Q,
        basis: Vec<LatticePoint>,
        exec: Exec,
    ) -> Self {
        let n = basis.len();
        let entries = exec.map_range(n * n, |idx| {
            let (i, j) = (basis[idx / n], basis[idx % n]);
            match i.scaled_minus(p as u32, j).and_then(|u| grid.get(u)) {
                Some(c) => c.to_vec(),
                None => Vec::new(),
            }
        });
        DworkMatrix {
            delta: *delta,
            p,
            wmax,
            basis,
            flat: grid.flat.clone(),
            entries,
        }
    }

    pub fn delta(&self) -> &RectDelta {
        &self.delta
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn a(&self) -> usize {
        self.flat.a
    }

    pub fn np(&self) -> u32 {
        self.flat.ring.prec()
    }

    pub fn nt(&self) -> usize {
        self.flat.nt
    }

    pub fn wmax(&self) -> &Q {
        &self.wmax
    }

    pub fn ring(&self) -> &GaloisRing {
        &self.flat.ring
    }

    pub fn size(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[LatticePoint] {
        &self.basis
    }

    pub fn entry(&self, i: usize, j: usize) -> TSeries<GaloisRing> {
        let e = &self.entries[i * self.size() + j];
        if e.is_empty() {
            TSeries::zero(&self.flat.ring, self.flat.nt)
        } else {
            self.flat.to_tseries(e)
        }
    }

    pub fn entry_order(&self, i: usize, j: usize) -> SeriesOrder {
        let e = &self.entries[i * self.size() + j];
        if e.is_empty() {
            SeriesOrder::AtLeast(self.flat.nt)
        } else {
            self.flat.order(e)
        }
    }

    /// Entry of the matrix at basis points `(i, j)`, if both are in the basis.
    pub fn entry_at(&self, i: LatticePoint, j: LatticePoint) -> Option<TSeries<GaloisRing>> {
        let a = self.basis.iter().position(|&x| x == i)?;
        let b = self.basis.iter().position(|&x| x == j)?;
        Some(self.entry(a, b))
    }

    /// The same operator on the basis reordered by `perm` (new index `k`
    /// holds old index `perm[k]`).
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let n = self.size();
        assert_eq!(perm.len(), n);
        let basis = perm.iter().map(|&k| self.basis[k]).collect();
        let entries = (0..n * n)
            .map(|idx| self.entries[perm[idx / n] * n + perm[idx % n]].clone())
            .collect();
        DworkMatrix {
            basis,
            entries,
            ..self.clone()
        }
    }

    /// Dense flat entries of the `GR`-linear operator (the `a`-fold
    /// twisted product), with zeros materialized.
    pub(crate) fn linear_entries(&self, exec: Exec) -> Vec<Vec<u64>> {
        let n = self.size();
        let fl = &self.flat;
        let dense: Vec<Vec<u64>> = self
            .entries
            .iter()
            .map(|e| if e.is_empty() { fl.zero() } else { e.clone() })
            .collect();
        if fl.a == 1 {
            return dense;
        }
        let mut acc = dense.clone();
        for t in 1..fl.a {
            let twisted: Vec<Vec<u64>> = dense.iter().map(|e| fl.frobenius_pow(e, -(t as i64))).collect();
            acc = mat_mul(fl, &acc, &twisted, n, exec);
        }
        acc
    }
}

pub(crate) fn mat_mul(fl: &Flat, x: &[Vec<u64>], y: &[Vec<u64>], n: usize, exec: Exec) -> Vec<Vec<u64>> {
    exec.map_range(n * n, |idx| {
        let (i, j) = (idx / n, idx % n);
        let mut out = fl.zero();
        for k in 0..n {
            fl.mul_add(&mut out, &x[i * n + k], &y[k * n + j]);
        }
        out
    })
}
