//! `det(1 − A s)` to finite `s`-precision over `GR(p^N, a)[[T]]/(T^{N_T})`.

use super::flat::Flat;
use super::matrix::mat_mul;
use crate::exec::Exec;
use crate::padic::mulmod;

/// Division-free route: Berkowitz recursion on leading principal blocks,
/// `D_{r+1}(s) = D_r(s)·(1 − a s − Σ_t (R A_r^t c) s^{t+2})`.
pub(crate) fn berkowitz(fl: &Flat, a: &[Vec<u64>], n: usize, kmax: usize, exec: Exec) -> Vec<Vec<u64>> {
    let mut d: Vec<Vec<u64>> = vec![fl.zero(); kmax + 1];
    d[0] = fl.one();
    for r in 0..n {
        let mut factor: Vec<Vec<u64>> = vec![fl.zero(); kmax + 1];
        factor[0] = fl.one();
        if kmax >= 1 {
            factor[1] = fl.neg(&a[r * n + r]);
        }
        let mut v: Vec<Vec<u64>> = (0..r).map(|i| a[i * n + r].clone()).collect();
        for t in 0..kmax.saturating_sub(1) {
            let mut dot = fl.zero();
            for (k, vk) in v.iter().enumerate() {
                fl.mul_add(&mut dot, &a[r * n + k], vk);
            }
            factor[t + 2] = fl.neg(&dot);
            if t + 3 <= kmax {
                v = exec.map_range(r, |i| {
                    let mut out = fl.zero();
                    for (k, vk) in v.iter().enumerate() {
                        fl.mul_add(&mut out, &a[i * n + k], vk);
                    }
                    out
                });
            }
        }
        let mut next: Vec<Vec<u64>> = vec![fl.zero(); kmax + 1];
        for (i, di) in d.iter().enumerate() {
            if fl.is_zero(di) {
                continue;
            }
            for (j, fj) in factor.iter().enumerate().take(kmax + 1 - i) {
                fl.mul_add(&mut next[i + j], di, fj);
            }
        }
        d = next;
    }
    d
}

/// `tr(A^k)` for `k = 1..=kmax` from successive matrix powers.
pub(crate) fn power_traces(fl: &Flat, a: &[Vec<u64>], n: usize, kmax: usize, exec: Exec) -> Vec<Vec<u64>> {
    let mut out = Vec::with_capacity(kmax);
    let mut pw = a.to_vec();
    for k in 1..=kmax {
        if k == 1 {
            let mut tr = fl.zero();
            for i in 0..n {
                fl.add_assign(&mut tr, &pw[i * n + i]);
            }
            out.push(tr);
        } else {
            // tr(A^{k−1}·A) needs only the diagonal of the product
            let rows = exec.map_range(n, |i| {
                let mut acc = fl.zero();
                for j in 0..n {
                    fl.mul_add(&mut acc, &pw[i * n + j], &a[j * n + i]);
                }
                acc
            });
            let mut tr = fl.zero();
            for r in &rows {
                fl.add_assign(&mut tr, r);
            }
            out.push(tr);
        }
        if k >= 2 && k < kmax {
            pw = mat_mul(fl, &pw, a, n, exec);
        }
    }
    out
}

/// `H_0..H_kmax` from power sums by `k·H_k = −Σ_{i=1}^k P_i H_{k−i}`;
/// needs every `k ≤ kmax` to be a unit, i.e. `kmax < p`.
pub(crate) fn h_from_traces(fl: &Flat, traces: &[Vec<u64>]) -> Option<Vec<Vec<u64>>> {
    let p = fl.ring.p();
    let m = fl.m;
    let kmax = traces.len();
    if kmax as u64 >= p {
        return None;
    }
    let mut h = vec![fl.one()];
    for k in 1..=kmax {
        let mut acc = fl.zero();
        for i in 1..=k {
            fl.mul_sub(&mut acc, &traces[i - 1], &h[k - i]);
        }
        let inv = inverse_mod(k as u64, m)?;
        h.push(acc.iter().map(|&c| mulmod(c, inv, m)).collect());
    }
    Some(h)
}

/// Power sums `P_k = −k·H_k − Σ_{i=1}^{k−1} P_i H_{k−i}` (division-free).
pub(crate) fn traces_from_h(fl: &Flat, h: &[Vec<u64>], kmax: usize) -> Vec<Vec<u64>> {
    let m = fl.m;
    let mut p: Vec<Vec<u64>> = Vec::with_capacity(kmax);
    for k in 1..=kmax {
        let mut acc: Vec<u64> = h[k].iter().map(|&c| (m - mulmod(c, k as u64 % m, m)) % m).collect();
        for i in 1..k {
            fl.mul_sub(&mut acc, &p[i - 1], &h[k - i]);
        }
        p.push(acc);
    }
    p
}

fn inverse_mod(x: u64, m: u64) -> Option<u64> {
    let (mut a, mut b) = (x as i128 % m as i128, m as i128);
    let (mut s0, mut s1) = (1i128, 0i128);
    while b != 0 {
        let qt = a / b;
        (a, b) = (b, a - qt * b);
        (s0, s1) = (s1, s0 - qt * s1);
    }
    (a == 1).then(|| s0.rem_euclid(m as i128) as u64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::GaloisRing;

    #[test]
    fn routes_agree_on_random_matrix() {
        let ring = GaloisRing::new(7, 2, 1).unwrap();
        let fl = Flat::new(&ring, 5);
        let n = 4;
        let a: Vec<Vec<u64>> = (0..n * n)
            .map(|i| (0..5).map(|k| ((i * 31 + k * 17 + i * k * 5) % 49) as u64).collect())
            .collect();
        let b = berkowitz(&fl, &a, n, 4, Exec::Sequential);
        let t = power_traces(&fl, &a, n, 4, Exec::Parallel);
        let h = h_from_traces(&fl, &t).unwrap();
        assert_eq!(b, h);
        assert_eq!(traces_from_h(&fl, &b, 4), t);
        for k in 1..4 {
            assert_eq!(power_traces(&fl, &a, n, k, Exec::Sequential), t[..k]);
        }
        // H_k vanish beyond the size
        let b6 = berkowitz(&fl, &a, n, 6, Exec::Sequential);
        assert!(fl.is_zero(&b6[5]) && fl.is_zero(&b6[6]));
    }
}
