//! The Artin-Hasse exponential and the series `π(T)` with `E(π(T)) = 1+T`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_traits::{One, Zero};

use super::galois::{checked_pow, mulmod};
use super::series::{conv_u64, Rationals, TSeries};
use super::PadicError;
use crate::rat::{q_mod, qi, Q};

/// `u_0..=u_n` with `E(x) = exp(Σ_{i≥0} x^{p^i}/p^i) = Σ u_j x^j`.
///
/// Uses `n·u_n = Σ_{p^i ≤ n} u_{n−p^i}`, from `E' = E·Σ x^{p^i−1}`.
pub fn artin_hasse_coeffs(p: u64, n: usize) -> Vec<Q> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Arc<Vec<Q>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(v) = cache.lock().unwrap().get(&p) {
        if v.len() > n {
            return v[..=n].to_vec();
        }
    }
    let mut u: Vec<Q> = vec![Q::one()];
    for k in 1..=n {
        let mut s = Q::zero();
        let mut pi = 1usize;
        while pi <= k {
            s += &u[k - pi];
            pi = match pi.checked_mul(p as usize) {
                Some(v) => v,
                None => break,
            };
        }
        u.push(s / qi(k as i64));
    }
    cache.lock().unwrap().insert(p, Arc::new(u.clone()));
    u
}

/// Artin-Hasse coefficients reduced mod `p^prec`.
pub fn artin_hasse_mod(p: u64, prec: u32, n: usize) -> Result<Vec<u64>, PadicError> {
    let m = checked_pow(p, prec).ok_or(PadicError::Overflow)?;
    Ok(artin_hasse_coeffs(p, n)
        .iter()
        .map(|u| q_mod(u, m).expect("Artin-Hasse coefficients are p-integral"))
        .collect())
}

/// `π(T)` over the rationals, from `log(1+T) = Σ_{i≥0} π^{p^i}/p^i` by
/// fixed-point iteration (each pass fixes at least `p−1` more coefficients).
pub fn invert_artin_hasse(p: u64, n_t: usize) -> TSeries<Rationals> {
    let r = Rationals;
    let log: Vec<Q> = (0..n_t)
        .map(|k| match k {
            0 => Q::zero(),
            _ => {
                let s = if k % 2 == 1 { 1 } else { -1 };
                Q::new(s.into(), (k as i64).into())
            }
        })
        .collect();
    let log = TSeries::from_coeffs(&r, log, n_t);
    let mut pi = log.clone();
    let passes = n_t / (p as usize - 1) + 2;
    for _ in 0..passes {
        let mut next = log.clone();
        let mut power = pi.clone();
        let mut pk = 1i64;
        loop {
            power = power.pow(p);
            pk *= p as i64;
            if power.is_zero() {
                break;
            }
            next = next.sub(&power.scale(&(Q::one() / qi(pk))));
        }
        if next == pi {
            break;
        }
        pi = next;
    }
    pi
}

/// `π(T)` with coefficients in `Z/p^prec`, by Newton iteration on
/// `E(π) − (1+T) = 0`. Cached per `(p, prec, n_t)`.
pub fn pi_series_mod(p: u64, prec: u32, n_t: usize) -> Result<Arc<Vec<u64>>, PadicError> {
    static CACHE: OnceLock<Mutex<HashMap<(u64, u32, usize), Arc<Vec<u64>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(v) = cache.lock().unwrap().get(&(p, prec, n_t)) {
        return Ok(v.clone());
    }
    let m = checked_pow(p, prec).ok_or(PadicError::Overflow)?;
    let u = artin_hasse_mod(p, prec, n_t)?;
    let du: Vec<u64> = (1..=n_t.max(1))
        .map(|j| mulmod(j as u64 % m, *u.get(j).unwrap_or(&0), m))
        .collect();
    let mut pi = vec![0u64; n_t];
    if n_t > 1 {
        pi[1] = 1;
    }
    let mut good = 2usize;
    while good < n_t {
        let e = horner(&pi, &u, m, n_t);
        let de = horner(&pi, &du, m, n_t);
        let mut f = e;
        f[0] = (f[0] + m - 1) % m;
        if n_t > 1 {
            f[1] = (f[1] + m - 1) % m;
        }
        let inv = series_inv_mod(&de, m);
        let mut corr = vec![0u64; n_t];
        conv_u64(&f, &inv, &mut corr, m);
        for (x, c) in pi.iter_mut().zip(corr) {
            *x = (*x + m - c) % m;
        }
        good *= 2;
    }
    let v = Arc::new(pi);
    cache.lock().unwrap().insert((p, prec, n_t), v.clone());
    Ok(v)
}

fn horner(s: &[u64], outer: &[u64], m: u64, n: usize) -> Vec<u64> {
    let mut acc = vec![0u64; n];
    let mut tmp = vec![0u64; n];
    for c in outer.iter().take(n + 1).rev() {
        conv_u64(&acc, s, &mut tmp, m);
        std::mem::swap(&mut acc, &mut tmp);
        if n > 0 {
            acc[0] = (acc[0] + c) % m;
        }
    }
    acc
}

fn series_inv_mod(a: &[u64], m: u64) -> Vec<u64> {
    let n = a.len();
    debug_assert_eq!(a[0] % m, 1);
    let mut out = vec![0u64; n];
    if n == 0 {
        return out;
    }
    out[0] = 1;
    for k in 1..n {
        let mut s = 0u64;
        for i in 1..=k {
            s = (s + mulmod(a[i], out[k - i], m)) % m;
        }
        out[k] = (m - s) % m;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{q, vp_q};

    #[test]
    fn small_coefficients() {
        let u = artin_hasse_coeffs(5, 6);
        assert_eq!(u[0], qi(1));
        assert_eq!(u[1], qi(1));
        assert_eq!(u[2], q(1, 2));
        assert_eq!(u[4], q(1, 24));
        assert_eq!(u[5], q(5, 24));
        assert_eq!(vp_q(&u[5], 5), Some(1));
    }

    #[test]
    fn coefficients_are_p_integral() {
        for p in [3u64, 5, 7, 11] {
            for (j, u) in artin_hasse_coeffs(p, 64).iter().enumerate() {
                if j < p as usize {
                    let mut f = Q::one();
                    for i in 1..=j {
                        f = f * qi(i as i64);
                    }
                    assert_eq!(u, &(Q::one() / f));
                }
                assert!(vp_q(u, p).unwrap() >= 0, "p={p} j={j}");
            }
        }
    }

    #[test]
    fn inversion_identity() {
        for p in [3u64, 5, 7] {
            let n = 24;
            let pi = invert_artin_hasse(p, n);
            assert_eq!(pi.coeff(1), &qi(1));
            assert_eq!(pi.coeff(2), &q(-1, 2));
            let u = artin_hasse_coeffs(p, n);
            let e = pi.compose_into(&u);
            let mut target = TSeries::t(&Rationals, n);
            target.set_coeff(0, Q::one());
            assert_eq!(e, target);
            for c in pi.coeffs() {
                if !c.is_zero() {
                    assert!(vp_q(c, p).unwrap() >= 0);
                }
            }
        }
    }

    #[test]
    fn modular_newton_matches_rational_series() {
        for (p, prec) in [(5u64, 2u32), (5, 4), (7, 3), (3, 5)] {
            let n = 30;
            let exact = invert_artin_hasse(p, n);
            let m = p.pow(prec);
            let fast = pi_series_mod(p, prec, n).unwrap();
            for k in 0..n {
                assert_eq!(q_mod(exact.coeff(k), m).unwrap(), fast[k], "p={p} k={k}");
            }
        }
    }

    #[test]
    fn p_integral_up_to_64() {
        for p in [3u64, 5, 7, 11] {
            let pi = invert_artin_hasse(p, 64);
            assert!(pi.coeffs().iter().all(|c| c.is_zero() || vp_q(c, p).unwrap() >= 0));
        }
    }
}
