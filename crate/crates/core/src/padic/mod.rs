//! Exact p-adic substrate: Galois rings, truncated T-series, cyclotomic
//! integers and the Artin-Hasse series.

mod artin_hasse;
mod cyclo;
mod galois;
mod series;

pub use artin_hasse::{artin_hasse_coeffs, artin_hasse_mod, invert_artin_hasse, pi_series_mod};
pub use cyclo::{CycInt, CycResidue, PiValuation};
pub use galois::{default_modulus, is_irreducible_mod_p, is_prime, is_primitive_mod_p, GaloisRing, GrElem};
pub use series::{CoeffRing, Rationals, SeriesOrder, TSeries};

pub(crate) use galois::{checked_pow, mulmod};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PadicError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("modulus is reducible mod p")]
    Reducible,
    #[error("bad modulus: {0}")]
    BadModulus(String),
    #[error("modulus p^N does not fit in 62 bits")]
    Overflow,
    #[error("T-precision {have} below the required {need}")]
    PrecisionExhausted { need: usize, have: usize },
    #[error("series coefficients leave the prime subring")]
    NotInPrimeSubring,
}

/// `T ↦ ζ_{p^m} − 1` applied to a series over `Z/p^N` (or over a Galois
/// ring whose coefficients lie in the prime subring).
///
/// The discarded tail has π-valuation at least `N_T`, so `N_T ≥ N·φ(p^m)`
/// is required for the result to be exact modulo `p^N`.
pub fn specialize_t(s: &TSeries<GaloisRing>, m: u32) -> Result<CycResidue, PadicError> {
    let ring = s.ring();
    let need = ring.prec() as usize * ((ring.p() - 1) * ring.p().pow(m - 1)) as usize;
    if s.prec() < need {
        return Err(PadicError::PrecisionExhausted { need, have: s.prec() });
    }
    specialize_t_unchecked(s, m)
}

/// As [`specialize_t`] without the precision precondition; the result is
/// exact modulo `π^{N_T}`.
pub fn specialize_t_unchecked(s: &TSeries<GaloisRing>, m: u32) -> Result<CycResidue, PadicError> {
    let ring = s.ring();
    let c = s.prime_subring_coeffs().ok_or(PadicError::NotInPrimeSubring)?;
    CycResidue::from_pi_expansion(ring.p(), m, ring.prec(), &c)
}
