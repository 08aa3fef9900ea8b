//! Verification lab for generic Newton slopes of Artin-Schreier-Witt towers
//! in two variables over the rectangle `[0,d1]×[0,d2]`.
//!
//! The formula side lives in [`polytope`], [`polygon`], [`gnp`] and
//! [`symbolic`]; the analytic side in [`padic`], [`dwork`] and [`oracle`].

pub mod dwork;
pub mod exec;
pub mod fpoly;
pub mod gnp;
#[cfg(test)]
mod invariants;
pub mod oracle;
pub mod padic;
pub mod polygon;
pub mod polytope;
pub mod rat;
pub mod symbolic;

pub use exec::Exec;
pub use fpoly::FPoly;
pub use polygon::{NewtonPolygon, SlopeMultiset};
pub use polytope::{LatticePoint, RectDelta};
pub use rat::Q;
