//! Exact construction and machine verification of the minimal
//! skew-symmetric polynomial section of the weight subbundle of
//! `(C^N)^{tensor n}`, its identification with generating functions of
//! extended Joseph polynomials, and the associated difference-equation,
//! residue and hypergeometric-integral identities.
//!
//! All symbolic computation is exact over the rationals; the only floating
//! point lives in [`selberg`], which checks the Barnes/q-Selberg constants
//! numerically.

pub mod blocks;
pub mod combinat;
pub mod exactalg;
pub mod joseph;
pub mod minimal;
pub mod residue;
pub mod selberg;
pub mod tensor;

pub use exactalg::{Poly, PolyError, Rat};
pub use tensor::{MultiIndex, TensorVec, WeightLambda};
