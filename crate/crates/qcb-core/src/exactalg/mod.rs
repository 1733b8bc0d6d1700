//! Exact arithmetic kernel: rationals, sparse polynomials, linear forms and
//! factored ratios of linear forms.

pub mod linform;
pub mod poly;
pub mod ratio;

pub use linform::{FormSubst, LinForm};
pub use poly::{format_rat, parse_rat, rat, rint, Exponent, Poly, PolyError, Rat};
pub use ratio::FactoredRatio;
