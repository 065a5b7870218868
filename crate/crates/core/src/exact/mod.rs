//! Exact rational arithmetic and integer/rational linear algebra.
//!
//! Every quantity in the crate (Gram entries, heights, contribution terms,
//! polynomial coefficients) is a [`Rat`] or a [`BigInt`]; nothing is ever
//! rounded.

mod linalg;
mod matrix;
mod rat;
mod snf;

pub use linalg::{determinant, inverse, ldl_decompose, solve_linear_rational, LinalgError};
pub use matrix::{dot, IntMatrix, Matrix, RatMatrix};
pub use num_bigint::BigInt;
pub use rat::{rat, ParseRatError, Rat};
pub use snf::{abs_det, integer_kernel, smith_normal_form, SmithForm};

/// Converts an integer vector to rationals.
pub fn to_rat_vec(v: &[BigInt]) -> Vec<Rat> {
    v.iter().map(Rat::from).collect()
}

/// Converts a rational vector to integers, if every entry is integral.
pub fn to_int_vec(v: &[Rat]) -> Option<Vec<BigInt>> {
    v.iter().map(Rat::to_integer).collect()
}

pub fn big(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}
