//! Exact arithmetic kernel: word-size prime fields, dense univariate
//! polynomials over them, integer utilities, and Chinese remaindering.

mod crt;
mod fp;
mod poly;
pub mod primes;

pub use crt::{crt_lift, explicit_crt_mod, CrtError, ExplicitCrt};
pub use fp::PrimeField;
pub use poly::FpPoly;
