//! q-expansion arithmetic and the three modular-polynomial families:
//! classical Phi_l, function relations Psi_f, and invariant modular
//! polynomials Phi_{l,f}, plus the interchange file format.

mod bivar;
mod classical;
mod eta;
mod psi;
mod series;

pub use bivar::BivarIntPoly;
pub use classical::{classical_modpoly, DeriveError};
pub use eta::{eta_series, j_series, j_series_fp};
pub use psi::{
    canonical_double_eta_power, canonical_simple_eta_power, derive_invariant_modpoly,
    derive_psi, derive_psi_companion, func_series_fp, psi_degree_bounds, series_denominator,
    FuncId, PairKind,
};
pub use series::{FpSeries, IntSeries};
