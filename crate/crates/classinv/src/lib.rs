//! Hilbert class polynomials and class invariants by the CRT method.
//!
//! The library computes the Hilbert class polynomial `H_D`, and class-invariant
//! polynomials `H_D[f]` for a catalog of modular functions f (Weber functions,
//! eta quotients, Atkin-style functions, Ramanujan's g), one small prime at a
//! time, and reconstructs the integer coefficients by Chinese remaindering (or
//! their reductions modulo a large prime P via the explicit CRT). On top of
//! that sits the CM method: constructing an elliptic curve of prescribed order
//! over a prime field from a root of a class polynomial.
//!
//! Module map:
//! - [`arith`]: word-size prime fields, dense polynomials, root finding, CRT.
//! - [`classgroup`]: binary quadratic forms, class groups, polycyclic presentations.
//! - [`modfunc`]: q-expansions and the three modular-polynomial families.
//! - [`curvefind`]: finding a starting curve with prescribed endomorphism ring.
//! - [`enumerate`]: enumerating Ell_O(F_p) along isogeny threads, gcd corner-squaring.
//! - [`invariants`]: the invariant catalog and per-family starting/extraction rules.
//! - [`crt`]: prime selection, the per-prime pipeline, and coefficient reconstruction.
//! - [`cm`]: end-to-end CM curve construction.

pub mod arith;
pub mod bruteforce;
pub mod classgroup;
pub mod cm;
pub mod crt;
pub mod curvefind;
pub mod enumerate;
pub mod invariants;
pub mod modfunc;
