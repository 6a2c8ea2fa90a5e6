//! Imaginary quadratic orders: discriminants, reduced binary quadratic forms,
//! Gauss composition, class numbers, and polycyclic presentations of the
//! class group.

mod form;
mod presentation;

pub use form::{principal_form, prime_form, reduced_forms, QuadForm};
pub use presentation::{
    build_presentation, build_presentation_mod_subgroup, find_auxiliary_prime,
    ClassGroupPresentation,
};

use crate::arith::primes::{factor_u64, kronecker, primes_below};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ClassGroupError {
    #[error("invalid discriminant {0}: must be negative and 0 or 1 mod 4")]
    BadDiscriminant(i64),
    #[error("discriminant magnitude {0} exceeds the supported range")]
    TooLarge(i64),
    #[error("form ({0}, {1}, {2}) is not positive definite or not primitive")]
    BadForm(i64, i64, i64),
    #[error("discriminant mismatch between forms")]
    DiscriminantMismatch,
    #[error("prime {0} divides the conductor")]
    DividesConductor(u64),
    #[error("form does not belong to this class group")]
    ForeignForm,
    #[error("auxiliary prime search exhausted (bound {0})")]
    AuxiliaryExhausted(u64),
    #[error("relative order must be at least 3 for an auxiliary ideal")]
    RelativeOrderTooSmall,
}

/// A negative discriminant D = u^2 * D0 with D0 fundamental.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Discriminant {
    d: i64,
    d0: i64,
    u: i64,
}

impl Discriminant {
    pub fn new(d: i64) -> Result<Self, ClassGroupError> {
        if d >= 0 || !matches!(d.rem_euclid(4), 0 | 1) {
            return Err(ClassGroupError::BadDiscriminant(d));
        }
        if d < -(1i64 << 58) {
            return Err(ClassGroupError::TooLarge(d));
        }
        // Split |d| = s * f^2 with s squarefree.
        let mut s = 1i64;
        let mut f = 1i64;
        for (p, e) in factor_u64((-d) as u64) {
            let p = p as i64;
            if e % 2 == 1 {
                s *= p;
            }
            f *= p.pow(e / 2);
        }
        let (d0, u) = if (-s).rem_euclid(4) == 1 {
            (-s, f)
        } else {
            debug_assert_eq!(f % 2, 0, "d = 0,1 mod 4 forces an even square part here");
            (-4 * s, f / 2)
        };
        Ok(Discriminant { d, d0, u })
    }

    #[inline]
    pub fn d(&self) -> i64 {
        self.d
    }

    /// The fundamental discriminant D0.
    pub fn fundamental(&self) -> i64 {
        self.d0
    }

    /// The conductor u with D = u^2 D0.
    pub fn conductor(&self) -> i64 {
        self.u
    }

    pub fn is_fundamental(&self) -> bool {
        self.u == 1
    }

    pub fn abs(&self) -> u64 {
        (-self.d) as u64
    }
}

/// Exact class number by counting reduced primitive forms; switches to the
/// analytic estimate + subgroup-growth determination for very large |D|.
pub fn class_number(disc: Discriminant) -> u64 {
    if disc.abs() <= ENUMERATION_BOUND {
        count_reduced_forms(disc.d())
    } else {
        presentation::class_number_large(disc)
    }
}

pub(crate) const ENUMERATION_BOUND: u64 = 100_000_000;

/// Count reduced primitive forms of discriminant d without materialising them.
pub(crate) fn count_reduced_forms(d: i64) -> u64 {
    let mut count = 0u64;
    let abs_d = (-d) as i64;
    let mut a = 1i64;
    while 3 * a * a <= abs_d {
        let parity = d.rem_euclid(2);
        let mut b = -a + 1;
        if b.rem_euclid(2) != parity {
            b += 1;
        }
        while b <= a {
            let t = (b as i128 * b as i128 - d as i128) as i64;
            if t % (4 * a) == 0 {
                let c = t / (4 * a);
                if c >= a
                    && gcd3(a, b, c) == 1
                    && !((b.abs() == a || a == c) && b < 0)
                {
                    count += 1;
                }
            }
            b += 2;
        }
        a += 1;
    }
    count
}

pub(crate) fn gcd3(a: i64, b: i64, c: i64) -> i64 {
    fn gcd(mut a: i64, mut b: i64) -> i64 {
        a = a.abs();
        b = b.abs();
        while b != 0 {
            let t = a % b;
            a = b;
            b = t;
        }
        a
    }
    gcd(gcd(a, b), c)
}

/// Truncated Euler-product estimate of h(D).
pub(crate) fn class_number_estimate(disc: Discriminant) -> f64 {
    let d = disc.d();
    let mut l_value = 1.0f64;
    for p in primes_below(1 << 18) {
        let chi = kronecker(d, p as i64) as f64;
        l_value *= 1.0 / (1.0 - chi / p as f64);
    }
    let w = match d {
        -3 => 6.0,
        -4 => 4.0,
        _ => 2.0,
    };
    w * (disc.abs() as f64).sqrt() * l_value / (2.0 * std::f64::consts::PI)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn discriminant_parts() {
        let d = Discriminant::new(-23).unwrap();
        assert!(d.is_fundamental());
        let d = Discriminant::new(-12).unwrap();
        assert_eq!(d.fundamental(), -3);
        assert_eq!(d.conductor(), 2);
        let d = Discriminant::new(-63).unwrap(); // -63 = 9 * -7
        assert_eq!(d.fundamental(), -7);
        assert_eq!(d.conductor(), 3);
        assert!(Discriminant::new(-5).is_err());
        assert!(Discriminant::new(4).is_err());
    }

    #[test]
    fn class_numbers_small() {
        for (d, h) in [(-3, 1), (-4, 1), (-7, 1), (-8, 1), (-11, 1), (-15, 2), (-23, 3), (-47, 5), (-71, 7), (-95, 8)] {
            let disc = Discriminant::new(d).unwrap();
            assert_eq!(class_number(disc), h, "D={d}");
        }
    }

    #[test]
    fn estimate_tracks_exact() {
        for d in [-10007i64, -399999, -999983] {
            let d = if d.rem_euclid(4) <= 1 { d } else { d - 1 };
            let disc = match Discriminant::new(d) {
                Ok(x) => x,
                Err(_) => continue,
            };
            let exact = count_reduced_forms(d) as f64;
            let est = class_number_estimate(disc);
            assert!((est / exact - 1.0).abs() < 0.1, "D={d} exact={exact} est={est}");
        }
    }
}
