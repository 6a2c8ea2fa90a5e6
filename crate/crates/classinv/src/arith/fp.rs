//! A prime field F_p with a word-size modulus. Elements are canonical
//! representatives in [0, p) stored as bare u64; the field value itself is a
//! small copyable handle threaded through all polynomial arithmetic.

use super::primes::{is_prime_u64, mul_mod, pow_mod};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FieldError {
    #[error("modulus {0} is not an odd prime below 2^63")]
    BadModulus(u64),
}

/// F_p for an odd prime p < 2^63.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self, FieldError> {
        if p < 3 || p >= (1 << 63) || !is_prime_u64(p) {
            return Err(FieldError::BadModulus(p));
        }
        Ok(PrimeField { p })
    }

    /// Construction for modules that have already validated primality.
    pub(crate) fn new_unchecked(p: u64) -> Self {
        debug_assert!(is_prime_u64(p));
        PrimeField { p }
    }

    #[inline]
    pub fn modulus(&self) -> u64 {
        self.p
    }

    #[inline]
    pub fn reduce_u64(&self, a: u64) -> u64 {
        a % self.p
    }

    pub fn reduce_i64(&self, a: i64) -> u64 {
        a.rem_euclid(self.p as i64) as u64
    }

    /// Reduce a signed multi-word value given as (sign, |value| mod p).
    pub fn from_i128(&self, a: i128) -> u64 {
        a.rem_euclid(self.p as i128) as u64
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        mul_mod(a, b, self.p)
    }

    pub fn pow(&self, a: u64, e: u64) -> u64 {
        pow_mod(a, e, self.p)
    }

    pub fn inv(&self, a: u64) -> u64 {
        assert!(a != 0, "inverse of zero in F_{}", self.p);
        // Extended Euclid on signed words.
        let (mut t, mut new_t) = (0i128, 1i128);
        let (mut r, mut new_r) = (self.p as i128, a as i128);
        while new_r != 0 {
            let q = r / new_r;
            (t, new_t) = (new_t, t - q * new_t);
            (r, new_r) = (new_r, r - q * new_r);
        }
        debug_assert_eq!(r, 1);
        t.rem_euclid(self.p as i128) as u64
    }

    /// Legendre symbol as -1, 0, 1.
    pub fn legendre(&self, a: u64) -> i32 {
        if a == 0 {
            return 0;
        }
        let e = self.pow(a, (self.p - 1) / 2);
        if e == 1 {
            1
        } else {
            -1
        }
    }

    /// A square root of a, if one exists (Tonelli-Shanks).
    pub fn sqrt(&self, a: u64) -> Option<u64> {
        let p = self.p;
        if a == 0 {
            return Some(0);
        }
        if self.legendre(a) != 1 {
            return None;
        }
        if p % 4 == 3 {
            return Some(self.pow(a, (p + 1) / 4));
        }
        // Tonelli-Shanks: write p-1 = q*2^s with q odd.
        let s = (p - 1).trailing_zeros();
        let q = (p - 1) >> s;
        let mut z = 2u64;
        while self.legendre(z) != -1 {
            z += 1;
        }
        let mut m = s;
        let mut c = self.pow(z, q);
        let mut t = self.pow(a, q);
        let mut r = self.pow(a, (q + 1) / 2);
        while t != 1 {
            let mut i = 0u32;
            let mut tt = t;
            while tt != 1 {
                tt = self.mul(tt, tt);
                i += 1;
            }
            let b = self.pow(c, 1 << (m - i - 1));
            m = i;
            c = self.mul(b, b);
            t = self.mul(t, c);
            r = self.mul(r, b);
        }
        Some(r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_modulus() {
        assert!(PrimeField::new(1).is_err());
        assert!(PrimeField::new(2).is_err());
        assert!(PrimeField::new(91).is_err());
        assert!(PrimeField::new(23).is_ok());
    }

    #[test]
    fn field_ops() {
        let f = PrimeField::new(101).unwrap();
        for a in 1..101u64 {
            assert_eq!(f.mul(a, f.inv(a)), 1);
        }
        assert_eq!(f.sub(3, 7), 97);
        assert_eq!(f.neg(0), 0);
    }

    #[test]
    fn sqrt_all_residues() {
        for p in [23u64, 29, 101, 65537] {
            let f = PrimeField::new(p).unwrap();
            for a in 0..p.min(500) {
                match f.sqrt(a) {
                    Some(r) => assert_eq!(f.mul(r, r), a),
                    None => assert_eq!(f.legendre(a), -1),
                }
            }
        }
    }
}
