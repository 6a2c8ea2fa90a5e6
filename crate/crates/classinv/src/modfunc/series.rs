//! Truncated Laurent series: exact integer series (the public interchange
//! type) and word-size modular series (the workhorse behind modular
//! polynomial derivation).
//!
//! A series knows its valuation `val` (lowest stored exponent, possibly
//! negative) and an exclusive upper bound `top` on the exponents it can speak
//! for. Coefficients below `val` are mathematically zero; asking for a
//! coefficient at or above `top` is a precision bug and panics.

use crate::arith::PrimeField;
use num_bigint::BigInt;
use num_traits::Zero;

/// Exact integer Laurent series in w = q^(1/denominator_exponent).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntSeries {
    val: i64,
    coeffs: Vec<BigInt>,
    denominator_exponent: u32,
}

impl IntSeries {
    pub fn new(val: i64, coeffs: Vec<BigInt>, denominator_exponent: u32) -> Self {
        assert!(denominator_exponent >= 1);
        IntSeries { val, coeffs, denominator_exponent }
    }

    /// Lowest stored exponent (in units of the fractional variable).
    pub fn valuation(&self) -> i64 {
        self.val
    }

    /// Number of known terms.
    pub fn precision(&self) -> usize {
        self.coeffs.len()
    }

    /// d such that the series variable is q^(1/d).
    pub fn denominator_exponent(&self) -> u32 {
        self.denominator_exponent
    }

    fn top(&self) -> i64 {
        self.val + self.coeffs.len() as i64
    }

    pub fn coeff(&self, exp: i64) -> &BigInt {
        assert!(
            exp < self.top(),
            "coefficient of exponent {exp} beyond series precision (top {})",
            self.top()
        );
        static ZERO: std::sync::OnceLock<BigInt> = std::sync::OnceLock::new();
        if exp < self.val {
            ZERO.get_or_init(BigInt::zero)
        } else {
            &self.coeffs[(exp - self.val) as usize]
        }
    }

    pub fn mul(&self, other: &IntSeries) -> IntSeries {
        assert_eq!(self.denominator_exponent, other.denominator_exponent);
        let val = self.val + other.val;
        let top = (self.top() + other.val).min(other.top() + self.val);
        assert!(top > val, "product has no known terms");
        let mut out = vec![BigInt::zero(); (top - val) as usize];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let ei = self.val + i as i64;
            for (j, b) in other.coeffs.iter().enumerate() {
                let e = ei + other.val + j as i64;
                if e >= top {
                    break;
                }
                out[(e - val) as usize] += a * b;
            }
        }
        IntSeries { val, coeffs: out, denominator_exponent: self.denominator_exponent }
    }

    pub fn add(&self, other: &IntSeries) -> IntSeries {
        assert_eq!(self.denominator_exponent, other.denominator_exponent);
        let val = self.val.min(other.val);
        let top = self.top().min(other.top());
        assert!(top > val);
        let mut out = vec![BigInt::zero(); (top - val) as usize];
        for e in val..top {
            let mut c = BigInt::zero();
            if e >= self.val && e < self.top() {
                c += self.coeff(e);
            }
            if e >= other.val && e < other.top() {
                c += other.coeff(e);
            }
            out[(e - val) as usize] = c;
        }
        IntSeries { val, coeffs: out, denominator_exponent: self.denominator_exponent }
    }

    /// Reduce each coefficient into F_p.
    pub fn reduce_mod(&self, field: PrimeField) -> FpSeries {
        let p = BigInt::from(field.modulus());
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| {
                let r = c % &p;
                let r = if r < BigInt::zero() { r + &p } else { r };
                let digits = r.to_u64_digits().1;
                digits.first().copied().unwrap_or(0)
            })
            .collect();
        FpSeries { field, val: self.val, coeffs }
    }
}

/// Laurent series with coefficients in a word-size prime field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FpSeries {
    pub(crate) field: PrimeField,
    pub(crate) val: i64,
    pub(crate) coeffs: Vec<u64>,
}

impl FpSeries {
    pub fn new(field: PrimeField, val: i64, coeffs: Vec<u64>) -> Self {
        FpSeries { field, val, coeffs }
    }

    pub fn zero_window(field: PrimeField, val: i64, top: i64) -> Self {
        FpSeries { field, val, coeffs: vec![0; (top - val).max(0) as usize] }
    }

    pub fn val(&self) -> i64 {
        self.val
    }

    pub fn top(&self) -> i64 {
        self.val + self.coeffs.len() as i64
    }

    #[inline]
    pub fn coeff(&self, exp: i64) -> u64 {
        debug_assert!(exp < self.top(), "exponent {exp} >= top {}", self.top());
        if exp < self.val {
            0
        } else {
            self.coeffs[(exp - self.val) as usize]
        }
    }

    /// Drop leading zero coefficients (raising the valuation) without
    /// changing the represented series.
    pub fn normalized(mut self) -> Self {
        while !self.coeffs.is_empty() && self.coeffs[0] == 0 {
            self.coeffs.remove(0);
            self.val += 1;
        }
        self
    }

    /// Truncate to exponents < new_top.
    pub fn truncated(&self, new_top: i64) -> FpSeries {
        assert!(new_top <= self.top(), "cannot extend precision by truncation");
        let len = (new_top - self.val).max(0) as usize;
        FpSeries { field: self.field, val: self.val, coeffs: self.coeffs[..len].to_vec() }
    }

    /// Substitute w -> w^k (exponent scaling). Exponents that are not
    /// multiples of k are genuinely zero, so the scaled window extends to
    /// top * k.
    pub fn scale_exponents(&self, k: i64) -> FpSeries {
        assert!(k >= 1);
        let val = self.val * k;
        let top = self.top() * k;
        let mut coeffs = vec![0u64; (top - val) as usize];
        for (i, &c) in self.coeffs.iter().enumerate() {
            coeffs[i * k as usize] = c;
        }
        FpSeries { field: self.field, val, coeffs }
    }

    /// Shift exponents by s (multiply by w^s).
    pub fn shifted(&self, s: i64) -> FpSeries {
        FpSeries { field: self.field, val: self.val + s, coeffs: self.coeffs.clone() }
    }

    pub fn add(&self, other: &FpSeries) -> FpSeries {
        let f = self.field;
        let val = self.val.min(other.val);
        let top = self.top().min(other.top());
        let mut coeffs = vec![0u64; (top - val).max(0) as usize];
        for (idx, c) in coeffs.iter_mut().enumerate() {
            let e = val + idx as i64;
            let a = if e >= self.val { self.coeff(e) } else { 0 };
            let b = if e >= other.val { other.coeff(e) } else { 0 };
            *c = f.add(a, b);
        }
        FpSeries { field: f, val, coeffs }
    }

    pub fn sub(&self, other: &FpSeries) -> FpSeries {
        let f = self.field;
        let val = self.val.min(other.val);
        let top = self.top().min(other.top());
        let mut coeffs = vec![0u64; (top - val).max(0) as usize];
        for (idx, c) in coeffs.iter_mut().enumerate() {
            let e = val + idx as i64;
            let a = if e >= self.val { self.coeff(e) } else { 0 };
            let b = if e >= other.val { other.coeff(e) } else { 0 };
            *c = f.sub(a, b);
        }
        FpSeries { field: f, val, coeffs }
    }

    pub fn scaled(&self, c: u64) -> FpSeries {
        let f = self.field;
        FpSeries {
            field: f,
            val: self.val,
            coeffs: self.coeffs.iter().map(|&a| f.mul(a, c)).collect(),
        }
    }

    /// Product, valid on the provable window; optionally capped at `cap_top`.
    pub fn mul_capped(&self, other: &FpSeries, cap_top: Option<i64>) -> FpSeries {
        let f = self.field;
        let p = f.modulus() as u128;
        let val = self.val + other.val;
        let mut top = (self.top() + other.val).min(other.top() + self.val);
        if let Some(cap) = cap_top {
            top = top.min(cap);
        }
        assert!(top > val, "product has empty window");
        let mut acc = vec![0u128; (top - val) as usize];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            let ei = self.val + i as i64 + other.val;
            if ei >= top {
                break;
            }
            let jmax = ((top - ei) as usize).min(other.coeffs.len());
            for (j, &b) in other.coeffs[..jmax].iter().enumerate() {
                let cell = &mut acc[(ei - val) as usize + j];
                *cell += a as u128 * b as u128;
                if *cell >= 1u128 << 126 {
                    *cell %= p;
                }
            }
        }
        let coeffs = acc.into_iter().map(|c| (c % p) as u64).collect();
        FpSeries { field: f, val, coeffs }
    }

    pub fn mul(&self, other: &FpSeries) -> FpSeries {
        self.mul_capped(other, None)
    }

    /// Inverse of a series with valuation 0 and unit constant term, to the
    /// given exclusive top.
    pub fn inverse(&self, top: i64) -> FpSeries {
        assert_eq!(self.val, 0, "inverse needs valuation 0");
        assert!(top <= self.top());
        let f = self.field;
        let c0_inv = f.inv(self.coeff(0));
        let n = top as usize;
        let mut inv = vec![0u64; n];
        inv[0] = c0_inv;
        for k in 1..n {
            let mut s = 0u64;
            let jmax = k.min(self.coeffs.len() - 1);
            for j in 1..=jmax {
                s = f.add(s, f.mul(self.coeffs[j], inv[k - j]));
            }
            inv[k] = f.neg(f.mul(s, c0_inv));
        }
        FpSeries { field: f, val: 0, coeffs: inv }
    }

    /// self^e with every intermediate capped at cap_top; the provable window
    /// still shrinks with negative valuations, callers must feed enough base
    /// precision.
    pub fn pow_capped(&self, e: u32, cap_top: i64) -> FpSeries {
        assert!(e >= 1);
        let mut acc = self.truncated_min(cap_top);
        for _ in 1..e {
            acc = acc.mul_capped(self, Some(cap_top));
        }
        acc
    }

    pub fn truncated_min(&self, new_top: i64) -> FpSeries {
        if new_top >= self.top() {
            self.clone()
        } else {
            self.truncated(new_top)
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fp(p: u64) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    #[test]
    fn mul_windows() {
        let f = fp(101);
        // (w^-1 + 1) * (w^-1 + 2) = w^-2 + 3w^-1 + 2
        let a = FpSeries::new(f, -1, vec![1, 1, 0, 0]);
        let b = FpSeries::new(f, -1, vec![1, 2, 0, 0]);
        let c = a.mul(&b);
        assert_eq!(c.val(), -2);
        assert_eq!(c.coeff(-2), 1);
        assert_eq!(c.coeff(-1), 3);
        assert_eq!(c.coeff(0), 2);
        // window: a known to top 3, b to top 3 => product to 3 + (-1) = 2
        assert_eq!(c.top(), 2);
    }

    #[test]
    fn inverse_roundtrip() {
        let f = fp(65537);
        let a = FpSeries::new(f, 0, vec![1, 5, 7, 11, 13, 17, 19, 23]);
        let inv = a.inverse(8);
        let prod = a.mul(&inv);
        assert_eq!(prod.coeff(0), 1);
        for e in 1..prod.top() {
            assert_eq!(prod.coeff(e), 0, "e={e}");
        }
    }

    #[test]
    fn int_series_ops() {
        let one = BigInt::from(1);
        let a = IntSeries::new(-1, vec![one.clone(), BigInt::from(2), BigInt::from(3)], 1);
        let b = a.mul(&a);
        assert_eq!(*b.coeff(-2), BigInt::from(1));
        assert_eq!(*b.coeff(-1), BigInt::from(4));
        assert_eq!(*b.coeff(0), BigInt::from(10));
    }

    #[test]
    #[should_panic(expected = "beyond series precision")]
    fn precision_violation_panics() {
        let a = IntSeries::new(0, vec![BigInt::from(1)], 1);
        let _ = a.coeff(5);
    }
}

impl FpSeries {
    /// Mutable coefficient access for builders.
    pub fn coeffs_mut(&mut self) -> &mut [u64] {
        &mut self.coeffs
    }
}
