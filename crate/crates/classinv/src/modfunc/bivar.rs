//! Sparse bivariate integer polynomials: the container for the classical
//! modular polynomials Phi_l in Z[J, J_l], the function relations
//! Psi_f in Z[F, J], and the invariant modular polynomials Phi_{l,f}.

use crate::arith::{FpPoly, PrimeField};
use num_bigint::BigInt;
use num_traits::Zero;
use std::collections::BTreeMap;

/// Monomial map (i, k) -> coefficient of F^i * J^k (or X^i * Y^k); no zero
/// entries are stored.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BivarIntPoly {
    coeffs: BTreeMap<(u32, u32), BigInt>,
}

impl BivarIntPoly {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, i: u32, k: u32, c: BigInt) {
        if c.is_zero() {
            self.coeffs.remove(&(i, k));
        } else {
            self.coeffs.insert((i, k), c);
        }
    }

    pub fn get(&self, i: u32, k: u32) -> BigInt {
        self.coeffs.get(&(i, k)).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32), &BigInt)> {
        self.coeffs.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.coeffs.len()
    }

    pub fn deg_f(&self) -> u32 {
        self.coeffs.keys().map(|&(i, _)| i).max().unwrap_or(0)
    }

    pub fn deg_j(&self) -> u32 {
        self.coeffs.keys().map(|&(_, k)| k).max().unwrap_or(0)
    }

    pub fn is_symmetric(&self) -> bool {
        self.coeffs.iter().all(|(&(i, k), c)| self.get(k, i) == *c)
    }

    /// Substitute the second variable by a field element: Phi(X, y) as a
    /// univariate polynomial in X over F_p.
    pub fn instantiate(&self, y: u64, field: PrimeField) -> FpPoly {
        let degf = self.deg_f() as usize;
        let degj = self.deg_j() as usize;
        // Powers of y.
        let mut ypow = Vec::with_capacity(degj + 1);
        ypow.push(1u64);
        for _ in 0..degj {
            ypow.push(field.mul(*ypow.last().unwrap(), y));
        }
        let p = BigInt::from(field.modulus());
        let mut out = vec![0u64; degf + 1];
        for (&(i, k), c) in &self.coeffs {
            let r = c % &p;
            let r = if r < BigInt::zero() { r + &p } else { r };
            let cv = r.to_u64_digits().1.first().copied().unwrap_or(0);
            out[i as usize] = field.add(out[i as usize], field.mul(cv, ypow[k as usize]));
        }
        FpPoly::new(field, out)
    }

    /// Substitute the first variable instead: Phi(x, Y) as a polynomial in Y.
    pub fn instantiate_first(&self, x: u64, field: PrimeField) -> FpPoly {
        let mut sw = BivarIntPoly::new();
        for (&(i, k), c) in &self.coeffs {
            sw.set(k, i, c.clone());
        }
        sw.instantiate(x, field)
    }

    /// Evaluate at a point pair.
    pub fn eval_point(&self, x: u64, y: u64, field: PrimeField) -> u64 {
        self.instantiate(y, field).eval(x)
    }

    /// Largest coefficient magnitude in bits (the height, up to rounding).
    pub fn height_bits(&self) -> u64 {
        self.coeffs.values().map(|c| c.magnitude().bits()).max().unwrap_or(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn instantiate_and_eval() {
        // F^2*J - 3F + J^2 + 7 at (2, 5) over F_101: 4*5 - 6 + 25 + 7 = 46
        let mut p = BivarIntPoly::new();
        p.set(2, 1, BigInt::from(1));
        p.set(1, 0, BigInt::from(-3));
        p.set(0, 2, BigInt::from(1));
        p.set(0, 0, BigInt::from(7));
        let f = PrimeField::new(101).unwrap();
        assert_eq!(p.eval_point(2, 5, f), 46);
        let uni = p.instantiate(5, f);
        assert_eq!(uni.coeffs(), &[32, 98, 5]);
    }

    #[test]
    fn zero_coefficients_dropped() {
        let mut p = BivarIntPoly::new();
        p.set(1, 1, BigInt::from(4));
        p.set(1, 1, BigInt::zero());
        assert_eq!(p.num_terms(), 0);
    }
}
