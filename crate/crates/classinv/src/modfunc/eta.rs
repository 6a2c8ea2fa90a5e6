//! q-expansions of the basic modular objects: Dedekind eta (without the
//! q^(1/24) prefactor, tracked by the callers symbolically), Eisenstein E4,
//! the discriminant series, and j = E4^3 / Delta.

use super::series::{FpSeries, IntSeries};
use crate::arith::PrimeField;
use num_bigint::BigInt;
use num_traits::{One, Zero};

/// Euler product prod (1 - q^n) to `precision` terms, by the pentagonal
/// number theorem. This is eta with the q^(1/24) factor omitted.
pub fn eta_series(precision: usize) -> IntSeries {
    assert!(precision >= 1);
    let mut coeffs = vec![BigInt::zero(); precision];
    coeffs[0] = BigInt::one();
    let mut k = 1i64;
    loop {
        let e1 = k * (3 * k - 1) / 2;
        let e2 = k * (3 * k + 1) / 2;
        if e1 >= precision as i64 && e2 >= precision as i64 {
            break;
        }
        let sign = if k % 2 == 0 { BigInt::one() } else { -BigInt::one() };
        for e in [e1, e2] {
            if e < precision as i64 {
                coeffs[e as usize] = sign.clone();
            }
        }
        k += 1;
    }
    IntSeries::new(0, coeffs, 1)
}

fn eta_series_fp(field: PrimeField, precision: usize) -> FpSeries {
    let p = field.modulus();
    let mut coeffs = vec![0u64; precision];
    coeffs[0] = 1;
    let mut k = 1i64;
    loop {
        let e1 = k * (3 * k - 1) / 2;
        let e2 = k * (3 * k + 1) / 2;
        if e1 >= precision as i64 && e2 >= precision as i64 {
            break;
        }
        let sign = if k % 2 == 0 { 1 } else { p - 1 };
        for e in [e1, e2] {
            if e < precision as i64 {
                coeffs[e as usize] = sign;
            }
        }
        k += 1;
    }
    FpSeries::new(field, 0, coeffs)
}

/// E4 = 1 + 240 sum sigma_3(n) q^n.
fn e4_fp(field: PrimeField, precision: usize) -> FpSeries {
    let f = field;
    let mut sigma3 = vec![0u64; precision];
    for d in 1..precision as u64 {
        let d3 = f.mul(f.mul(d % f.modulus(), d % f.modulus()), d % f.modulus());
        let mut m = d as usize;
        while m < precision {
            sigma3[m] = f.add(sigma3[m], d3);
            m += d as usize;
        }
    }
    let mut coeffs = vec![0u64; precision];
    coeffs[0] = 1;
    let c240 = f.reduce_u64(240);
    for n in 1..precision {
        coeffs[n] = f.mul(c240, sigma3[n]);
    }
    FpSeries::new(f, 0, coeffs)
}

/// j(q) = q^-1 + 744 + 196884 q + ... known on [-1, precision-1).
pub fn j_series_fp(field: PrimeField, precision: usize) -> FpSeries {
    assert!(precision >= 1);
    // Need E4^3 and Delta/q to `precision` terms.
    let n = precision;
    let eta = eta_series_fp(field, n + 1);
    let eta24 = {
        let e2 = eta.mul_capped(&eta, Some(n as i64 + 1));
        let e4 = e2.mul_capped(&e2, Some(n as i64 + 1));
        let e8 = e4.mul_capped(&e4, Some(n as i64 + 1));
        let e16 = e8.mul_capped(&e8, Some(n as i64 + 1));
        e16.mul_capped(&e8, Some(n as i64 + 1))
    };
    let e4 = e4_fp(field, n + 1);
    let e4_cubed = {
        let s = e4.mul_capped(&e4, Some(n as i64 + 1));
        s.mul_capped(&e4, Some(n as i64 + 1))
    };
    let inv = eta24.inverse(n as i64 + 1);
    let j_shifted = e4_cubed.mul_capped(&inv, Some(n as i64 + 1));
    // j = (E4^3 / (Delta/q)) * q^-1
    j_shifted.shifted(-1).truncated(precision as i64 - 1)
}

/// Exact integer j-series; only used at small precision.
pub fn j_series(precision: usize) -> IntSeries {
    assert!(precision >= 1);
    let n = precision;
    let eta = eta_series(n + 1);
    let eta24 = {
        let e2 = eta.mul(&eta);
        let e4 = e2.mul(&e2);
        let e8 = e4.mul(&e4);
        let e16 = e8.mul(&e8);
        e16.mul(&e8)
    };
    // E4 exactly.
    let mut e4c = vec![BigInt::zero(); n + 1];
    e4c[0] = BigInt::one();
    for d in 1..=(n as u64) {
        let d3 = BigInt::from(d) * BigInt::from(d) * BigInt::from(d) * BigInt::from(240u32);
        let mut m = d as usize;
        while m <= n {
            e4c[m] += &d3;
            m += d as usize;
        }
    }
    let e4 = IntSeries::new(0, e4c, 1);
    let e4_cubed = e4.mul(&e4).mul(&e4);
    // Invert eta24 (constant term 1) exactly.
    let mut inv = vec![BigInt::zero(); n + 1];
    inv[0] = BigInt::one();
    for k in 1..=n {
        let mut s = BigInt::zero();
        for j in 1..=k {
            s += eta24.coeff(j as i64) * &inv[k - j];
        }
        inv[k] = -s;
    }
    let inv = IntSeries::new(0, inv, 1);
    let j = e4_cubed.mul(&inv);
    let coeffs: Vec<BigInt> = (0..precision).map(|i| j.coeff(i as i64).clone()).collect();
    IntSeries::new(-1, coeffs, 1)
}

/// prod (1 - w^(k n)) to the window [0, top): the eta Euler product with
/// exponents scaled by k, over F_p.
pub fn eta_product_fp(field: PrimeField, k: i64, top: i64) -> FpSeries {
    assert!(k >= 1 && top >= 1);
    let n = (top + k - 1) / k;
    eta_series_fp(field, n.max(1) as usize).scale_exponents(k).truncated_min(top)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eta_examples() {
        // 1 - q - q^2 + q^5 + q^7 - q^12 - ...
        let e = eta_series(3);
        assert_eq!(*e.coeff(0), BigInt::from(1));
        assert_eq!(*e.coeff(1), BigInt::from(-1));
        assert_eq!(*e.coeff(2), BigInt::from(-1));
        let e1 = eta_series(1);
        assert_eq!(e1.precision(), 1);
        assert_eq!(*e1.coeff(0), BigInt::from(1));
        // pentagonal exponent for k = -2 gives +1 at q^5
        let e = eta_series(16);
        assert_eq!(*e.coeff(5), BigInt::from(1));
        assert_eq!(*e.coeff(7), BigInt::from(1));
        assert_eq!(*e.coeff(12), BigInt::from(-1));
        assert_eq!(*e.coeff(3), BigInt::from(0));
    }

    #[test]
    fn j_expansion_fixtures() {
        let j = j_series(4);
        assert_eq!(*j.coeff(-1), BigInt::from(1));
        assert_eq!(*j.coeff(0), BigInt::from(744));
        assert_eq!(*j.coeff(1), BigInt::from(196884));
        assert_eq!(*j.coeff(2), BigInt::from(21493760u64));
    }

    #[test]
    fn j_fp_matches_exact() {
        let f = PrimeField::new(1_000_003).unwrap();
        let jf = j_series_fp(f, 12);
        let jz = j_series(12);
        for e in -1..10 {
            let expect = jz.coeff(e);
            let m = BigInt::from(1_000_003u64);
            let r = ((expect % &m) + &m) % &m;
            assert_eq!(BigInt::from(jf.coeff(e)), r, "e={e}");
        }
    }
}
