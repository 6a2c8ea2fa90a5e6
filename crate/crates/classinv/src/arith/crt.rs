//! Chinese remaindering: symmetric-range lifting to Z, and the explicit CRT
//! that reduces straight into [0, P) without materialising the lifted integer
//! per coefficient.

use super::primes::{gcd_u64, mul_mod};
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CrtError {
    #[error("moduli are not pairwise coprime: gcd({0}, {1}) > 1")]
    NotCoprime(u64, u64),
    #[error("empty residue list")]
    Empty,
}

/// Lift residues to the unique integer in the symmetric range (-M/2, M/2],
/// M the product of the moduli.
pub fn crt_lift(residues: &[(u64, u64)]) -> Result<BigInt, CrtError> {
    if residues.is_empty() {
        return Err(CrtError::Empty);
    }
    for (i, &(_, m)) in residues.iter().enumerate() {
        for &(_, m2) in &residues[i + 1..] {
            if gcd_u64(m, m2) != 1 {
                return Err(CrtError::NotCoprime(m, m2));
            }
        }
    }
    let mut acc = BigInt::from(residues[0].0 % residues[0].1);
    let mut modulus = BigInt::from(residues[0].1);
    for &(r, m) in &residues[1..] {
        // acc' = acc + modulus * t, t = (r - acc) / modulus mod m
        let acc_mod_m = acc.mod_floor(&BigInt::from(m)).to_u64().unwrap();
        let diff = (r % m + m - acc_mod_m % m) % m;
        let mod_inv = inv_mod_u64(modulus.mod_floor(&BigInt::from(m)).to_u64().unwrap(), m);
        let t = mul_mod(diff, mod_inv, m);
        acc += &modulus * BigInt::from(t);
        modulus *= BigInt::from(m);
    }
    // Symmetric range.
    let half = &modulus >> 1;
    if acc > half {
        acc -= &modulus;
    }
    Ok(acc)
}

fn inv_mod_u64(a: u64, m: u64) -> u64 {
    let (mut t, mut new_t) = (0i128, 1i128);
    let (mut r, mut new_r) = (m as i128, (a % m) as i128);
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    assert_eq!(r, 1, "non-invertible element in CRT");
    t.rem_euclid(m as i128) as u64
}

/// Precomputed data for reducing many coefficients over a fixed prime set
/// modulo a fixed target P (Bernstein-style explicit CRT).
///
/// For residues r_i define a_i = r_i * (M/m_i)^{-1} mod m_i. Then the lifted
/// value is sum(a_i * M/m_i) - k*M with k = round(sum(a_i / m_i)), and we
/// evaluate that expression directly modulo P. The fractional sum is tracked
/// in 64-bit fixed point, which is exact enough as long as the lifted value
/// stays well inside (-M/2, M/2] — guaranteed by the overshoot prime the
/// scheduler always adds.
#[derive(Debug, Clone)]
pub struct ExplicitCrt {
    moduli: Vec<u64>,
    /// (M/m_i)^{-1} mod m_i
    weight: Vec<u64>,
    /// (M/m_i) mod P
    cofactor_mod_p: Vec<BigUint>,
    m_mod_p: BigUint,
    p: BigUint,
}

impl ExplicitCrt {
    pub fn new(moduli: &[u64], target: &BigUint) -> Result<Self, CrtError> {
        if moduli.is_empty() {
            return Err(CrtError::Empty);
        }
        for (i, &m) in moduli.iter().enumerate() {
            for &m2 in &moduli[i + 1..] {
                if gcd_u64(m, m2) != 1 {
                    return Err(CrtError::NotCoprime(m, m2));
                }
            }
        }
        let mut m_full = BigUint::one();
        for &m in moduli {
            m_full *= BigUint::from(m);
        }
        let mut weight = Vec::with_capacity(moduli.len());
        let mut cofactor_mod_p = Vec::with_capacity(moduli.len());
        for &m in moduli {
            let cof = &m_full / BigUint::from(m);
            let cof_mod_m = (&cof % BigUint::from(m)).to_u64().unwrap();
            if gcd_u64(cof_mod_m % m, m) != 1 {
                return Err(CrtError::NotCoprime(m, m));
            }
            weight.push(inv_mod_u64(cof_mod_m, m));
            cofactor_mod_p.push(&cof % target);
        }
        Ok(ExplicitCrt {
            moduli: moduli.to_vec(),
            weight,
            cofactor_mod_p,
            m_mod_p: &m_full % target,
            p: target.clone(),
        })
    }

    /// Reduce one coefficient, given its residues in the same order as the
    /// moduli passed to `new`.
    pub fn reduce(&self, residues: &[u64]) -> BigUint {
        assert_eq!(residues.len(), self.moduli.len());
        let mut acc = BigUint::zero();
        // Fixed-point accumulator for sum(a_i / m_i) with 64 fraction bits.
        // Each term is < 2^64, so the u128 sum cannot overflow for any
        // realistic number of primes.
        let mut frac: u128 = 0;
        for i in 0..residues.len() {
            let m = self.moduli[i];
            let a = mul_mod(residues[i] % m, self.weight[i], m);
            acc += &self.cofactor_mod_p[i] * BigUint::from(a);
            frac += ((a as u128) << 64) / m as u128;
        }
        // Round to the nearest integer.
        let k = (frac >> 64) + ((frac >> 63) & 1);
        let k_big = BigUint::from(k) % &self.p;
        let sub = (&self.m_mod_p * k_big) % &self.p;
        let acc = acc % &self.p;
        if acc >= sub {
            (acc - sub) % &self.p
        } else {
            (acc + &self.p - sub) % &self.p
        }
    }
}

/// One-shot explicit CRT: equals `crt_lift(residues) mod P`.
pub fn explicit_crt_mod(residues: &[(u64, u64)], target: &BigUint) -> Result<BigUint, CrtError> {
    let moduli: Vec<u64> = residues.iter().map(|&(_, m)| m).collect();
    let values: Vec<u64> = residues.iter().map(|&(r, _)| r).collect();
    let crt = ExplicitCrt::new(&moduli, target)?;
    Ok(crt.reduce(&values))
}

/// Helper: a signed integer reduced into [0, P).
pub fn bigint_mod(value: &BigInt, target: &BigUint) -> BigUint {
    let p = BigInt::from(target.clone());
    let mut v = value.mod_floor(&p);
    if v.is_negative() {
        v += &p;
    }
    v.to_biguint().unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lift_examples() {
        // (2 mod 5, 3 mod 7) -> 17, verified by scanning 0..34.
        let mut expected = None;
        for x in 0..35i64 {
            if x % 5 == 2 && x % 7 == 3 {
                expected = Some(x);
                break;
            }
        }
        assert_eq!(expected, Some(17));
        assert_eq!(crt_lift(&[(2, 5), (3, 7)]).unwrap(), BigInt::from(17));
        // zero residues
        assert_eq!(crt_lift(&[(0, 5), (0, 7)]).unwrap(), BigInt::from(0));
        // -1 mod each lifts to -1 in the symmetric range
        assert_eq!(crt_lift(&[(4, 5), (6, 7)]).unwrap(), BigInt::from(-1));
    }

    #[test]
    fn lift_rejects_common_factor() {
        assert!(crt_lift(&[(1, 6), (2, 9)]).is_err());
    }

    #[test]
    fn explicit_mod_examples() {
        // (2 mod 5, 3 mod 7), P=11 -> 17 mod 11 = 6
        let p11 = BigUint::from(11u32);
        assert_eq!(explicit_crt_mod(&[(2, 5), (3, 7)], &p11).unwrap(), BigUint::from(6u32));
        // single residue, P = p
        let p5 = BigUint::from(5u32);
        assert_eq!(explicit_crt_mod(&[(3, 5)], &p5).unwrap(), BigUint::from(3u32));
        // (4 mod 5, 6 mod 7), P=13 -> -1 mod 13 = 12
        let p13 = BigUint::from(13u32);
        assert_eq!(explicit_crt_mod(&[(4, 5), (6, 7)], &p13).unwrap(), BigUint::from(12u32));
    }

    #[test]
    fn explicit_matches_lift_randomised() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        let moduli = [10007u64, 10009, 10037, 10039, 10061, 10067];
        for _ in 0..50 {
            let residues: Vec<(u64, u64)> =
                moduli.iter().map(|&m| (rng.gen_range(0..m), m)).collect();
            let lifted = crt_lift(&residues).unwrap();
            for pbits in [64u64, 128, 200] {
                let target = {
                    let mut t = BigUint::one() << pbits;
                    t += BigUint::from(rng.gen_range(1u64..1000) * 2 + 1);
                    while !crate::arith::primes::is_prime_big(&t, 20) {
                        t += BigUint::from(2u32);
                    }
                    t
                };
                let direct = explicit_crt_mod(&residues, &target).unwrap();
                assert_eq!(direct, bigint_mod(&lifted, &target));
            }
        }
    }
}
