//! Derivation of the classical modular polynomial Phi_l in Z[J, J_l].
//!
//! Phi_l(X, j(z)) = prod (X - s_i(z)) over the l+1 conjugate functions
//! s = j(lz), j((z+c)/l). Their power sums have integer q-expansions:
//! p_k = j(lz)^k + l * (U_l j^k), with U_l picking every l-th coefficient.
//! Each p_k is a polynomial in j (pole order lk), recovered by greedy
//! pole-order reduction against powers of the j-series; Newton's identities
//! then produce the elementary symmetric polynomials e_k in Z[j], which are
//! the J-coefficients of Phi_l. All of this runs modulo word-size primes and
//! the integer coefficients are CRT-lifted and re-verified against the
//! functional equation at higher precision.

use super::bivar::BivarIntPoly;
use super::eta::j_series_fp;
use super::series::FpSeries;
use crate::arith::primes::next_prime;
use crate::arith::{crt_lift, PrimeField};
use num_bigint::BigInt;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DeriveError {
    #[error("modular polynomial derivation did not stabilise")]
    NoConvergence,
    #[error("functional-equation verification failed ({0})")]
    VerifyFailed(String),
    #[error("level {0} exceeds the configured bound {1}")]
    LevelTooLarge(u64, u64),
    #[error("internal precision bug: {0}")]
    Precision(String),
}

/// Guard terms checked above q^0 during the per-prime solve.
const GUARD: i64 = 8;

/// First solver prime; the schedule is deterministic so derived files are
/// byte-identical across runs.
pub(crate) const SOLVER_PRIME_BASE: u64 = (1 << 45) + 1;

pub fn classical_modpoly(ell: u64, bound: u64) -> Result<BivarIntPoly, DeriveError> {
    if ell > bound {
        return Err(DeriveError::LevelTooLarge(ell, bound));
    }
    assert!(crate::arith::primes::is_prime_u64(ell), "level must be prime");
    let mut prime = SOLVER_PRIME_BASE;
    let mut residues: Vec<(Vec<Vec<u64>>, u64)> = Vec::new();
    let mut last_lift: Option<BivarIntPoly> = None;
    for _round in 0..100 {
        for _ in 0..4 {
            prime = next_prime(prime);
            let field = PrimeField::new(prime).expect("solver prime");
            residues.push((elementary_symmetric_mod_p(ell, field)?, prime));
        }
        let lifted = lift(ell, &residues);
        if last_lift.as_ref() == Some(&lifted) {
            verify(ell, &lifted)?;
            return Ok(lifted);
        }
        last_lift = Some(lifted);
    }
    Err(DeriveError::NoConvergence)
}

/// The coefficients e_k (as j-polynomials, ascending degree, k = 1..l+1) of
/// Phi_l(X, j) = X^{l+1} + sum_k (-1)^k e_k(j) X^{l+1-k}, modulo p.
fn elementary_symmetric_mod_p(ell: u64, field: PrimeField) -> Result<Vec<Vec<u64>>, DeriveError> {
    let l = ell as i64;
    let deg = l + 1;
    let f = field;
    let max_pole = (l * deg) as usize;

    // j to enough terms for U_l(j^k) on [-k, GUARD): exponents up to l*GUARD,
    // plus one mult erosion per power.
    let u_need = (l * GUARD + deg + 4) as usize;
    let j_small = j_series_fp(f, u_need + 2);

    // Power sums p_k as series on [-lk, GUARD).
    let mut pk_series: Vec<FpSeries> = Vec::with_capacity(deg as usize);
    {
        let mut jk = j_small.clone();
        for k in 1..=deg {
            if k > 1 {
                jk = jk.mul_capped(&j_small, Some(l * GUARD + 4));
            }
            // j(q^l)^k = scale(j^k truncated to [-k, GUARD/l + 1))
            let jlk = jk.truncated_min(GUARD / l + 2).scale_exponents(l);
            let ul = u_operator(&jk, l, GUARD);
            let pk = jlk.truncated_min(GUARD).add(&ul.scaled(f.reduce_u64(ell)));
            pk_series.push(pk);
        }
    }

    // Powers of j on [-d, GUARD), shared by all greedy reductions.
    let jpows = j_power_table(f, max_pole, GUARD);

    // p_k as j-polynomials.
    let mut psums: Vec<Vec<u64>> = Vec::with_capacity(deg as usize + 1);
    psums.push(vec![f.reduce_u64(ell + 1)]); // p_0 = l + 1 (unused by Newton)
    for (k, pk) in pk_series.iter().enumerate() {
        let poly = reduce_to_j_polynomial(pk, &jpows, (l * (k as i64 + 1)) as usize, f)?;
        psums.push(poly);
    }

    // Newton: k e_k = sum_{i=1..k} (-1)^(i-1) e_{k-i} p_i.
    let mut es: Vec<Vec<u64>> = Vec::with_capacity(deg as usize + 1);
    es.push(vec![1]);
    for k in 1..=deg as usize {
        let mut acc: Vec<u64> = Vec::new();
        for i in 1..=k {
            let mut term = poly_mul(&es[k - i], &psums[i], f);
            if i % 2 == 0 {
                for c in &mut term {
                    *c = f.neg(*c);
                }
            }
            acc = poly_add(&acc, &term, f);
        }
        let kinv = f.inv(f.reduce_u64(k as u64));
        let mut ek: Vec<u64> = acc.iter().map(|&c| f.mul(c, kinv)).collect();
        while ek.last() == Some(&0) {
            ek.pop();
        }
        if ek.len() as i64 > deg + 1 {
            return Err(DeriveError::Precision(format!(
                "e_{k} has j-degree {} > {}",
                ek.len() - 1,
                deg
            )));
        }
        es.push(ek);
    }
    Ok(es.into_iter().skip(1).collect())
}

/// U_l operator: picks coefficients at exponents divisible by l; result
/// window [floor(val/l), top).
fn u_operator(s: &FpSeries, l: i64, top: i64) -> FpSeries {
    let lo = s.val().div_euclid(l);
    let mut coeffs = Vec::with_capacity((top - lo).max(0) as usize);
    for n in lo..top {
        let e = n * l;
        let c = if e >= s.val() && e < s.top() { s.coeff(e) } else { 0 };
        coeffs.push(c);
    }
    FpSeries::new(s.field, lo, coeffs)
}

/// Powers of j on windows [-d, guard + (max_pole - d)), built incrementally.
/// Each level loses one top term to the chain, so the start is wide enough
/// that every row still covers the guard window.
fn j_power_table(f: PrimeField, max_pole: usize, guard: i64) -> Vec<FpSeries> {
    let top0 = guard + max_pole as i64 + 1;
    let j = j_series_fp(f, (top0 + 4) as usize);
    let mut table = Vec::with_capacity(max_pole + 1);
    let mut one = vec![0u64; top0 as usize];
    one[0] = 1;
    table.push(FpSeries::new(f, 0, one));
    for d in 1..=max_pole {
        let next = table[d - 1].mul_capped(&j, None);
        debug_assert_eq!(next.val(), -(d as i64));
        debug_assert!(next.top() >= guard, "power table window eroded below guard");
        table.push(next);
    }
    table
}

/// Express a series with pole order <= max_pole as a polynomial in j by
/// greedy pole elimination; the guard terms of the remainder must vanish.
fn reduce_to_j_polynomial(
    s: &FpSeries,
    jpows: &[FpSeries],
    max_pole: usize,
    f: PrimeField,
) -> Result<Vec<u64>, DeriveError> {
    let _ = f;
    let mut rem = s.truncated_min(GUARD).normalized();
    let mut poly = vec![0u64; max_pole + 1];
    while !rem.is_zero() && rem.val() <= 0 {
        let v = rem.val();
        let d = (-v) as usize;
        if d > max_pole {
            return Err(DeriveError::Precision(format!(
                "pole order {d} exceeds expected {max_pole}"
            )));
        }
        let c = rem.coeff(v);
        poly[d] = c;
        rem = rem.sub(&jpows[d].scaled(c)).normalized();
        if rem.val() <= v && !rem.is_zero() {
            return Err(DeriveError::Precision("greedy reduction stalled".into()));
        }
    }
    if !rem.is_zero() {
        return Err(DeriveError::Precision(
            "nonzero guard coefficients after reduction".into(),
        ));
    }
    while poly.last() == Some(&0) && poly.len() > 1 {
        poly.pop();
    }
    Ok(poly)
}

pub(crate) fn poly_mul(a: &[u64], b: &[u64], f: PrimeField) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let p = f.modulus() as u128;
    let mut acc = vec![0u128; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            let cell = &mut acc[i + j];
            *cell += x as u128 * y as u128;
            if *cell >= 1u128 << 126 {
                *cell %= p;
            }
        }
    }
    acc.into_iter().map(|c| (c % p) as u64).collect()
}

fn poly_add(a: &[u64], b: &[u64], f: PrimeField) -> Vec<u64> {
    let n = a.len().max(b.len());
    (0..n)
        .map(|i| f.add(a.get(i).copied().unwrap_or(0), b.get(i).copied().unwrap_or(0)))
        .collect()
}

fn lift(ell: u64, residues: &[(Vec<Vec<u64>>, u64)]) -> BivarIntPoly {
    let deg = (ell + 1) as usize;
    let mut out = BivarIntPoly::new();
    out.set(deg as u32, 0, BigInt::from(1));
    for k in 1..=deg {
        let max_jdeg = residues.iter().map(|(es, _)| es[k - 1].len()).max().unwrap_or(0);
        for d in 0..max_jdeg {
            let rs: Vec<(u64, u64)> = residues
                .iter()
                .map(|(es, p)| (es[k - 1].get(d).copied().unwrap_or(0), *p))
                .collect();
            let mut c = crt_lift(&rs).expect("distinct solver primes");
            if k % 2 == 1 {
                c = -c;
            }
            out.set((deg - k) as u32, d as u32, c);
        }
    }
    out
}

/// Re-verify Phi_l(j(q^l), j(q)) = 0 at 1.5x the nominal solving precision
/// modulo a fresh prime, plus symmetry and monicity.
fn verify(ell: u64, phi: &BivarIntPoly) -> Result<(), DeriveError> {
    if !phi.is_symmetric() {
        return Err(DeriveError::VerifyFailed(format!("Phi_{ell} not symmetric")));
    }
    if phi.get(ell as u32 + 1, 0) != BigInt::from(1) {
        return Err(DeriveError::VerifyFailed(format!("Phi_{ell} not monic")));
    }
    let nominal = ((ell + 2) * (ell + 2) + 32) as i64;
    let target = nominal + nominal / 2;
    let mut vp = SOLVER_PRIME_BASE - 2;
    while !crate::arith::primes::is_prime_u64(vp) {
        vp -= 2;
    }
    let f = PrimeField::new(vp).expect("verify prime");
    if functional_residue(phi, ell, f, target).is_zero() {
        Ok(())
    } else {
        Err(DeriveError::VerifyFailed(format!(
            "Phi_{ell}(j(q^l), j(q)) != 0"
        )))
    }
}

/// The series Phi(j(q^l), j(q)) mod p, on a window of length >= target above
/// its (nominal) valuation; zero iff the functional equation holds there.
pub(crate) fn functional_residue(
    phi: &BivarIntPoly,
    ell: u64,
    f: PrimeField,
    target: i64,
) -> FpSeries {
    let l = ell as i64;
    let degf = phi.deg_f();
    let degj = phi.deg_j();
    // Horner in X = j(q^l) erodes l per step; building Y-powers erodes 1 per
    // step. Pad the cap accordingly.
    let cap = target + l * (degf as i64 + 1) + degj as i64 + 4;
    let j = j_series_fp(f, (cap + degj as i64 + 6) as usize);
    let jl = j
        .truncated_min(cap / l + l + 4)
        .scale_exponents(l);
    // Y-power table capped.
    let mut ypow: Vec<FpSeries> = Vec::with_capacity(degj as usize + 1);
    let mut one = FpSeries::zero_window(f, 0, cap);
    one.coeffs[0] = 1;
    ypow.push(one);
    for k in 1..=degj as usize {
        ypow.push(ypow[k - 1].mul_capped(&j, Some(cap)));
    }
    // Group coefficients by X-power.
    let p = BigInt::from(f.modulus());
    let mut acc = FpSeries::zero_window(f, 0, cap);
    for i in (0..=degf).rev() {
        if i < degf {
            acc = jl.mul_capped(&acc, Some(cap));
        }
        for (&(fi, k), c) in phi.terms() {
            if fi != i {
                continue;
            }
            let r = c % &p;
            let r = if r < BigInt::from(0) { r + &p } else { r };
            let cv = r.to_u64_digits().1.first().copied().unwrap_or(0);
            acc = acc.add(&ypow[k as usize].scaled(cv));
        }
    }
    assert!(
        acc.top() - acc.val() >= target,
        "verification window shrank below target"
    );
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phi2_known_coefficients() {
        let phi = classical_modpoly(2, 61).unwrap();
        assert_eq!(phi.get(3, 0), BigInt::from(1));
        assert_eq!(phi.get(0, 3), BigInt::from(1));
        assert_eq!(phi.get(2, 2), BigInt::from(-1));
        assert_eq!(phi.get(2, 1), BigInt::from(1488));
        assert_eq!(phi.get(2, 0), BigInt::from(-162000i64));
        assert_eq!(phi.get(1, 1), BigInt::from(40773375i64));
        assert_eq!(phi.get(1, 0), BigInt::from(8748000000i64));
        assert_eq!(phi.get(0, 0), BigInt::from(-157464000000000i64));
        assert!(phi.is_symmetric());
    }

    #[test]
    fn phi2_cm_point() {
        // j=0 is 2-isogenous to j=54000.
        let phi = classical_modpoly(2, 61).unwrap();
        let f = PrimeField::new(1_000_003).unwrap();
        assert_eq!(phi.eval_point(0, 54000, f), 0);
    }

    #[test]
    fn phi_3_5_symmetric_monic() {
        for ell in [3u64, 5] {
            let phi = classical_modpoly(ell, 61).unwrap();
            assert!(phi.is_symmetric(), "l={ell}");
            assert_eq!(phi.get(ell as u32 + 1, 0), BigInt::from(1));
            assert_eq!(phi.deg_f(), ell as u32 + 1);
            assert_eq!(phi.deg_j(), ell as u32 + 1);
        }
    }

    #[test]
    fn elementary_symmetric_l3_known_row() {
        // e1 row of Phi_3: Y^3 - 2232 Y^2 + 1069956 Y - 36864000.
        let p = next_prime(SOLVER_PRIME_BASE);
        let f = PrimeField::new(p).unwrap();
        let es = elementary_symmetric_mod_p(3, f).unwrap();
        let expect: Vec<u64> = [-36864000i64, 1069956, -2232, 1]
            .iter()
            .map(|&c| f.reduce_i64(c))
            .collect();
        assert_eq!(es[0], expect);
    }

    #[test]
    fn level_bound_respected() {
        assert!(matches!(
            classical_modpoly(67, 61),
            Err(DeriveError::LevelTooLarge(67, 61))
        ));
    }
}

