//! Dense univariate polynomials over a word-size prime field.
//!
//! This is the inner loop of the whole pipeline: instantiated modular
//! polynomials live here, and root finding / gcds on them dominate the
//! per-prime cost of the enumeration step.

use super::fp::PrimeField;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Coefficients ascending by degree; the leading coefficient is nonzero
/// unless the polynomial is zero (empty vector).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FpPoly {
    field: PrimeField,
    coeffs: Vec<u64>,
}

impl FpPoly {
    pub fn new(field: PrimeField, mut coeffs: Vec<u64>) -> Self {
        for c in &mut coeffs {
            *c = field.reduce_u64(*c);
        }
        let mut p = FpPoly { field, coeffs };
        p.trim();
        p
    }

    pub fn zero(field: PrimeField) -> Self {
        FpPoly { field, coeffs: Vec::new() }
    }

    pub fn one(field: PrimeField) -> Self {
        FpPoly { field, coeffs: vec![1] }
    }

    pub fn constant(field: PrimeField, c: u64) -> Self {
        Self::new(field, vec![c])
    }

    /// X - r
    pub fn linear_root(field: PrimeField, r: u64) -> Self {
        FpPoly { field, coeffs: vec![field.neg(r), 1] }
    }

    pub fn x(field: PrimeField) -> Self {
        FpPoly { field, coeffs: vec![0, 1] }
    }

    fn trim(&mut self) {
        while self.coeffs.last() == Some(&0) {
            self.coeffs.pop();
        }
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> u64 {
        self.coeffs.get(i).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports degree 0 by convention of len-1
    /// being unusable, so callers must check `is_zero` first where it matters.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading(&self) -> u64 {
        self.coeffs.last().copied().unwrap_or(0)
    }

    pub fn monic(&self) -> FpPoly {
        if self.is_zero() {
            return self.clone();
        }
        let lead = self.leading();
        if lead == 1 {
            return self.clone();
        }
        let inv = self.field.inv(lead);
        self.scale(inv)
    }

    pub fn scale(&self, c: u64) -> FpPoly {
        let f = self.field;
        let mut out: Vec<u64> = self.coeffs.iter().map(|&a| f.mul(a, c)).collect();
        if c == 0 {
            out.clear();
        }
        let mut p = FpPoly { field: f, coeffs: out };
        p.trim();
        p
    }

    pub fn add(&self, other: &FpPoly) -> FpPoly {
        let f = self.field;
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(f.add(self.coeff(i), other.coeff(i)));
        }
        let mut p = FpPoly { field: f, coeffs: out };
        p.trim();
        p
    }

    pub fn sub(&self, other: &FpPoly) -> FpPoly {
        let f = self.field;
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(f.sub(self.coeff(i), other.coeff(i)));
        }
        let mut p = FpPoly { field: f, coeffs: out };
        p.trim();
        p
    }

    pub fn mul(&self, other: &FpPoly) -> FpPoly {
        if self.is_zero() || other.is_zero() {
            return FpPoly::zero(self.field);
        }
        let f = self.field;
        let p = f.modulus() as u128;
        let mut acc = vec![0u128; self.coeffs.len() + other.coeffs.len() - 1];
        // Accumulate in u128 and reduce lazily; p < 2^63 so p^2 < 2^126 and
        // we can add two products before overflow risk, reducing as we go.
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                let cell = &mut acc[i + j];
                *cell += a as u128 * b as u128;
                if *cell >= 1u128 << 126 {
                    *cell %= p;
                }
            }
        }
        let coeffs = acc.into_iter().map(|c| (c % p) as u64).collect();
        let mut out = FpPoly { field: f, coeffs };
        out.trim();
        out
    }

    /// Quotient and remainder by a nonzero divisor.
    pub fn divrem(&self, div: &FpPoly) -> (FpPoly, FpPoly) {
        assert!(!div.is_zero(), "division by zero polynomial");
        let f = self.field;
        if self.coeffs.len() < div.coeffs.len() {
            return (FpPoly::zero(f), self.clone());
        }
        let dlead_inv = f.inv(div.leading());
        let mut rem = self.coeffs.clone();
        let dn = div.coeffs.len();
        let qn = rem.len() - dn + 1;
        let mut quot = vec![0u64; qn];
        for k in (0..qn).rev() {
            let c = f.mul(rem[k + dn - 1], dlead_inv);
            if c == 0 {
                continue;
            }
            quot[k] = c;
            for (i, &d) in div.coeffs.iter().enumerate() {
                rem[k + i] = f.sub(rem[k + i], f.mul(c, d));
            }
        }
        let mut q = FpPoly { field: f, coeffs: quot };
        let mut r = FpPoly { field: f, coeffs: rem };
        q.trim();
        r.trim();
        (q, r)
    }

    pub fn rem(&self, div: &FpPoly) -> FpPoly {
        self.divrem(div).1
    }

    /// Monic gcd; gcd(f, 0) = monic(f).
    pub fn gcd(&self, other: &FpPoly) -> FpPoly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn derivative(&self) -> FpPoly {
        let f = self.field;
        if self.coeffs.len() <= 1 {
            return FpPoly::zero(f);
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| f.mul(c, f.reduce_u64(i as u64)))
            .collect();
        let mut p = FpPoly { field: f, coeffs };
        p.trim();
        p
    }

    pub fn eval(&self, x: u64) -> u64 {
        let f = self.field;
        let mut acc = 0u64;
        for &c in self.coeffs.iter().rev() {
            acc = f.add(f.mul(acc, x), c);
        }
        acc
    }

    /// self^e mod m by square and multiply.
    pub fn pow_mod(&self, mut e: u64, m: &FpPoly) -> FpPoly {
        let mut base = self.rem(m);
        let mut acc = FpPoly::one(self.field);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base).rem(m);
            }
            base = base.mul(&base).rem(m);
            e >>= 1;
        }
        acc
    }

    /// Monic product of (X - r) over the given roots, via a product tree.
    pub fn from_roots(field: PrimeField, roots: &[u64]) -> FpPoly {
        if roots.is_empty() {
            return FpPoly::one(field);
        }
        let mut layer: Vec<FpPoly> = roots
            .iter()
            .map(|&r| FpPoly::linear_root(field, r))
            .collect();
        while layer.len() > 1 {
            let mut next = Vec::with_capacity(layer.len().div_ceil(2));
            let mut it = layer.chunks(2);
            for chunk in &mut it {
                match chunk {
                    [a, b] => next.push(a.mul(b)),
                    [a] => next.push(a.clone()),
                    _ => unreachable!(),
                }
            }
            layer = next;
        }
        layer.pop().unwrap()
    }

    /// All roots in F_p, each with multiplicity 1, sorted ascending.
    /// Deterministic for a fixed seed.
    pub fn roots(&self, seed: u64) -> Vec<u64> {
        assert!(!self.is_zero(), "root finding on the zero polynomial");
        let f = self.field;
        let p = f.modulus();
        if self.degree() == 0 {
            return Vec::new();
        }
        // Small-degree fast paths.
        if self.degree() == 1 {
            let r = f.mul(f.neg(self.coeff(0)), f.inv(self.coeff(1)));
            return vec![r];
        }
        // Split off the product of distinct linear factors:
        // g = gcd(X^p - X, f).
        let monic = self.monic();
        let xp = FpPoly::x(f).pow_mod(p, &monic);
        let xp_minus_x = xp.sub(&FpPoly::x(f));
        let mut g = monic.gcd(&xp_minus_x);
        if g.degree() == 0 {
            return Vec::new();
        }
        // Remove a root at zero up front so random shifts are clean.
        let mut roots = Vec::new();
        if g.coeff(0) == 0 {
            roots.push(0);
            g = g.divrem(&FpPoly::x(f)).0;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_c1a5_5e5e_0001);
        split_linear(&g, &mut rng, &mut roots);
        roots.sort_unstable();
        roots
    }

    /// Quadratic root fast path used by isogeny-thread stepping: roots of a
    /// degree-2 polynomial via the discriminant.
    pub fn quadratic_roots(&self) -> Vec<u64> {
        assert_eq!(self.degree(), 2);
        let f = self.field;
        let a = self.coeff(2);
        let b = self.coeff(1);
        let c = self.coeff(0);
        let disc = f.sub(f.mul(b, b), f.mul(4 % f.modulus(), f.mul(a, c)));
        match f.sqrt(disc) {
            None => Vec::new(),
            Some(s) => {
                let inv2a = f.inv(f.mul(2 % f.modulus(), a));
                let r1 = f.mul(f.sub(s, b), inv2a);
                let r2 = f.mul(f.sub(f.neg(b), s), inv2a);
                let mut v = vec![r1];
                if r2 != r1 {
                    v.push(r2);
                }
                v.sort_unstable();
                v
            }
        }
    }

    /// Resultant of two polynomials via the Euclidean scheme.
    pub fn resultant(&self, other: &FpPoly) -> u64 {
        let f = self.field;
        if self.is_zero() || other.is_zero() {
            return 0;
        }
        let mut a = self.clone();
        let mut b = other.clone();
        let mut res = 1u64;
        loop {
            if b.degree() == 0 {
                return f.mul(res, f.pow(b.coeff(0), a.degree() as u64));
            }
            let r = a.rem(&b);
            if r.is_zero() {
                return 0;
            }
            let s = f.pow(b.leading(), (a.degree() - r.degree()) as u64);
            res = f.mul(res, s);
            if (a.degree() & 1) == 1 && (b.degree() & 1) == 1 {
                res = f.neg(res);
            }
            a = b;
            b = r;
        }
    }
}

/// Equal-degree splitting specialised to products of distinct linear factors.
fn split_linear(g: &FpPoly, rng: &mut ChaCha8Rng, out: &mut Vec<u64>) {
    let f = g.field();
    let p = f.modulus();
    match g.degree() {
        0 => {}
        1 => out.push(f.mul(f.neg(g.coeff(0)), f.inv(g.coeff(1)))),
        2 => out.extend(g.quadratic_roots()),
        _ => {
            // gcd((X + a)^((p-1)/2) - 1, g) splits g for random a.
            loop {
                let a = rng.gen_range(0..p);
                let shifted = FpPoly::new(f, vec![a, 1]);
                let h = shifted.pow_mod((p - 1) / 2, g);
                let h1 = h.sub(&FpPoly::one(f));
                let d = g.gcd(&h1);
                if d.degree() > 0 && d.degree() < g.degree() {
                    let (q, r) = g.divrem(&d);
                    debug_assert!(r.is_zero());
                    split_linear(&d, rng, out);
                    split_linear(&q, rng, out);
                    return;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fp(p: u64) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    #[test]
    fn roots_quadratic_pm_one() {
        // X^2 - 1 over F_7 -> {1, 6}
        let f = fp(7);
        let poly = FpPoly::new(f, vec![6, 0, 1]);
        assert_eq!(poly.roots(0), vec![1, 6]);
    }

    #[test]
    fn roots_cubic_f23() {
        // X^3 - 6 over F_23 -> {8}; exhaustive-scan oracle cross-check.
        let f = fp(23);
        let poly = FpPoly::new(f, vec![23 - 6, 0, 0, 1]);
        let scan: Vec<u64> = (0..23).filter(|&x| poly.eval(x) == 0).collect();
        assert_eq!(scan, vec![8]);
        assert_eq!(poly.roots(1), vec![8]);
        assert_eq!(f.pow(8, 3), 6);
    }

    #[test]
    fn roots_none() {
        // X^2 + 1 over F_7 has no roots: -1 is a non-residue mod 7.
        let f = fp(7);
        let poly = FpPoly::new(f, vec![1, 0, 1]);
        assert!(poly.roots(2).is_empty());
    }

    #[test]
    fn roots_match_exhaustive_scan_random() {
        // Randomised polynomials over small fields: root set equals the
        // exhaustive evaluation set, every multiplicity reported once.
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for &p in &[101u64, 1009, 65537] {
            let f = fp(p);
            for trial in 0..40 {
                let deg = rng.gen_range(1..9);
                let mut coeffs: Vec<u64> = (0..=deg).map(|_| rng.gen_range(0..p)).collect();
                if coeffs[deg] == 0 {
                    coeffs[deg] = 1;
                }
                let poly = FpPoly::new(f, coeffs);
                if poly.is_zero() {
                    continue;
                }
                let mut scan: Vec<u64> = (0..p).filter(|&x| poly.eval(x) == 0).collect();
                scan.sort_unstable();
                assert_eq!(poly.roots(trial), scan, "p={p}");
            }
        }
    }

    #[test]
    fn gcd_cases() {
        let f = fp(7);
        // gcd(X^2-1, X-1) = X-1
        let a = FpPoly::new(f, vec![6, 0, 1]);
        let b = FpPoly::new(f, vec![6, 1]);
        assert_eq!(a.gcd(&b), b.monic());
        // gcd(f, 0) = monic(f)
        let z = FpPoly::zero(f);
        assert_eq!(a.scale(3).gcd(&z), a.monic());
        // shared factor over F_101
        let f101 = fp(101);
        let p1 = FpPoly::from_roots(f101, &[2, 3]);
        let p2 = FpPoly::from_roots(f101, &[3, 4]);
        assert_eq!(p1.gcd(&p2), FpPoly::linear_root(f101, 3));
    }

    #[test]
    fn from_roots_examples() {
        // {1,2} over F_7 -> X^2 + 4X + 2
        let f = fp(7);
        let p = FpPoly::from_roots(f, &[1, 2]);
        assert_eq!(p.coeffs(), &[2, 4, 1]);
        // empty product -> 1
        assert_eq!(FpPoly::from_roots(f, &[]), FpPoly::one(f));
        // {6} over F_23 -> X + 17
        let f23 = fp(23);
        let p = FpPoly::from_roots(f23, &[6]);
        assert_eq!(p.coeffs(), &[17, 1]);
    }

    #[test]
    fn from_roots_then_roots_is_identity() {
        let f = fp(1009);
        let roots = vec![1u64, 5, 17, 101, 999];
        let p = FpPoly::from_roots(f, &roots);
        assert_eq!(p.roots(7), roots);
    }

    #[test]
    fn gcd_divides_both_and_monic() {
        use rand::Rng;
        let f = fp(65537);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..30 {
            let a = FpPoly::new(f, (0..6).map(|_| rng.gen_range(0..65537)).collect());
            let b = FpPoly::new(f, (0..5).map(|_| rng.gen_range(0..65537)).collect());
            if a.is_zero() || b.is_zero() {
                continue;
            }
            let g = a.gcd(&b);
            if g.is_zero() {
                continue;
            }
            assert_eq!(g.leading(), 1);
            assert!(a.rem(&g).is_zero());
            assert!(b.rem(&g).is_zero());
        }
    }

    #[test]
    fn resultant_detects_common_root() {
        let f = fp(101);
        let a = FpPoly::from_roots(f, &[5, 9]);
        let b = FpPoly::from_roots(f, &[9, 30]);
        assert_eq!(a.resultant(&b), 0);
        let c = FpPoly::from_roots(f, &[31, 40]);
        assert_ne!(a.resultant(&c), 0);
    }
}
