//! Binary quadratic forms (a, b, c) of negative discriminant: reduction,
//! Gauss composition, and prime forms. Forms are the concrete representation
//! of ideal classes throughout the crate, with the convention that
//! (A, B, .) corresponds to the ideal (A, (-B + sqrt(D))/2).

use super::{gcd3, ClassGroupError, Discriminant};
use crate::arith::primes::kronecker;
use crate::arith::PrimeField;

/// A primitive positive-definite binary quadratic form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QuadForm {
    a: i64,
    b: i64,
    c: i64,
}

impl QuadForm {
    pub fn new(a: i64, b: i64, c: i64) -> Result<Self, ClassGroupError> {
        let disc = b as i128 * b as i128 - 4 * a as i128 * c as i128;
        if a <= 0 || disc >= 0 {
            return Err(ClassGroupError::BadForm(a, b, c));
        }
        if gcd3(a, b, c) != 1 {
            return Err(ClassGroupError::BadForm(a, b, c));
        }
        Ok(QuadForm { a, b, c })
    }

    pub fn a(&self) -> i64 {
        self.a
    }

    pub fn b(&self) -> i64 {
        self.b
    }

    pub fn c(&self) -> i64 {
        self.c
    }

    pub fn discriminant(&self) -> i64 {
        (self.b as i128 * self.b as i128 - 4 * self.a as i128 * self.c as i128) as i64
    }

    pub fn is_reduced(&self) -> bool {
        let (a, b, c) = (self.a, self.b, self.c);
        b.abs() <= a && a <= c && !((b.abs() == a || a == c) && b < 0)
    }

    /// The unique reduced form equivalent to this one (Gauss reduction).
    pub fn reduce(&self) -> QuadForm {
        let (mut a, mut b, mut c) = (self.a as i128, self.b as i128, self.c as i128);
        loop {
            // Normalise b into (-a, a].
            if b > a || b <= -a {
                let r = (b + a).rem_euclid(2 * a) - a; // r in (-a, a]
                let q = (b - r) / (2 * a);
                c -= q * b - q * q * a;
                b = r;
            }
            if a > c {
                // (a, b, c) -> (c, -b, a)
                std::mem::swap(&mut a, &mut c);
                b = -b;
                continue;
            }
            break;
        }
        if (b < 0 && (-b == a || a == c)) || b == -a {
            b = -b;
        }
        QuadForm { a: a as i64, b: b as i64, c: c as i64 }
    }

    /// The inverse class.
    pub fn inverse(&self) -> QuadForm {
        QuadForm { a: self.a, b: -self.b, c: self.c }.reduce()
    }

    pub fn is_principal(&self) -> bool {
        let r = self.reduce();
        r.a == 1
    }

    /// Gauss composition; returns the reduced composite.
    pub fn compose(&self, other: &QuadForm) -> Result<QuadForm, ClassGroupError> {
        if self.discriminant() != other.discriminant() {
            return Err(ClassGroupError::DiscriminantMismatch);
        }
        let d = self.discriminant() as i128;
        let (a1, b1, _c1) = (self.a as i128, self.b as i128, self.c as i128);
        let (a2, b2, _c2) = (other.a as i128, other.b as i128, other.c as i128);
        let s = (b1 + b2) / 2;
        let n = (b1 - b2) / 2;
        // g = u*a1 + v*a2 + w*s
        let (g1, u1, v1) = ext_gcd(a1, a2);
        let (g, x, w) = ext_gcd(g1, s);
        let (_u, v) = (u1 * x, v1 * x);
        let a3 = a1 / g * (a2 / g);
        // B = b2 + 2*(a2/g) * (v*n - w*c2)  mod 2*a3  ... using c2 of `other`;
        // the symmetric formula with (v*n - w*c2) composes [self][other].
        let inner = v * n - w * other.c as i128;
        let mut b3 = b2 + 2 * (a2 / g) * inner;
        let two_a3 = 2 * a3;
        b3 = b3.rem_euclid(two_a3);
        if b3 > a3 {
            b3 -= two_a3;
        }
        let c3 = (b3 * b3 - d) / (4 * a3);
        let raw = QuadForm {
            a: i64::try_from(a3).map_err(|_| ClassGroupError::TooLarge(0))?,
            b: i64::try_from(b3).map_err(|_| ClassGroupError::TooLarge(0))?,
            c: i64::try_from(c3).map_err(|_| ClassGroupError::TooLarge(0))?,
        };
        Ok(raw.reduce())
    }

    /// Square-and-multiply powering in the class group (negative exponents
    /// use the inverse class).
    pub fn pow(&self, e: i64) -> Result<QuadForm, ClassGroupError> {
        let d = self.discriminant();
        let base = if e < 0 { self.inverse() } else { *self };
        let mut e = e.unsigned_abs();
        let mut acc = principal_form(d);
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.compose(&sq)?;
            }
            e >>= 1;
            if e > 0 {
                sq = sq.compose(&sq)?;
            }
        }
        Ok(acc)
    }
}

fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut old_r, mut r) = (a, b);
    let (mut old_s, mut s) = (1i128, 0i128);
    let (mut old_t, mut t) = (0i128, 1i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
        (old_t, t) = (t, old_t - q * t);
    }
    if old_r < 0 {
        (-old_r, -old_s, -old_t)
    } else {
        (old_r, old_s, old_t)
    }
}

/// The identity class: (1, 0, |D|/4) or (1, 1, (1+|D|)/4).
pub fn principal_form(d: i64) -> QuadForm {
    if d.rem_euclid(4) == 0 {
        QuadForm { a: 1, b: 0, c: -d / 4 }
    } else {
        QuadForm { a: 1, b: 1, c: (1 - d) / 4 }
    }
}

/// The form (l, B, .) with B >= 0 minimal, when l is not inert; None when
/// inert. Errors when l divides the conductor.
pub fn prime_form(disc: Discriminant, ell: u64) -> Result<Option<QuadForm>, ClassGroupError> {
    let d = disc.d();
    if disc.conductor() % ell as i64 == 0 {
        return Err(ClassGroupError::DividesConductor(ell));
    }
    if kronecker(d, ell as i64) == -1 {
        return Ok(None);
    }
    let l = ell as i64;
    let b = if ell == 2 {
        match d.rem_euclid(8) {
            1 => 1,
            0 => 0,
            4 => 2,
            _ => return Ok(None), // 5 mod 8: inert (already caught above)
        }
    } else {
        // Square root of D mod l, parity-adjusted.
        let b0 = if d.rem_euclid(l) == 0 {
            0
        } else {
            let f = PrimeField::new(ell).expect("odd prime");
            f.sqrt(d.rem_euclid(l) as u64).expect("split prime has a root") as i64
        };
        // Exactly one of b0, l - b0 has the parity of D (l odd).
        let parity = d.rem_euclid(2);
        let cands = [b0, l - b0];
        *cands
            .iter()
            .filter(|&&b| b.rem_euclid(2) == parity)
            .min()
            .expect("one candidate matches parity")
    };
    let c = ((b as i128 * b as i128 - d as i128) / (4 * l as i128)) as i64;
    let form = QuadForm::new(l, b, c)?;
    Ok(Some(form))
}

/// All reduced primitive forms of discriminant d, ascending by (a, b).
pub fn reduced_forms(d: i64) -> Vec<QuadForm> {
    let mut out = Vec::new();
    let abs_d = -d;
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
                if c >= a && gcd3(a, b, c) == 1 && !((b.abs() == a || a == c) && b < 0) {
                    out.push(QuadForm { a, b, c });
                }
            }
            b += 2;
        }
        a += 1;
    }
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn disc(d: i64) -> Discriminant {
        Discriminant::new(d).unwrap()
    }

    #[test]
    fn reduce_examples() {
        // already reduced
        let f = QuadForm::new(1, 1, 6).unwrap();
        assert_eq!(f.reduce(), f);
        // one swap step: (3,1,2) -> (2,-1,3)
        let f = QuadForm::new(3, 1, 2).unwrap();
        assert_eq!(f.reduce(), QuadForm::new(2, -1, 3).unwrap());
        // principal form of D=-4
        let f = QuadForm::new(1, 0, 1).unwrap();
        assert_eq!(f.reduce(), f);
    }

    #[test]
    fn compose_identity_and_inverse() {
        let d = -23;
        let id = principal_form(d);
        let f = QuadForm::new(2, 1, 3).unwrap();
        assert_eq!(id.compose(&f).unwrap(), f.reduce());
        assert_eq!(f.compose(&f.inverse()).unwrap(), id);
        // (2,1,3)^2 = (2,-1,3) in the order-3 group of D=-23
        assert_eq!(f.compose(&f).unwrap(), QuadForm::new(2, -1, 3).unwrap());
    }

    #[test]
    fn prime_form_examples() {
        assert_eq!(
            prime_form(disc(-23), 2).unwrap(),
            Some(QuadForm::new(2, 1, 3).unwrap())
        );
        assert_eq!(prime_form(disc(-7), 5).unwrap(), None);
        assert_eq!(
            prime_form(disc(-15), 3).unwrap(),
            Some(QuadForm::new(3, 3, 2).unwrap())
        );
        assert!(matches!(
            prime_form(disc(-12), 2),
            Err(ClassGroupError::DividesConductor(2))
        ));
    }

    #[test]
    fn reduced_forms_d23() {
        let forms = reduced_forms(-23);
        assert_eq!(
            forms,
            vec![
                QuadForm::new(1, 1, 6).unwrap(),
                QuadForm::new(2, -1, 3).unwrap(),
                QuadForm::new(2, 1, 3).unwrap(),
            ]
        );
    }

    #[test]
    fn group_laws_exhaustive_small() {
        // Composition is commutative/associative on classes, each class has
        // order dividing h, for every valid |D| < 300 (and spot checks of the
        // full 5000 range are exercised in the slower proptest suite).
        for d in (-300i64..-3).filter(|d| matches!(d.rem_euclid(4), 0 | 1)) {
            let forms = reduced_forms(d);
            let h = forms.len() as i64;
            let id = principal_form(d);
            for f in &forms {
                assert_eq!(f.pow(h).unwrap(), id, "order divides h, D={d}");
                for g in &forms {
                    assert_eq!(f.compose(g).unwrap(), g.compose(f).unwrap());
                    for k in &forms {
                        let left = f.compose(g).unwrap().compose(k).unwrap();
                        let right = f.compose(&g.compose(k).unwrap()).unwrap();
                        assert_eq!(left, right, "associativity D={d}");
                    }
                }
            }
        }
    }
}
