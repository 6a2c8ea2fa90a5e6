//! Polycyclic presentations of the class group: generators of prime norm
//! with relative orders and power relations, plus the full discrete-log
//! table used for membership tests and exponent-vector lookups.

use super::form::{principal_form, prime_form, QuadForm};
use super::{class_number, class_number_estimate, ClassGroupError, Discriminant, ENUMERATION_BOUND};
use crate::arith::primes::{factor_u64, is_prime_u64, kronecker};
use std::collections::{BTreeSet, HashMap};

/// Safety factor on the truncated Euler product when |D| is too large to
/// count reduced forms directly.
const ESTIMATE_WINDOW: f64 = 1.30;

#[derive(Debug, Clone)]
pub struct ClassGroupPresentation {
    disc: Discriminant,
    order: u64,
    gens: Vec<QuadForm>,
    norms: Vec<u64>,
    rel_orders: Vec<u64>,
    /// relation[k] has length k: [l_k^{r_k}] = prod_{i<k} [l_i^{x_i}].
    relations: Vec<Vec<u32>>,
    /// Absolute order of each generator class in the presented group.
    orders: Vec<u64>,
    dl_table: HashMap<QuadForm, Vec<u32>>,
    /// Classes quotiented out; contains just the principal form for a
    /// presentation of the full group.
    subgroup: Vec<QuadForm>,
}

impl ClassGroupPresentation {
    pub fn disc(&self) -> Discriminant {
        self.disc
    }

    /// The order of the presented group: h(D), or h(D)/|S| for a quotient.
    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn num_gens(&self) -> usize {
        self.gens.len()
    }

    pub fn generator(&self, k: usize) -> QuadForm {
        self.gens[k]
    }

    pub fn norm(&self, k: usize) -> u64 {
        self.norms[k]
    }

    pub fn norms(&self) -> &[u64] {
        &self.norms
    }

    pub fn rel_order(&self, k: usize) -> u64 {
        self.rel_orders[k]
    }

    pub fn rel_orders(&self) -> &[u64] {
        &self.rel_orders
    }

    pub fn relation(&self, k: usize) -> &[u32] {
        &self.relations[k]
    }

    /// Absolute order n_k of [l_k]; r_k divides n_k.
    pub fn absolute_order(&self, k: usize) -> u64 {
        self.orders[k]
    }

    pub fn subgroup(&self) -> &[QuadForm] {
        &self.subgroup
    }

    /// Canonical class representative: the least reduced translate under the
    /// quotient subgroup.
    pub fn canonical_class(&self, f: &QuadForm) -> QuadForm {
        let mut best = f.reduce();
        for s in &self.subgroup[1..] {
            let t = f.compose(s).expect("same discriminant").reduce();
            if t < best {
                best = t;
            }
        }
        best
    }

    pub fn is_identity_class(&self, f: &QuadForm) -> bool {
        self.dl(f).map(|v| v.iter().all(|&e| e == 0)).unwrap_or(false)
    }

    /// The unique exponent vector of the class of f.
    pub fn dl(&self, f: &QuadForm) -> Result<Vec<u32>, ClassGroupError> {
        if f.discriminant() != self.disc.d() {
            return Err(ClassGroupError::DiscriminantMismatch);
        }
        self.dl_table
            .get(&self.canonical_class(f))
            .cloned()
            .ok_or(ClassGroupError::ForeignForm)
    }

    /// prod_k gens[k]^{e[k]}, reduced.
    pub fn evaluate(&self, e: &[u32]) -> QuadForm {
        let mut acc = principal_form(self.disc.d());
        for (k, &ek) in e.iter().enumerate() {
            if ek > 0 {
                acc = acc
                    .compose(&self.gens[k].pow(ek as i64).expect("pow"))
                    .expect("same discriminant");
            }
        }
        acc
    }

    /// Canonicalise a vector of non-negative exponents using the power
    /// relations, top level first.
    pub fn reduce_exponents(&self, e: &[i64]) -> Vec<u32> {
        assert_eq!(e.len(), self.gens.len());
        assert!(e.iter().all(|&x| x >= 0), "exponents must be non-negative");
        self.reduce_exponents_with(e, &self.relations)
    }

    /// Same canonicalisation against caller-supplied relation vectors (the
    /// enumeration grid uses sign-twisted relations).
    pub fn reduce_exponents_with(&self, e: &[i64], relations: &[Vec<u32>]) -> Vec<u32> {
        let m = self.gens.len();
        let mut acc: Vec<i128> = e.iter().map(|&x| x as i128).collect();
        for k in (0..m).rev() {
            let r = self.rel_orders[k] as i128;
            if acc[k] >= r {
                let q = acc[k] / r;
                acc[k] %= r;
                for (i, &x) in relations[k].iter().enumerate() {
                    acc[i] += q * x as i128;
                }
            }
        }
        acc.into_iter().map(|x| x as u32).collect()
    }

    /// All exponent vectors in mixed-radix order (e_m outermost), mainly for
    /// tests; the grid has its own indexing.
    pub fn exponent_vectors(&self) -> impl Iterator<Item = Vec<u32>> + '_ {
        let radices: Vec<u64> = self.rel_orders.clone();
        let total: u64 = radices.iter().product();
        (0..total).map(move |mut i| {
            let mut v = vec![0u32; radices.len()];
            for (k, &r) in radices.iter().enumerate() {
                v[k] = (i % r) as u32;
                i /= r;
            }
            v
        })
    }
}

/// Build a presentation of Cl(O) with generator norms avoiding `forbidden`
/// (and always avoiding primes dividing the conductor).
pub fn build_presentation(
    disc: Discriminant,
    forbidden: &BTreeSet<u64>,
) -> Result<ClassGroupPresentation, ClassGroupError> {
    build_with(disc, forbidden, vec![principal_form(disc.d())])
}

/// Build a presentation of Cl(O)/<subgroup>; `subgroup` lists the classes of
/// the subgroup to quotient by (e.g. {1, [n]} for square-root mode).
pub fn build_presentation_mod_subgroup(
    disc: Discriminant,
    forbidden: &BTreeSet<u64>,
    subgroup: &[QuadForm],
) -> Result<ClassGroupPresentation, ClassGroupError> {
    let mut classes: Vec<QuadForm> = subgroup.iter().map(|f| f.reduce()).collect();
    let id = principal_form(disc.d());
    if !classes.contains(&id) {
        classes.push(id);
    }
    classes.sort();
    classes.dedup();
    build_with(disc, forbidden, classes)
}

fn build_with(
    disc: Discriminant,
    forbidden: &BTreeSet<u64>,
    subgroup: Vec<QuadForm>,
) -> Result<ClassGroupPresentation, ClassGroupError> {
    let (target, upper_bound) = if disc.abs() <= ENUMERATION_BOUND {
        let h = class_number(disc);
        assert_eq!(
            h % subgroup.len() as u64,
            0,
            "subgroup size must divide the class number"
        );
        let t = h / subgroup.len() as u64;
        (Some(t), t as f64)
    } else {
        (None, class_number_estimate(disc) * ESTIMATE_WINDOW / subgroup.len() as f64)
    };

    let mut p = ClassGroupPresentation {
        disc,
        order: 1,
        gens: Vec::new(),
        norms: Vec::new(),
        rel_orders: Vec::new(),
        relations: Vec::new(),
        orders: Vec::new(),
        dl_table: HashMap::new(),
        subgroup,
    };
    p.dl_table.insert(p.canonical_class(&principal_form(disc.d())), Vec::new());

    let done = |order: u64| match target {
        Some(t) => order == t,
        None => 2.0 * order as f64 > upper_bound,
    };

    let mut ell = 1u64;
    while !done(p.order) {
        ell = next_eligible_prime(disc, ell, forbidden);
        let gen = match prime_form(disc, ell)? {
            Some(f) => f,
            None => continue,
        };
        // Relative order: least r > 0 with gen^r in the current subgroup.
        let mut pow = gen;
        let mut r = 1u64;
        while !p.dl_table.contains_key(&p.canonical_class(&pow)) {
            pow = pow.compose(&gen)?;
            r += 1;
        }
        if r == 1 {
            continue;
        }
        let relation = p.dl_table[&p.canonical_class(&pow)].clone();
        // Extend the table layer by layer.
        let base: Vec<(QuadForm, Vec<u32>)> = p
            .dl_table
            .iter()
            .map(|(f, v)| (*f, v.clone()))
            .collect();
        let k = p.gens.len();
        let mut layer = base;
        for e in 1..r {
            let mut next = Vec::with_capacity(layer.len());
            for (f, v) in &layer {
                let nf = p.canonical_class(&f.compose(&gen)?);
                let mut nv = v.clone();
                while nv.len() < k {
                    nv.push(0);
                }
                if nv.len() == k {
                    nv.push(e as u32);
                } else {
                    nv[k] = e as u32;
                }
                p.dl_table.insert(nf, nv.clone());
                next.push((nf, nv));
            }
            layer = next;
        }
        p.gens.push(gen);
        p.norms.push(ell);
        p.rel_orders.push(r);
        p.relations.push(relation);
        p.order *= r;
    }

    // Pad all vectors to full length.
    let m = p.gens.len();
    for v in p.dl_table.values_mut() {
        while v.len() < m {
            v.push(0);
        }
    }
    for rel in p.relations.iter_mut() {
        // relation[k] keeps length k (only lower slots).
        let _ = rel;
    }
    // Absolute orders via the factorisation of the group order.
    let group_order = p.order;
    for k in 0..m {
        p.orders.push(element_order(&p, p.gens[k], group_order));
    }
    Ok(p)
}

fn element_order(p: &ClassGroupPresentation, f: QuadForm, group_order: u64) -> u64 {
    let id = p.canonical_class(&principal_form(p.disc.d()));
    let mut n = group_order;
    for (q, e) in factor_u64(group_order) {
        for _ in 0..e {
            if n % q == 0 {
                let cand = f.pow((n / q) as i64).expect("pow");
                if p.canonical_class(&cand) == id {
                    n /= q;
                } else {
                    break;
                }
            }
        }
    }
    n
}

fn next_eligible_prime(disc: Discriminant, after: u64, forbidden: &BTreeSet<u64>) -> u64 {
    let mut ell = after;
    loop {
        ell += 1;
        while !is_prime_u64(ell) {
            ell += 1;
        }
        if forbidden.contains(&ell) {
            continue;
        }
        if disc.conductor() % ell as i64 == 0 {
            continue;
        }
        if kronecker(disc.d(), ell as i64) == -1 {
            continue;
        }
        return ell;
    }
}

/// Class number for |D| beyond the direct-count bound: grow a subgroup until
/// its order is forced to be the whole group by the analytic estimate.
pub(crate) fn class_number_large(disc: Discriminant) -> u64 {
    build_with(disc, &BTreeSet::new(), vec![principal_form(disc.d())])
        .map(|p| p.order())
        .expect("presentation build")
}

/// Smallest auxiliary prime (not a generator norm, not forbidden) whose class
/// lies in <l_1..l_{k+1}> \ <l_1..l_k> (0-based k), with its exponent vector.
pub fn find_auxiliary_prime(
    p: &ClassGroupPresentation,
    k: usize,
    forbidden: &BTreeSet<u64>,
) -> Result<(u64, Vec<u32>), ClassGroupError> {
    if p.rel_order(k) < 3 {
        return Err(ClassGroupError::RelativeOrderTooSmall);
    }
    let bound = aux_search_bound(p.disc());
    find_auxiliary_with(p, forbidden, bound, |v| {
        v[k] != 0 && v[k + 1..].iter().all(|&e| e == 0)
    })
}

/// Generic auxiliary-prime scan: smallest eligible prime whose class's
/// exponent vector satisfies `pred`.
pub fn find_auxiliary_with<F: Fn(&[u32]) -> bool>(
    p: &ClassGroupPresentation,
    forbidden: &BTreeSet<u64>,
    bound: u64,
    pred: F,
) -> Result<(u64, Vec<u32>), ClassGroupError> {
    let disc = p.disc();
    let mut ell = 1u64;
    loop {
        ell = next_eligible_prime(disc, ell, forbidden);
        if ell > bound {
            return Err(ClassGroupError::AuxiliaryExhausted(bound));
        }
        if p.norms().contains(&ell) {
            continue;
        }
        let form = match prime_form(disc, ell)? {
            Some(f) => f,
            None => continue,
        };
        let v = p.dl(&form)?;
        if pred(&v) {
            return Ok((ell, v));
        }
    }
}

pub fn aux_search_bound(disc: Discriminant) -> u64 {
    let log_d = (disc.abs() as f64).ln();
    (1000.0f64).max(50.0 * log_d * log_d) as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn disc(d: i64) -> Discriminant {
        Discriminant::new(d).unwrap()
    }

    fn empty() -> BTreeSet<u64> {
        BTreeSet::new()
    }

    #[test]
    fn presentation_d23() {
        let p = build_presentation(disc(-23), &empty()).unwrap();
        assert_eq!(p.order(), 3);
        assert_eq!(p.norms(), &[2]);
        assert_eq!(p.rel_orders(), &[3]);
        assert_eq!(p.relation(0), &[] as &[u32]);
    }

    #[test]
    fn presentation_trivial_group() {
        let p = build_presentation(disc(-4), &empty()).unwrap();
        assert_eq!(p.order(), 1);
        assert_eq!(p.num_gens(), 0);
    }

    #[test]
    fn dl_examples_d23() {
        let p = build_presentation(disc(-23), &empty()).unwrap();
        let id = principal_form(-23);
        assert_eq!(p.dl(&id).unwrap(), vec![0]);
        let g = QuadForm::new(2, 1, 3).unwrap();
        assert_eq!(p.dl(&g).unwrap(), vec![1]);
        let ginv = QuadForm::new(2, -1, 3).unwrap();
        assert_eq!(p.dl(&ginv).unwrap(), vec![2]);
    }

    #[test]
    fn reduce_exponents_d23() {
        let p = build_presentation(disc(-23), &empty()).unwrap();
        assert_eq!(p.reduce_exponents(&[1]), vec![1]);
        assert_eq!(p.reduce_exponents(&[3]), vec![0]);
        assert_eq!(p.reduce_exponents(&[7]), vec![1]);
    }

    #[test]
    fn reduce_exponents_idempotent_and_relation_consistent() {
        for d in [-84i64, -480, -1000003 + 3 - 4] {
            let d = if matches!(d.rem_euclid(4), 0 | 1) { d } else { d - 1 };
            let disc = match Discriminant::new(d) {
                Ok(x) => x,
                Err(_) => continue,
            };
            let p = match build_presentation(disc, &empty()) {
                Ok(p) => p,
                Err(_) => continue,
            };
            let m = p.num_gens();
            for e in p.exponent_vectors().take(50) {
                let e64: Vec<i64> = e.iter().map(|&x| x as i64).collect();
                let r = p.reduce_exponents(&e64);
                assert_eq!(r, e, "canonical vectors are fixed points");
                // adding r_k at slot k == adding the relation vector
                for k in 0..m {
                    let mut plus_rk = e64.clone();
                    plus_rk[k] += p.rel_order(k) as i64;
                    let mut plus_rel = e64.clone();
                    for (i, &x) in p.relation(k).iter().enumerate() {
                        plus_rel[i] += x as i64;
                    }
                    assert_eq!(
                        p.reduce_exponents(&plus_rk),
                        p.reduce_exponents(&plus_rel),
                        "D={d} k={k}"
                    );
                }
            }
        }
    }

    #[test]
    fn enumeration_covers_group_once() {
        // Mapping every exponent vector through evaluate yields each reduced
        // form exactly once.
        for d in [-23i64, -47, -84, -480, -1555] {
            let disc = Discriminant::new(d).unwrap();
            let p = build_presentation(disc, &empty()).unwrap();
            let mut seen: Vec<QuadForm> = p
                .exponent_vectors()
                .map(|e| p.evaluate(&e).reduce())
                .collect();
            seen.sort();
            seen.dedup();
            assert_eq!(seen.len() as u64, p.order(), "D={d}");
            let forms = super::super::reduced_forms(d);
            assert_eq!(seen, forms, "D={d}");
        }
    }

    #[test]
    fn dl_inverts_evaluate() {
        let p = build_presentation(disc(-1555), &empty()).unwrap();
        for e in p.exponent_vectors() {
            let f = p.evaluate(&e);
            assert_eq!(p.dl(&f).unwrap(), e);
        }
    }

    #[test]
    fn generator_minimality() {
        // Each generator norm is the smallest eligible prime with r_k > 1.
        let p = build_presentation(disc(-455), &empty()).unwrap();
        assert!(p.order() > 1);
        let mut product: u64 = 1;
        for k in 0..p.num_gens() {
            assert!(p.rel_order(k) > 1);
            product *= p.rel_order(k);
            assert_eq!(p.absolute_order(k) % p.rel_order(k), 0);
        }
        assert_eq!(product, p.order());
    }

    #[test]
    fn auxiliary_prime_d23() {
        let p = build_presentation(disc(-23), &empty()).unwrap();
        let (ell, v) = find_auxiliary_prime(&p, 0, &empty()).unwrap();
        assert_eq!(ell, 3);
        assert!(v[0] == 1 || v[0] == 2);
    }

    #[test]
    fn auxiliary_errors() {
        // h = 1: no non-trivial class exists.
        let p = build_presentation(disc(-4), &empty()).unwrap();
        assert_eq!(p.num_gens(), 0);
        // r_k = 2: precondition rejected.
        let p = build_presentation(disc(-15), &empty()).unwrap();
        assert_eq!(p.rel_orders(), &[2]);
        assert!(matches!(
            find_auxiliary_prime(&p, 0, &empty()),
            Err(ClassGroupError::RelativeOrderTooSmall)
        ));
    }

    #[test]
    fn quotient_presentation_halves_order() {
        // D=-84 has Klein four-group; quotient by one order-2 class.
        let disc = disc(-84);
        let p_full = build_presentation(disc, &empty()).unwrap();
        assert_eq!(p_full.order(), 4);
        let n = prime_form(disc, 3).unwrap().unwrap();
        let q = build_presentation_mod_subgroup(disc, &empty(), &[n]).unwrap();
        assert_eq!(q.order(), 2);
    }

    #[test]
    fn paper_presentation_fixtures() {
        // (l_1^{r_1}) structures reported for two large discriminants.
        let p = build_presentation(disc(-13569850003), &empty()).unwrap();
        assert_eq!(p.norms(), &[7]);
        assert_eq!(p.rel_orders(), &[20203]);

        let p = build_presentation(disc(-11039933587), &empty()).unwrap();
        assert_eq!(p.norms(), &[17, 19]);
        assert_eq!(p.rel_orders(), &[1128, 10]);
    }
}
