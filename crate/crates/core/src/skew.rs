//! The skew product `Z ⋉ ⊕_{n ∈ Z} G2` and its finite cyclic analogue.
//!
//! An element `y^n x` is stored as `shift = n` and `x` as a finitely supported
//! map from positions to non-identity elements of the base group. Products
//! follow `(y^n x)(y^m x') = y^(n+m) (shift_m(x) x')`, where `shift_m` moves
//! every position up by `m`; in particular `y^-1 x y = shift_1(x)`.

use std::collections::BTreeMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::groups::{FiniteGroup, GroupHom};

/// Largest order accepted by [`build_cyclic_skew`].
pub const CYCLIC_SKEW_BOUND: usize = 10_000;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum SkewError {
    #[error("elements live over different base groups")]
    BaseMismatch,
    #[error("the identity has no center witness")]
    IdentityHasNoWitness,
    #[error("base group is trivial, so the skew product is abelian")]
    TrivialBase,
    #[error("cyclic skew group of order {order} exceeds the bound {bound}")]
    SizeBound { order: u128, bound: usize },
    #[error("modulus must be at least 1")]
    ZeroModulus,
    #[error("element {elem} is not in the base group of order {order}")]
    BadElement { elem: usize, order: usize },
    #[error("json: {0}")]
    Json(String),
}

#[derive(Clone, Debug)]
pub struct SkewElement {
    base: Arc<FiniteGroup>,
    shift: i64,
    support: BTreeMap<i64, usize>,
}

impl PartialEq for SkewElement {
    fn eq(&self, other: &Self) -> bool {
        self.shift == other.shift
            && self.support == other.support
            && (Arc::ptr_eq(&self.base, &other.base) || self.base == other.base)
    }
}

impl Eq for SkewElement {}

impl Hash for SkewElement {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.shift.hash(state);
        self.support.hash(state);
    }
}

impl fmt::Display for SkewElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "y^{}", self.shift)?;
        for (p, &g) in &self.support {
            write!(f, " [{p}:{}]", self.base.name(g))?;
        }
        Ok(())
    }
}

impl SkewElement {
    /// Builds an element, dropping identity entries from the support.
    pub fn new(
        base: Arc<FiniteGroup>,
        shift: i64,
        support: impl IntoIterator<Item = (i64, usize)>,
    ) -> Result<Self, SkewError> {
        let order = base.order();
        let mut map = BTreeMap::new();
        for (p, g) in support {
            if g >= order {
                return Err(SkewError::BadElement { elem: g, order });
            }
            if g != 0 {
                map.insert(p, g);
            }
        }
        Ok(SkewElement {
            base,
            shift,
            support: map,
        })
    }

    pub fn identity(base: Arc<FiniteGroup>) -> Self {
        SkewElement {
            base,
            shift: 0,
            support: BTreeMap::new(),
        }
    }

    /// The generator `y`.
    pub fn y(base: Arc<FiniteGroup>) -> Self {
        SkewElement {
            base,
            shift: 1,
            support: BTreeMap::new(),
        }
    }

    pub fn base(&self) -> &Arc<FiniteGroup> {
        &self.base
    }

    pub fn shift(&self) -> i64 {
        self.shift
    }

    pub fn support(&self) -> &BTreeMap<i64, usize> {
        &self.support
    }

    pub fn is_identity(&self) -> bool {
        self.shift == 0 && self.support.is_empty()
    }

    fn same_base(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.base, &other.base) || self.base == other.base
    }

    pub fn mul(&self, other: &Self) -> Result<Self, SkewError> {
        if !self.same_base(other) {
            return Err(SkewError::BaseMismatch);
        }
        let m = other.shift;
        let mut support: BTreeMap<i64, usize> = self.support.iter().map(|(&p, &g)| (p + m, g)).collect();
        for (&p, &g) in &other.support {
            let v = self.base.mul(support.get(&p).copied().unwrap_or(0), g);
            if v == 0 {
                support.remove(&p);
            } else {
                support.insert(p, v);
            }
        }
        Ok(SkewElement {
            base: self.base.clone(),
            shift: self.shift + m,
            support,
        })
    }

    /// `(y^n x)^-1 = y^-n shift_-n(x^-1)`.
    pub fn inv(&self) -> Self {
        let n = self.shift;
        SkewElement {
            base: self.base.clone(),
            shift: -n,
            support: self.support.iter().map(|(&p, &g)| (p - n, self.base.inv(g))).collect(),
        }
    }

    /// Power by repeated squaring; negative exponents invert first.
    pub fn pow(&self, m: i64) -> Self {
        let mut base = if m < 0 { self.inv() } else { self.clone() };
        let mut e = m.unsigned_abs();
        let mut acc = SkewElement::identity(self.base.clone());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base).expect("same base");
            }
            base = base.mul(&base).expect("same base");
            e >>= 1;
        }
        acc
    }

    /// Ordered product of the support values by ascending position.
    pub fn phi23(&self) -> usize {
        self.support.values().fold(0, |acc, &g| self.base.mul(acc, g))
    }

    /// `phi12 ∘ phi23`.
    pub fn phi13(&self, phi12: &GroupHom) -> usize {
        phi12.apply(self.phi23())
    }

    /// An element that does not commute with `self`.
    ///
    /// Without shift this is `y`; otherwise a single base element placed at
    /// position `max(support, 0) + shift + 1`.
    pub fn center_witness(&self) -> Result<Self, SkewError> {
        if self.base.order() < 2 {
            return Err(SkewError::TrivialBase);
        }
        if self.is_identity() {
            return Err(SkewError::IdentityHasNoWitness);
        }
        if self.shift == 0 {
            return Ok(SkewElement::y(self.base.clone()));
        }
        let top = self.support.keys().next_back().copied().unwrap_or(0);
        SkewElement::new(self.base.clone(), 0, [(top + self.shift + 1, 1)])
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(SkewDoc {
            shift: self.shift,
            support: self.support.iter().map(|(&p, &g)| (p, g)).collect(),
        })
        .expect("skew documents serialize")
    }

    pub fn from_json_value(base: Arc<FiniteGroup>, v: &serde_json::Value) -> Result<Self, SkewError> {
        let doc: SkewDoc = serde_json::from_value(v.clone()).map_err(|e| SkewError::Json(e.to_string()))?;
        let mut seen = BTreeMap::new();
        for &(p, g) in &doc.support {
            if seen.insert(p, g).is_some() {
                return Err(SkewError::Json(format!("position {p} listed twice")));
            }
        }
        SkewElement::new(base, doc.shift, doc.support)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SkewDoc {
    pub shift: i64,
    pub support: Vec<(i64, usize)>,
}

/// `psi0(g)`: `g` placed at position 0, no shift.
pub fn psi0(base: &Arc<FiniteGroup>, g: usize) -> SkewElement {
    SkewElement::new(base.clone(), 0, [(0, g)]).expect("element of the base group")
}

/// Random element with shift and positions in `-radius..=radius`.
pub fn random_element(base: &Arc<FiniteGroup>, rng: &mut impl Rng, radius: i64) -> SkewElement {
    let shift = rng.gen_range(-radius..=radius);
    let n = base.order();
    let mut support = Vec::new();
    for p in -radius..=radius {
        if rng.gen_bool(0.5) {
            support.push((p, rng.gen_range(0..n)));
        }
    }
    SkewElement::new(base.clone(), shift, support).expect("in range")
}

/// Random element of the direct sum (no shift).
pub fn random_sum_element(base: &Arc<FiniteGroup>, rng: &mut impl Rng, radius: i64) -> SkewElement {
    let mut e = random_element(base, rng, radius);
    e.shift = 0;
    e
}

/// Searches `samples` random pairs for a violation of
/// `phi23(ab) = phi23(a) phi23(b)`; returns the first one found.
pub fn find_phi23_violation(base: &Arc<FiniteGroup>, samples: usize, seed: u64) -> Option<(SkewElement, SkewElement)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..samples).find_map(|_| {
        let a = random_element(base, &mut rng, 3);
        let b = random_element(base, &mut rng, 3);
        let ab = a.mul(&b).expect("same base");
        (ab.phi23() != base.mul(a.phi23(), b.phi23())).then_some((a, b))
    })
}

/// Counts violations of the homomorphism law among `samples` random pairs.
pub fn count_phi23_violations(base: &Arc<FiniteGroup>, samples: usize, seed: u64) -> usize {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..samples)
        .filter(|_| {
            let a = random_element(base, &mut rng, 3);
            let b = random_element(base, &mut rng, 3);
            let ab = a.mul(&b).expect("same base");
            ab.phi23() != base.mul(a.phi23(), b.phi23())
        })
        .count()
}

/// Failure counts for the group laws of the skew product on random samples.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct LawReport {
    pub seed: u64,
    pub samples: usize,
    pub associativity_failures: usize,
    pub inverse_failures: usize,
    pub conjugations: usize,
    /// `y^-1 x y` differs from `x` shifted one position up.
    pub conjugation_failures: usize,
    /// Base elements `g` with `phi23(psi0(g)) != g`.
    pub section_failures: usize,
    pub witnesses: usize,
    /// Witnesses that commute with their element, or were not produced.
    pub witness_failures: usize,
    /// Pairs violating `phi23(ab) = phi23(a) phi23(b)`; not a law.
    pub phi23_violations: usize,
}

impl LawReport {
    pub fn passed(&self) -> bool {
        self.associativity_failures == 0
            && self.inverse_failures == 0
            && self.conjugation_failures == 0
            && self.section_failures == 0
            && self.witness_failures == 0
    }
}

/// Checks associativity and inverses on `samples` random triples,
/// conjugation by `y` and center witnesses on `samples / 10` random
/// elements, and `phi23 ∘ psi0 = id` on the whole base.
pub fn check_laws(base: &Arc<FiniteGroup>, samples: usize, seed: u64) -> LawReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut r = LawReport {
        seed,
        samples,
        ..LawReport::default()
    };
    for _ in 0..samples {
        let a = random_element(base, &mut rng, 3);
        let b = random_element(base, &mut rng, 3);
        let c = random_element(base, &mut rng, 3);
        let ab = a.mul(&b).expect("same base");
        if ab.mul(&c).expect("same base") != a.mul(&b.mul(&c).expect("same base")).expect("same base") {
            r.associativity_failures += 1;
        }
        if !a.mul(&a.inv()).expect("same base").is_identity() || !a.inv().mul(&a).expect("same base").is_identity() {
            r.inverse_failures += 1;
        }
        if ab.phi23() != base.mul(a.phi23(), b.phi23()) {
            r.phi23_violations += 1;
        }
    }
    let y = SkewElement::y(base.clone());
    r.conjugations = samples / 10;
    for _ in 0..r.conjugations {
        let x = random_sum_element(base, &mut rng, 3);
        let shifted =
            SkewElement::new(base.clone(), 0, x.support().iter().map(|(&p, &g)| (p + 1, g))).expect("in range");
        if y.inv().mul(&x).expect("same base").mul(&y).expect("same base") != shifted {
            r.conjugation_failures += 1;
        }
    }
    r.section_failures = base.elements().filter(|&g| psi0(base, g).phi23() != g).count();
    while r.witnesses < samples / 10 {
        let x = random_element(base, &mut rng, 3);
        if x.is_identity() {
            continue;
        }
        r.witnesses += 1;
        let ok = x.center_witness().is_ok_and(|w| x.mul(&w).ok() != w.mul(&x).ok());
        if !ok {
            r.witness_failures += 1;
        }
    }
    r
}

/// `Z/k ⋉ G2^k` as a Cayley table: element `(n, x)` has index
/// `n * |G2|^k + sum_p x_p |G2|^p`, and multiplication is the skew rule with
/// shifts and positions taken mod `k`.
pub fn build_cyclic_skew(k: usize, base: &FiniteGroup) -> Result<FiniteGroup, SkewError> {
    if k == 0 {
        return Err(SkewError::ZeroModulus);
    }
    let b = base.order();
    let order = (b as u128).checked_pow(k as u32).and_then(|p| p.checked_mul(k as u128));
    let order = match order {
        Some(o) if o <= CYCLIC_SKEW_BOUND as u128 => o as usize,
        o => {
            return Err(SkewError::SizeBound {
                order: o.unwrap_or(u128::MAX),
                bound: CYCLIC_SKEW_BOUND,
            });
        }
    };
    let block = order / k;
    let decode = |e: usize| -> (usize, Vec<usize>) {
        let mut rest = e % block;
        let coords = (0..k)
            .map(|_| {
                let c = rest % b;
                rest /= b;
                c
            })
            .collect();
        (e / block, coords)
    };
    let encode =
        |n: usize, coords: &[usize]| -> usize { n * block + coords.iter().rev().fold(0, |acc, &c| acc * b + c) };
    let decoded: Vec<(usize, Vec<usize>)> = (0..order).map(decode).collect();
    let table = decoded
        .iter()
        .map(|(n, x)| {
            decoded
                .iter()
                .map(|(m, x2)| {
                    let mut coords = vec![0; k];
                    for p in 0..k {
                        coords[(p + m) % k] = x[p];
                    }
                    for p in 0..k {
                        coords[p] = base.mul(coords[p], x2[p]);
                    }
                    encode((n + m) % k, &coords)
                })
                .collect()
        })
        .collect();
    let names = decoded
        .iter()
        .map(|(n, x)| {
            let parts: Vec<&str> = x.iter().map(|&c| base.name(c)).collect();
            format!("y^{n}[{}]", parts.join(","))
        })
        .collect();
    Ok(FiniteGroup::from_table(table, Some(names)).expect("skew rule yields a group"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::are_isomorphic;

    fn c2() -> Arc<FiniteGroup> {
        Arc::new(FiniteGroup::cyclic(2))
    }

    #[test]
    fn identity_is_neutral_and_inverse_round_trips() {
        let b = c2();
        let e = SkewElement::identity(b.clone());
        let a = SkewElement::new(b.clone(), 2, [(0, 1), (3, 1)]).unwrap();
        assert_eq!(e.mul(&a).unwrap(), a);
        assert_eq!(a.mul(&e).unwrap(), a);
        assert!(a.mul(&a.inv()).unwrap().is_identity());
        assert!(e.inv().is_identity());
        assert_eq!(SkewElement::y(b.clone()).inv(), SkewElement::new(b, -1, []).unwrap());
    }

    #[test]
    fn conjugation_by_y_shifts() {
        let b = c2();
        let y = SkewElement::y(b.clone());
        let x = psi0(&b, 1);
        let conj = y.inv().mul(&x).unwrap().mul(&y).unwrap();
        assert_eq!(conj, SkewElement::new(b, 0, [(1, 1)]).unwrap());
    }

    #[test]
    fn pow_agrees_with_repeated_product() {
        let b = Arc::new(FiniteGroup::symmetric(3));
        let a = SkewElement::new(b.clone(), 1, [(0, 3), (2, 1)]).unwrap();
        let mut acc = SkewElement::identity(b);
        for m in 0..6 {
            assert_eq!(a.pow(m), acc);
            assert_eq!(a.pow(-m), acc.inv());
            acc = acc.mul(&a).unwrap();
        }
    }

    #[test]
    fn phi23_examples() {
        let b = c2();
        assert_eq!(SkewElement::identity(b.clone()).phi23(), 0);
        assert_eq!(SkewElement::new(b.clone(), 5, [(3, 1)]).unwrap().phi23(), 1);
        let phi12 = GroupHom::identity(b.clone());
        assert_eq!(SkewElement::new(b, 4, []).unwrap().phi13(&phi12), 0);
    }

    #[test]
    fn phi23_violation_on_s3() {
        let s3 = Arc::new(FiniteGroup::symmetric(3));
        let (a, b) = find_phi23_violation(&s3, 1000, 7).expect("nonabelian base violates the law");
        let ab = a.mul(&b).unwrap();
        assert_ne!(ab.phi23(), s3.mul(a.phi23(), b.phi23()));
        assert!(find_phi23_violation(&Arc::new(FiniteGroup::cyclic(4)), 1000, 7).is_none());
    }

    #[test]
    fn center_witness_examples() {
        let b = c2();
        let x = psi0(&b, 1);
        let w = x.center_witness().unwrap();
        assert_eq!(w, SkewElement::y(b.clone()));
        assert_ne!(x.mul(&w).unwrap(), w.mul(&x).unwrap());

        let y = SkewElement::y(b.clone());
        let w = y.center_witness().unwrap();
        assert_eq!(w, SkewElement::new(b.clone(), 0, [(2, 1)]).unwrap());
        let yw = y.mul(&w).unwrap();
        let wy = w.mul(&y).unwrap();
        assert_eq!(yw.support().keys().copied().collect::<Vec<_>>(), vec![2]);
        assert_eq!(wy.support().keys().copied().collect::<Vec<_>>(), vec![3]);

        assert_eq!(
            SkewElement::identity(b).center_witness(),
            Err(SkewError::IdentityHasNoWitness)
        );
        let trivial = Arc::new(FiniteGroup::trivial());
        assert_eq!(SkewElement::y(trivial).center_witness(), Err(SkewError::TrivialBase));
    }

    #[test]
    fn cyclic_skew_examples() {
        let g = build_cyclic_skew(1, &FiniteGroup::cyclic(2)).unwrap();
        assert_eq!(g.order(), 2);
        let g = build_cyclic_skew(2, &FiniteGroup::trivial()).unwrap();
        assert!(are_isomorphic(&g, &FiniteGroup::cyclic(2)));
        let g = build_cyclic_skew(2, &FiniteGroup::cyclic(2)).unwrap();
        assert_eq!(g.order(), 8);
        // Z/2 acting on C2^2 by swapping coordinates: the dihedral group of order 8
        assert!(are_isomorphic(&g, &FiniteGroup::dihedral(4)));
        assert!(matches!(
            build_cyclic_skew(8, &FiniteGroup::cyclic(3)),
            Err(SkewError::SizeBound { .. })
        ));
    }

    #[test]
    fn json_round_trip() {
        let b = Arc::new(FiniteGroup::cyclic(3));
        let a = SkewElement::new(b.clone(), -2, [(-1, 2), (4, 1)]).unwrap();
        let v = a.to_json_value();
        assert_eq!(v, serde_json::json!({"shift": -2, "support": [[-1, 2], [4, 1]]}));
        assert_eq!(SkewElement::from_json_value(b.clone(), &v).unwrap(), a);
        let bad = serde_json::json!({"shift": 0, "support": [[0, 5]]});
        assert!(SkewElement::from_json_value(b, &bad).is_err());
    }
}
