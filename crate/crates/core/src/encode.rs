//! Three-sorted structures whose automorphism group is a prescribed group.
//!
//! [`encode_three_sorted`] turns surjections `G3 -> G2 -> G1` into a
//! structure with one sort per group, the homomorphisms as unary functions
//! and one right translation symbol per group element. Left translations then
//! realize every automorphism (see [`theta`]). [`attach_skew`] glues a group
//! acting on a two-sorted structure on top of it as a third sort.

use std::collections::BTreeSet;
use std::sync::Arc;

use serde::Serialize;

use crate::groups::{self, FiniteGroup, GroupError, GroupHom};
use crate::structures::{SortedMap, SortedSignature, SortedStructure, StructureError};
use crate::ucp::{self, PsiChoice, UcpError};

/// Search bound used for the encoded structures (three groups of order <= 8
/// plus slack).
pub const ENCODE_MAX_ELEMENTS: usize = 32;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum EncodeError {
    #[error("homomorphisms do not chain: {0}")]
    Chain(&'static str),
    #[error("homomorphism is not surjective: {0}")]
    NotSurjective(&'static str),
    #[error("encoding has {total} elements, bound is {bound}")]
    SizeBound { total: usize, bound: usize },
    #[error("homomorphism targets do not match the automorphism groups: {0}")]
    TargetMismatch(String),
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Ucp(#[from] UcpError),
}

/// Surjections `phi23: G3 -> G2` and `phi12: G2 -> G1` with their composite.
#[derive(Clone, Debug)]
pub struct GroupTriple {
    pub g1: Arc<FiniteGroup>,
    pub g2: Arc<FiniteGroup>,
    pub g3: Arc<FiniteGroup>,
    pub phi12: GroupHom,
    pub phi23: GroupHom,
    pub phi13: GroupHom,
}

impl GroupTriple {
    pub fn new(phi12: GroupHom, phi23: GroupHom) -> Result<Self, EncodeError> {
        if *phi23.codomain != *phi12.domain {
            return Err(EncodeError::Chain("codomain of phi23 is not the domain of phi12"));
        }
        if !phi12.is_surjective() {
            return Err(EncodeError::NotSurjective("phi12"));
        }
        if !phi23.is_surjective() {
            return Err(EncodeError::NotSurjective("phi23"));
        }
        let phi13 = phi12.after(&phi23);
        Ok(GroupTriple {
            g1: phi12.codomain.clone(),
            g2: phi12.domain.clone(),
            g3: phi23.domain.clone(),
            phi12,
            phi23,
            phi13,
        })
    }

    pub fn total_elements(&self) -> usize {
        self.g1.order() + self.g2.order() + self.g3.order()
    }
}

fn translation_symbol(level: usize, a: usize) -> String {
    format!("T{level}_{a}")
}

fn encode_with(t: &GroupTriple, right: bool) -> Result<SortedStructure, EncodeError> {
    let total = t.total_elements();
    if total > ENCODE_MAX_ELEMENTS {
        return Err(EncodeError::SizeBound {
            total,
            bound: ENCODE_MAX_ELEMENTS,
        });
    }
    let groups = [&t.g1, &t.g2, &t.g3];
    let mut sig = SortedSignature::new(["G1", "G2", "G3"])
        .function("F1", &[1], 0)
        .function("F2", &[2], 1);
    for (sort, g) in groups.iter().enumerate() {
        for a in g.elements() {
            sig = sig.function(translation_symbol(sort + 1, a), &[sort], sort);
        }
    }
    let mut s = SortedStructure::new(sig, groups.iter().map(|g| g.order()).collect());
    for b in t.g2.elements() {
        s.define("F1", &[b], t.phi12.apply(b))?;
    }
    for b in t.g3.elements() {
        s.define("F2", &[b], t.phi23.apply(b))?;
    }
    for (sort, g) in groups.iter().enumerate() {
        for a in g.elements() {
            let name = translation_symbol(sort + 1, a);
            for b in g.elements() {
                let v = if right { g.mul(b, a) } else { g.mul(a, b) };
                s.define(&name, &[b], v)?;
            }
        }
    }
    Ok(s)
}

/// Sorts `G1, G2, G3`; `F1: G2 -> G1` and `F2: G3 -> G2` are the
/// homomorphisms; `Tl_a(b) = b a` on sort `l` for every `a` in `Gl`.
pub fn encode_three_sorted(t: &GroupTriple) -> Result<SortedStructure, EncodeError> {
    encode_with(t, true)
}

/// Same structure with left translations `Tl_a(b) = a b`.
pub fn encode_three_sorted_left(t: &GroupTriple) -> Result<SortedStructure, EncodeError> {
    encode_with(t, false)
}

fn left_translation(g: &FiniteGroup, c: usize) -> Vec<usize> {
    g.elements().map(|x| g.mul(c, x)).collect()
}

/// Left translation by `phi13(c)`, `phi23(c)` and `c` on the three sorts.
pub fn theta(t: &GroupTriple, c: usize) -> SortedMap {
    SortedMap::new(vec![
        left_translation(&t.g1, t.phi13.apply(c)),
        left_translation(&t.g2, t.phi23.apply(c)),
        left_translation(&t.g3, c),
    ])
}

/// Left translations on the first two sorts, for `d` in `G2`.
pub fn theta2(t: &GroupTriple, d: usize) -> SortedMap {
    SortedMap::new(vec![
        left_translation(&t.g1, t.phi12.apply(d)),
        left_translation(&t.g2, d),
    ])
}

/// Left translation on the first sort, for `e` in `G1`.
pub fn theta1(t: &GroupTriple, e: usize) -> SortedMap {
    SortedMap::new(vec![left_translation(&t.g1, e)])
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ThetaReport {
    pub g3_order: usize,
    pub aut_count: usize,
    pub count_matches: bool,
    /// Every `theta(c)` is an automorphism.
    pub images_are_automorphisms: bool,
    pub injective: bool,
    /// Every automorphism `sigma` equals `theta(sigma(1))`.
    pub surjective: bool,
    pub homomorphic: bool,
    /// The restriction maps of the derived problems correspond to
    /// `phi12`, `phi23`, `phi13` under the sort-wise translations.
    pub restrictions_match: bool,
    /// Structure maps read as left translations give the same structure.
    pub left_reading_same_structure: bool,
    /// Under the left-translation reading every `theta(c)` is still an automorphism.
    pub left_reading_theta_ok: bool,
}

impl ThetaReport {
    pub fn passed(&self) -> bool {
        self.count_matches
            && self.images_are_automorphisms
            && self.injective
            && self.surjective
            && self.homomorphic
            && self.restrictions_match
    }
}

/// Checks that `theta` is an isomorphism from `G3` onto the automorphism
/// group of the encoding and that restrictions match the given maps.
pub fn verify_theta_iso(t: &GroupTriple) -> Result<ThetaReport, EncodeError> {
    let c = encode_three_sorted(t)?;
    let g3 = &t.g3;
    let thetas: Vec<SortedMap> = g3.elements().map(|x| theta(t, x)).collect();
    let triple = ucp::derive_triple_within(&c, PsiChoice::None, ENCODE_MAX_ELEMENTS)?;
    let auts = &triple.c23.h_maps;
    let images_are_automorphisms = thetas.iter().all(|m| c.is_automorphism(m));
    let distinct: BTreeSet<&SortedMap> = thetas.iter().collect();
    let injective = distinct.len() == thetas.len();
    let surjective = auts.iter().all(|sigma| thetas[sigma.apply(2, 0)] == *sigma);
    let homomorphic = g3.elements().all(|a| {
        g3.elements()
            .all(|b| thetas[g3.mul(a, b)] == thetas[a].compose(&thetas[b]))
    });

    let position = |list: &[SortedMap], m: &SortedMap| list.iter().position(|x| x == m);
    let t2: Vec<SortedMap> = t.g2.elements().map(|d| theta2(t, d)).collect();
    let t1: Vec<SortedMap> = t.g1.elements().map(|e| theta1(t, e)).collect();
    let lists_match = {
        let set = |v: &[SortedMap]| v.iter().cloned().collect::<BTreeSet<_>>();
        set(&t2) == set(&triple.c12.h_maps) && set(&t1) == set(&triple.c12.g_maps) && set(&thetas) == set(auts)
    };
    let restrictions_match = lists_match
        && triple.composition_holds
        && g3.elements().all(|x| {
            let i = position(auts, &thetas[x]);
            let j2 = position(&triple.c23.g_maps, &t2[t.phi23.apply(x)]);
            let j1 = position(&triple.c13.g_maps, &t1[t.phi13.apply(x)]);
            i.is_some() && i.map(|i| triple.c23.phi.apply(i)) == j2 && i.map(|i| triple.c13.phi.apply(i)) == j1
        })
        && t.g2.elements().all(|d| {
            let i = position(&triple.c12.h_maps, &t2[d]);
            let j = position(&triple.c12.g_maps, &t1[t.phi12.apply(d)]);
            i.is_some() && i.map(|i| triple.c12.phi.apply(i)) == j
        });

    let left = encode_three_sorted_left(t)?;
    Ok(ThetaReport {
        g3_order: g3.order(),
        aut_count: auts.len(),
        count_matches: auts.len() == g3.order(),
        images_are_automorphisms,
        injective,
        surjective,
        homomorphic,
        restrictions_match,
        left_reading_same_structure: left == c,
        left_reading_theta_ok: thetas.iter().all(|m| left.is_automorphism(m)),
    })
}

/// Puts a group `G3` acting on a two-sorted `B` on top of `B` as a third sort.
///
/// `phi23: G3 -> Aut(B)` and `phi13: G3 -> Aut(sort_1(B))` must target the
/// groups produced by [`groups::aut_group`] and satisfy
/// `phi13 = restriction ∘ phi23`. The new symbols are `E1_i: G3 -> sort 1`
/// with `E1_i(b) = phi13(b)(i)`, `E2_s_i: G3 -> sort s` with
/// `E2_s_i(b) = phi23(b)((s, i))` for every element of `B`, and right
/// translations `T3_c` on `G3`.
pub fn attach_skew(b: &SortedStructure, phi23: &GroupHom, phi13: &GroupHom) -> Result<SortedStructure, EncodeError> {
    if b.sort_count() != 2 {
        return Err(EncodeError::TargetMismatch("B must have two sorts".into()));
    }
    if *phi23.domain != *phi13.domain {
        return Err(EncodeError::Chain("phi23 and phi13 have different domains"));
    }
    let g3 = phi23.domain.clone();
    let total = b.total_elements() + g3.order();
    if total > ENCODE_MAX_ELEMENTS {
        return Err(EncodeError::SizeBound {
            total,
            bound: ENCODE_MAX_ELEMENTS,
        });
    }
    let (h, h_maps) = groups::aut_group_within(b, ENCODE_MAX_ELEMENTS)?;
    let a = b.reduct(&[0])?;
    let (g, g_maps) = groups::aut_group_within(&a, ENCODE_MAX_ELEMENTS)?;
    if *phi23.codomain != *h {
        return Err(EncodeError::TargetMismatch("phi23 does not target Aut(B)".into()));
    }
    if *phi13.codomain != *g {
        return Err(EncodeError::TargetMismatch(
            "phi13 does not target Aut(sort_1(B))".into(),
        ));
    }
    for x in g3.elements() {
        if h_maps[phi23.apply(x)].restrict(&[0]) != g_maps[phi13.apply(x)] {
            return Err(EncodeError::TargetMismatch(format!(
                "phi13 differs from the restriction of phi23 at {x}"
            )));
        }
    }
    let mut third = "G3".to_string();
    while b.signature.sort_index(&third).is_some() {
        third.push('\'');
    }
    let mut sig = b.signature.clone();
    sig.sorts.push(third);
    for i in 0..b.sizes[0] {
        sig = sig.function(format!("E1_{i}"), &[2], 0);
    }
    for (s, &n) in b.sizes.iter().enumerate() {
        for i in 0..n {
            sig = sig.function(format!("E2_{s}_{i}"), &[2], s);
        }
    }
    for c in g3.elements() {
        sig = sig.function(translation_symbol(3, c), &[2], 2);
    }
    let mut sizes = b.sizes.clone();
    sizes.push(g3.order());
    let mut out = SortedStructure::new(sig, sizes);
    out.relations = b.relations.clone();
    out.functions[..b.functions.len()].clone_from_slice(&b.functions);
    out.constants = b.constants.clone();
    for x in g3.elements() {
        let f1 = &g_maps[phi13.apply(x)];
        let f2 = &h_maps[phi23.apply(x)];
        for i in 0..b.sizes[0] {
            out.define(&format!("E1_{i}"), &[x], f1.apply(0, i))?;
        }
        for (s, &n) in b.sizes.iter().enumerate() {
            for i in 0..n {
                out.define(&format!("E2_{s}_{i}"), &[x], f2.apply(s, i))?;
            }
        }
        for c in g3.elements() {
            out.define(&translation_symbol(3, c), &[x], g3.mul(x, c))?;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::SectionClass;

    fn arc(g: FiniteGroup) -> Arc<FiniteGroup> {
        Arc::new(g)
    }

    fn triple(g3: FiniteGroup, g2: FiniteGroup, g1: FiniteGroup, m23: Vec<usize>, m12: Vec<usize>) -> GroupTriple {
        let (g1, g2, g3) = (arc(g1), arc(g2), arc(g3));
        let phi23 = GroupHom::new(g3, g2.clone(), m23).unwrap();
        let phi12 = GroupHom::new(g2, g1, m12).unwrap();
        GroupTriple::new(phi12, phi23).unwrap()
    }

    #[test]
    fn trivial_triple() {
        let t = triple(
            FiniteGroup::trivial(),
            FiniteGroup::trivial(),
            FiniteGroup::trivial(),
            vec![0],
            vec![0],
        );
        let c = encode_three_sorted(&t).unwrap();
        assert_eq!(c.sizes, vec![1, 1, 1]);
        let r = verify_theta_iso(&t).unwrap();
        assert!(r.passed());
        assert_eq!(r.aut_count, 1);
    }

    #[test]
    fn identity_c2_triple() {
        let c2 = FiniteGroup::cyclic(2);
        let t = triple(c2.clone(), c2.clone(), c2, vec![0, 1], vec![0, 1]);
        let r = verify_theta_iso(&t).unwrap();
        assert_eq!(r.aut_count, 2);
        assert!(r.passed());
        assert!(r.left_reading_same_structure);
    }

    #[test]
    fn c4_reduction_triple() {
        let t = triple(
            FiniteGroup::cyclic(4),
            FiniteGroup::cyclic(2),
            FiniteGroup::cyclic(2),
            vec![0, 1, 0, 1],
            vec![0, 1],
        );
        let r = verify_theta_iso(&t).unwrap();
        assert_eq!(r.aut_count, 4);
        assert!(r.passed());
    }

    #[test]
    fn nonabelian_readings_differ() {
        let s3 = FiniteGroup::symmetric(3);
        let id: Vec<usize> = (0..6).collect();
        let t = triple(s3.clone(), s3.clone(), s3, id.clone(), id);
        let r = verify_theta_iso(&t).unwrap();
        assert!(r.passed());
        assert!(!r.left_reading_same_structure);
        assert!(!r.left_reading_theta_ok);
    }

    #[test]
    fn chain_and_surjectivity_checked() {
        let c2 = arc(FiniteGroup::cyclic(2));
        let c4 = arc(FiniteGroup::cyclic(4));
        let phi23 = GroupHom::new(c4.clone(), c2.clone(), vec![0, 1, 0, 1]).unwrap();
        let bad12 = GroupHom::new(c4.clone(), c4.clone(), vec![0, 1, 2, 3]).unwrap();
        assert!(matches!(
            GroupTriple::new(bad12, phi23.clone()),
            Err(EncodeError::Chain(_))
        ));
        let zero = GroupHom::new(c2.clone(), c2, vec![0, 0]).unwrap();
        assert!(matches!(
            GroupTriple::new(zero, phi23),
            Err(EncodeError::NotSurjective("phi12"))
        ));
    }

    fn free_points() -> SortedStructure {
        SortedStructure::new(SortedSignature::new(["A", "B"]), vec![2, 1])
    }

    #[test]
    fn attach_identity_action() {
        let b = free_points();
        let (h, _) = groups::aut_group(&b).unwrap();
        let (g, _) = groups::aut_group(&b.reduct(&[0]).unwrap()).unwrap();
        let phi23 = GroupHom::identity(h.clone());
        let phi13 = GroupHom::new(h, g, vec![0, 1]).unwrap();
        let c = attach_skew(&b, &phi23, &phi13).unwrap();
        assert_eq!(c.reduct(&[0, 1]).unwrap(), b);
        let t = ucp::derive_triple_within(&c, PsiChoice::Search, ENCODE_MAX_ELEMENTS).unwrap();
        assert_eq!(t.c23.h.order(), 2);
        assert_eq!(t.c23.report.psi_class, Some(SectionClass::Splitting));
        assert!(t.composition_holds);
        for f in &t.c23.h_maps {
            assert!(b.is_automorphism(&f.restrict(&[0, 1])));
        }
    }

    #[test]
    fn attach_c4_over_c2() {
        let b = free_points();
        let (h, _) = groups::aut_group(&b).unwrap();
        let (g, _) = groups::aut_group(&b.reduct(&[0]).unwrap()).unwrap();
        let c4 = arc(FiniteGroup::cyclic(4));
        let phi23 = GroupHom::new(c4.clone(), h, vec![0, 1, 0, 1]).unwrap();
        let phi13 = GroupHom::new(c4, g, vec![0, 1, 0, 1]).unwrap();
        let c = attach_skew(&b, &phi23, &phi13).unwrap();
        let t = ucp::derive_triple_within(&c, PsiChoice::Search, ENCODE_MAX_ELEMENTS).unwrap();
        assert_eq!(t.c13.h.order(), 4);
        assert!(t.c13.report.e_surjective);
        // C4 -> C2 has no weak splitting
        assert_eq!(t.c13.psi, None);
    }

    #[test]
    fn attach_rejects_mismatched_targets() {
        let b = free_points();
        let (h, _) = groups::aut_group(&b).unwrap();
        let phi23 = GroupHom::identity(h.clone());
        let wrong = GroupHom::new(h.clone(), h, vec![0, 0]).unwrap();
        assert!(attach_skew(&b, &phi23, &wrong).is_err());
    }
}
