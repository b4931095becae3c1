mod common;

use std::collections::BTreeSet;
use std::sync::Arc;

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use natdef::groups::{self, classify_sections, FiniteGroup};
use natdef::skew::{psi0, random_element, SkewElement};
use natdef::structures::{self, SortedMap, SortedStructure};

fn random_relabeling(s: &SortedStructure, seed: u64) -> SortedMap {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    SortedMap::new(
        s.sizes
            .iter()
            .map(|&n| {
                let mut p: Vec<usize> = (0..n).collect();
                p.shuffle(&mut rng);
                p
            })
            .collect(),
    )
}

/// Right action on `Z x G`: `y^n x` sends `(p, h)` to `(p + n, h x(p + n))`.
fn act(e: &SkewElement, (p, h): (i64, usize)) -> (i64, usize) {
    let q = p + e.shift();
    (q, e.base().mul(h, e.support().get(&q).copied().unwrap_or(0)))
}

fn points(base: &FiniteGroup) -> Vec<(i64, usize)> {
    (-12..=12).flat_map(|p| base.elements().map(move |h| (p, h))).collect()
}

fn small_group(i: usize) -> Arc<FiniteGroup> {
    let all = groups::catalog(8).unwrap();
    all[i % all.len()].group.clone()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn automorphisms_match_brute_force(seed in any::<u64>()) {
        let s = common::random_structure(seed, 6);
        let fast: BTreeSet<SortedMap> = structures::automorphisms(&s).unwrap().into_iter().collect();
        prop_assert_eq!(fast.len(), structures::automorphisms(&s).unwrap().len());
        prop_assert_eq!(fast, common::naive_automorphisms(&s));
    }

    #[test]
    fn relabeling_is_an_isomorphism(seed in any::<u64>(), perm in any::<u64>()) {
        let s = common::random_structure(seed, 7);
        let m = random_relabeling(&s, perm);
        let t = s.relabel(&m).unwrap();
        prop_assert!(s.is_isomorphism_to(&t, &m));
        let auts = structures::automorphisms(&s).unwrap().len();
        prop_assert_eq!(structures::isomorphisms(&s, &t).unwrap().len(), auts);
        prop_assert_eq!(structures::automorphisms(&t).unwrap().len(), auts);
    }

    #[test]
    fn json_round_trip(seed in any::<u64>()) {
        let s = common::random_structure(seed, 8);
        prop_assert_eq!(SortedStructure::from_json(&s.to_json()).unwrap(), s.clone());
        prop_assert_eq!(SortedStructure::from_json_value(&s.to_json_value()).unwrap(), s);
    }

    #[test]
    fn skew_product_matches_the_action_model(g in 0usize..11, seed in any::<u64>()) {
        let base = small_group(g);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_element(&base, &mut rng, 3);
        let b = random_element(&base, &mut rng, 3);
        let ab = a.mul(&b).unwrap();
        let a_inv = a.inv();
        for pt in points(&base) {
            prop_assert_eq!(act(&ab, pt), act(&b, act(&a, pt)));
            prop_assert_eq!(act(&a_inv, act(&a, pt)), pt);
        }
        let y = SkewElement::y(base.clone());
        let conj = y.inv().mul(&a).unwrap().mul(&y).unwrap();
        for pt in points(&base) {
            let (p, h) = pt;
            let (q, k) = act(&a, (p - 1, h));
            prop_assert_eq!(act(&conj, pt), (q + 1, k));
        }
        let x = base.elements().last().unwrap();
        prop_assert_eq!(psi0(&base, x).phi23(), x);
    }

    #[test]
    fn section_classes_match_brute_force(g in 0usize..11, n in any::<prop::sample::Index>()) {
        let group = small_group(g);
        let normals = group.normal_subgroups();
        let normal = &normals[n.index(normals.len())];
        let (_, phi) = groups::quotient(&group, normal).unwrap();
        let r = classify_sections(&phi).unwrap();
        let naive = common::naive_sections(&phi);
        prop_assert_eq!(naive.total, r.total_sections);
        prop_assert_eq!(naive.splittings, r.splitting_count);
        prop_assert_eq!(naive.weak_only, r.weak_count);
        prop_assert_eq!(naive.plain, r.section_only_count);
        prop_assert_eq!(common::section_count(&phi), r.total_sections);
    }
}
