//! Brute-force oracles shared by the integration tests.

#![allow(dead_code)]

use std::collections::BTreeSet;
use std::sync::Arc;

use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use natdef::groups::{self, FiniteGroup, GroupHom};
use natdef::structures::{SortedMap, SortedSignature, SortedStructure};

/// Every per-sort permutation that preserves all symbols, checked directly
/// on the tuples and tables.
pub fn naive_automorphisms(s: &SortedStructure) -> BTreeSet<SortedMap> {
    s.sizes
        .iter()
        .map(|&n| (0..n).permutations(n).collect::<Vec<_>>())
        .multi_cartesian_product()
        .map(SortedMap::new)
        .filter(|m| preserves(s, m))
        .collect()
}

fn preserves(s: &SortedStructure, m: &SortedMap) -> bool {
    let sig = &s.signature;
    let image =
        |sorts: &[usize], t: &[usize]| -> Vec<usize> { sorts.iter().zip(t).map(|(&srt, &x)| m.maps[srt][x]).collect() };
    let relations = sig.relations.iter().zip(&s.relations).all(|(sym, tuples)| {
        let mapped: BTreeSet<Vec<usize>> = tuples.iter().map(|t| image(&sym.sorts, t)).collect();
        mapped == *tuples
    });
    let functions = sig.functions.iter().zip(&s.functions).all(|(sym, table)| {
        table
            .iter()
            .all(|(args, &v)| table.get(&image(&sym.args, args)) == Some(&m.maps[sym.target][v]))
    });
    let constants = sig
        .constants
        .iter()
        .zip(&s.constants)
        .all(|(sym, &c)| m.maps[sym.sort][c] == c);
    relations && functions && constants
}

/// A random structure with 1 to 3 sorts and at most `max_total` elements.
pub fn random_structure(seed: u64, max_total: usize) -> SortedStructure {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sorts = rng.gen_range(1..=3usize.min(max_total));
    let mut sizes = vec![1; sorts];
    let extra = rng.gen_range(0..=max_total - sorts);
    for _ in 0..extra {
        let i = rng.gen_range(0..sorts);
        sizes[i] += 1;
    }
    let mut sig = SortedSignature::new((0..sorts).map(|i| format!("S{i}")));
    let relations = rng.gen_range(0..=3);
    let mut profiles = Vec::new();
    for r in 0..relations {
        let arity = rng.gen_range(1..=3);
        let profile: Vec<usize> = (0..arity).map(|_| rng.gen_range(0..sorts)).collect();
        sig = sig.relation(format!("R{r}"), &profile);
        profiles.push(profile);
    }
    let function = rng
        .gen_bool(0.3)
        .then(|| (rng.gen_range(0..sorts), rng.gen_range(0..sorts)));
    if let Some((from, to)) = function {
        sig = sig.function("f", &[from], to);
    }
    let constant = rng.gen_bool(0.2).then(|| rng.gen_range(0..sorts));
    if let Some(sort) = constant {
        sig = sig.constant("c", sort);
    }
    let mut s = SortedStructure::new(sig, sizes.clone());
    for (r, profile) in profiles.iter().enumerate() {
        let density = rng.gen_range(0.1..0.6);
        let all: Vec<Vec<usize>> = profile.iter().map(|&p| 0..sizes[p]).multi_cartesian_product().collect();
        for t in all {
            if rng.gen_bool(density) {
                s.insert(&format!("R{r}"), &t).unwrap();
            }
        }
    }
    if let Some((from, to)) = function {
        for x in 0..sizes[from] {
            let v = rng.gen_range(0..sizes[to]);
            s.define("f", &[x], v).unwrap();
        }
    }
    if let Some(sort) = constant {
        let v = rng.gen_range(0..sizes[sort]);
        s.set_constant("c", v).unwrap();
    }
    s
}

#[derive(Debug, Default, PartialEq, Eq)]
pub struct NaiveSections {
    pub total: u128,
    pub splittings: u64,
    pub weak_only: u64,
    pub plain: u128,
}

/// Every choice of one preimage per element, classified from the definitions.
pub fn naive_sections(phi: &GroupHom) -> NaiveSections {
    let h = &phi.domain;
    let g = &phi.codomain;
    let center: BTreeSet<usize> = h
        .elements()
        .filter(|&z| h.elements().all(|x| h.mul(z, x) == h.mul(x, z)))
        .collect();
    let fibres: Vec<Vec<usize>> = g
        .elements()
        .map(|x| h.elements().filter(|&y| phi.apply(y) == x).collect())
        .collect();
    let mut out = NaiveSections::default();
    for psi in fibres.into_iter().multi_cartesian_product() {
        out.total += 1;
        let hom = g
            .elements()
            .all(|x| g.elements().all(|y| psi[g.mul(x, y)] == h.mul(psi[x], psi[y])));
        let weak = psi[0] == 0
            && g.elements().all(|x| psi[g.inv(x)] == h.inv(psi[x]))
            && g.elements().all(|x| {
                g.elements()
                    .all(|y| center.contains(&h.mul(h.mul(psi[x], psi[y]), h.inv(psi[g.mul(x, y)]))))
            });
        if hom {
            out.splittings += 1;
        } else if weak {
            out.weak_only += 1;
        } else {
            out.plain += 1;
        }
    }
    out
}

/// Number of sections of `phi`: the product of the fibre sizes.
pub fn section_count(phi: &GroupHom) -> u128 {
    phi.codomain
        .elements()
        .map(|x| phi.domain.elements().filter(|&y| phi.apply(y) == x).count() as u128)
        .product()
}

/// The projection `G x H -> G`.
pub fn projection(g: &Arc<FiniteGroup>, h: &FiniteGroup) -> GroupHom {
    let prod = Arc::new(FiniteGroup::direct_product(g, h));
    let m = h.order();
    GroupHom::new(prod, g.clone(), (0..g.order() * m).map(|x| x / m).collect()).unwrap()
}

/// Surjections `G3 -> G2 -> G1` through quotients by normal subgroups, for
/// every catalog group `G3` of order at most `max_order`.
pub fn quotient_chains(max_order: usize) -> Vec<(String, GroupHom, GroupHom)> {
    let mut out = Vec::new();
    for entry in groups::catalog(max_order).unwrap() {
        let g3 = entry.group.clone();
        for n3 in g3.normal_subgroups() {
            let (g2, phi23) = groups::quotient(&g3, &n3).unwrap();
            for n2 in g2.normal_subgroups() {
                let (_, phi12) = groups::quotient(&g2, &n2).unwrap();
                out.push((
                    format!("{} / {} / {}", entry.name, n3.len(), n2.len()),
                    phi12,
                    phi23.clone(),
                ));
            }
        }
    }
    out
}
