//! Finite groups as Cayley tables, homomorphisms, centers and quotients.
//!
//! The identity is always element 0. Products of maps follow the convention
//! `(a * b)(x) = a(b(x))`.

mod catalog;
mod json;
mod sections;

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::structures::{self, SortedMap, SortedStructure, StructureError};

pub use catalog::{catalog, catalog_search_weak_not_strong, CatalogEntry, CatalogSearch, QuotientCase};
pub use json::{GroupDoc, HomDoc};
pub use sections::{
    classify_section, classify_sections, classify_sections_with, is_weak_splitting, SectionClass, SectionMode,
    SectionReport, DEFAULT_SECTION_BOUND,
};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum GroupError {
    #[error("invalid Cayley table: {0}")]
    InvalidTable(String),
    #[error("map is not a homomorphism")]
    NotHomomorphism,
    #[error("homomorphism is not surjective")]
    NotSurjective,
    #[error("map has length {found}, domain has order {expected}")]
    MapLength { expected: usize, found: usize },
    #[error("{0:?} is not a normal subgroup")]
    NotNormal(Vec<usize>),
    #[error("{total} sections exceed the exhaustive bound {bound}")]
    SectionBoundExceeded { total: u128, bound: u128 },
    #[error("catalog order bound {0} exceeds 32")]
    CatalogBound(usize),
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error("json: {0}")]
    Json(String),
}

/// Number of random triples checked for associativity above order 64.
const ASSOCIATIVITY_SAMPLES: usize = 20_000;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FiniteGroup {
    table: Vec<Vec<usize>>,
    names: Vec<String>,
    inverses: Vec<usize>,
}

impl FiniteGroup {
    /// Validates and wraps a Cayley table; `names` defaults to decimal labels.
    pub fn from_table(table: Vec<Vec<usize>>, names: Option<Vec<String>>) -> Result<Self, GroupError> {
        let n = table.len();
        if n == 0 {
            return Err(GroupError::InvalidTable("empty table".into()));
        }
        if table.iter().any(|row| row.len() != n) {
            return Err(GroupError::InvalidTable("table is not square".into()));
        }
        for a in 0..n {
            if table[0][a] != a || table[a][0] != a {
                return Err(GroupError::InvalidTable("element 0 is not the identity".into()));
            }
        }
        for i in 0..n {
            let mut row_seen = vec![false; n];
            let mut col_seen = vec![false; n];
            for j in 0..n {
                let (r, c) = (table[i][j], table[j][i]);
                if r >= n
                    || c >= n
                    || std::mem::replace(&mut row_seen[r], true)
                    || std::mem::replace(&mut col_seen[c], true)
                {
                    return Err(GroupError::InvalidTable(format!(
                        "row or column {i} is not a permutation"
                    )));
                }
            }
        }
        let assoc = |a: usize, b: usize, c: usize| table[table[a][b]][c] == table[a][table[b][c]];
        if n <= 64 {
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        if !assoc(a, b, c) {
                            return Err(GroupError::InvalidTable(format!("not associative at ({a},{b},{c})")));
                        }
                    }
                }
            }
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
            for _ in 0..ASSOCIATIVITY_SAMPLES {
                let (a, b, c) = (rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n));
                if !assoc(a, b, c) {
                    return Err(GroupError::InvalidTable(format!("not associative at ({a},{b},{c})")));
                }
            }
        }
        let names = match names {
            Some(v) if v.len() == n => v,
            Some(_) => return Err(GroupError::InvalidTable("names list has the wrong length".into())),
            None => (0..n).map(|i| i.to_string()).collect(),
        };
        Ok(Self::trusted(table, names))
    }

    /// Builds from a table already known to be a group.
    fn trusted(table: Vec<Vec<usize>>, names: Vec<String>) -> Self {
        let inverses = table
            .iter()
            .map(|row| row.iter().position(|&x| x == 0).expect("latin square"))
            .collect();
        FiniteGroup { table, names, inverses }
    }

    pub fn trivial() -> Self {
        Self::trusted(vec![vec![0]], vec!["1".into()])
    }

    /// Cyclic group of order `n` generated by element 1.
    pub fn cyclic(n: usize) -> Self {
        assert!(n >= 1);
        let table = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        let names = (0..n)
            .map(|k| match k {
                0 => "1".to_string(),
                1 => "g".to_string(),
                _ => format!("g^{k}"),
            })
            .collect();
        Self::trusted(table, names)
    }

    /// Dihedral group of order `2n`; element `i + n*j` is `r^i s^j`.
    pub fn dihedral(n: usize) -> Self {
        assert!(n >= 1);
        let idx = |i: usize, j: usize| i + n * j;
        let mut table = vec![vec![0; 2 * n]; 2 * n];
        for j in 0..2 {
            for i in 0..n {
                for l in 0..2 {
                    for k in 0..n {
                        let rot = if j == 0 { (i + k) % n } else { (i + n - k) % n };
                        table[idx(i, j)][idx(k, l)] = idx(rot, (j + l) % 2);
                    }
                }
            }
        }
        let names = (0..2 * n)
            .map(|e| {
                let (i, j) = (e % n, e / n);
                let r = match i {
                    0 => String::new(),
                    1 => "r".to_string(),
                    _ => format!("r^{i}"),
                };
                match (r.is_empty(), j) {
                    (true, 0) => "1".to_string(),
                    (_, 0) => r,
                    _ => format!("{r}s"),
                }
            })
            .collect();
        Self::trusted(table, names)
    }

    /// Dicyclic group of order `4n`; element `i + 2n*j` is `a^i x^j` with
    /// `a^(2n) = 1`, `x^2 = a^n`, `x a x^-1 = a^-1`. `dicyclic(2)` is Q8.
    pub fn dicyclic(n: usize) -> Self {
        assert!(n >= 1);
        let m = 2 * n;
        let idx = |i: usize, j: usize| i + m * j;
        let mut table = vec![vec![0; 2 * m]; 2 * m];
        for j in 0..2 {
            for i in 0..m {
                for l in 0..2 {
                    for k in 0..m {
                        let prod = match (j, l) {
                            (0, _) => idx((i + k) % m, l),
                            (1, 0) => idx((i + m - k) % m, 1),
                            _ => idx((i + m - k + n) % m, 0),
                        };
                        table[idx(i, j)][idx(k, l)] = prod;
                    }
                }
            }
        }
        let names = (0..2 * m)
            .map(|e| {
                let (i, j) = (e % m, e / m);
                let a = match i {
                    0 => String::new(),
                    1 => "a".to_string(),
                    _ => format!("a^{i}"),
                };
                match (a.is_empty(), j) {
                    (true, 0) => "1".to_string(),
                    (_, 0) => a,
                    _ => format!("{a}x"),
                }
            })
            .collect();
        Self::trusted(table, names)
    }

    pub fn quaternion() -> Self {
        Self::dicyclic(2)
    }

    /// Symmetric group on `n` points, permutations in lexicographic order.
    pub fn symmetric(n: usize) -> Self {
        Self::from_permutations(all_permutations(n))
    }

    /// Alternating group on `n` points, even permutations in lexicographic order.
    pub fn alternating(n: usize) -> Self {
        Self::from_permutations(all_permutations(n).into_iter().filter(|p| is_even(p)).collect())
    }

    /// Group of a list of permutations closed under composition, with the
    /// identity first. Names are the one-line notation.
    pub fn from_permutations(perms: Vec<Vec<usize>>) -> Self {
        let index: HashMap<&Vec<usize>, usize> = perms.iter().enumerate().map(|(i, p)| (p, i)).collect();
        let table = perms
            .iter()
            .map(|a| {
                perms
                    .iter()
                    .map(|b| {
                        let ab: Vec<usize> = b.iter().map(|&x| a[x]).collect();
                        index[&ab]
                    })
                    .collect()
            })
            .collect();
        let names = perms
            .iter()
            .map(|p| p.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(""))
            .collect();
        Self::trusted(table, names)
    }

    /// Direct product; the pair `(a, b)` has index `a * |h| + b`.
    pub fn direct_product(g: &FiniteGroup, h: &FiniteGroup) -> Self {
        let (n, m) = (g.order(), h.order());
        let table = (0..n * m)
            .map(|x| {
                (0..n * m)
                    .map(|y| g.mul(x / m, y / m) * m + h.mul(x % m, y % m))
                    .collect()
            })
            .collect();
        let names = (0..n * m)
            .map(|x| format!("({},{})", g.name(x / m), h.name(x % m)))
            .collect();
        Self::trusted(table, names)
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverses[a]
    }

    pub fn name(&self, a: usize) -> &str {
        &self.names[a]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.order()
    }

    pub fn pow(&self, a: usize, k: i64) -> usize {
        let base = if k < 0 { self.inv(a) } else { a };
        (0..k.unsigned_abs()).fold(0, |acc, _| self.mul(acc, base))
    }

    pub fn element_order(&self, a: usize) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != 0 {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    pub fn is_abelian(&self) -> bool {
        self.elements()
            .all(|a| (0..a).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    pub fn commutes(&self, a: usize, b: usize) -> bool {
        self.mul(a, b) == self.mul(b, a)
    }

    /// `a b a^-1 b^-1`.
    pub fn commutator(&self, a: usize, b: usize) -> usize {
        self.mul(self.mul(a, b), self.mul(self.inv(a), self.inv(b)))
    }

    pub fn conjugate(&self, g: usize, x: usize) -> usize {
        self.mul(self.mul(g, x), self.inv(g))
    }

    /// Sorted list of central elements; always starts with 0.
    pub fn center(&self) -> Vec<usize> {
        self.elements()
            .filter(|&z| self.elements().all(|a| self.commutes(z, a)))
            .collect()
    }

    pub fn centralizer_size(&self, a: usize) -> usize {
        self.elements().filter(|&b| self.commutes(a, b)).count()
    }

    /// Sorted subgroup generated by `gens`.
    pub fn subgroup_generated(&self, gens: &[usize]) -> Vec<usize> {
        let mut seen = vec![false; self.order()];
        seen[0] = true;
        let mut queue = VecDeque::from([0]);
        while let Some(x) = queue.pop_front() {
            for &g in gens {
                let y = self.mul(x, g);
                if !std::mem::replace(&mut seen[y], true) {
                    queue.push_back(y);
                }
            }
        }
        self.elements().filter(|&x| seen[x]).collect()
    }

    pub fn is_subgroup(&self, set: &[usize]) -> bool {
        let members: BTreeSet<usize> = set.iter().copied().collect();
        members.contains(&0)
            && members
                .iter()
                .all(|&a| members.iter().all(|&b| members.contains(&self.mul(a, self.inv(b)))))
    }

    pub fn is_normal_subgroup(&self, set: &[usize]) -> bool {
        let members: BTreeSet<usize> = set.iter().copied().collect();
        self.is_subgroup(set)
            && members
                .iter()
                .all(|&x| self.elements().all(|g| members.contains(&self.conjugate(g, x))))
    }

    /// Smallest normal subgroup containing `gens`.
    pub fn normal_closure(&self, gens: &[usize]) -> Vec<usize> {
        let conjugates: BTreeSet<usize> = gens
            .iter()
            .flat_map(|&x| self.elements().map(move |g| (g, x)))
            .map(|(g, x)| self.conjugate(g, x))
            .collect();
        self.subgroup_generated(&conjugates.into_iter().collect::<Vec<_>>())
    }

    /// Every normal subgroup, sorted by size then lexicographically.
    pub fn normal_subgroups(&self) -> Vec<Vec<usize>> {
        let mut found: BTreeSet<Vec<usize>> = BTreeSet::new();
        found.insert(vec![0]);
        let closures: BTreeSet<Vec<usize>> = self.elements().map(|x| self.normal_closure(&[x])).collect();
        found.extend(closures.iter().cloned());
        loop {
            let current: Vec<Vec<usize>> = found.iter().cloned().collect();
            let mut added = false;
            for n in &current {
                for c in &closures {
                    let joined: Vec<usize> = n
                        .iter()
                        .chain(c)
                        .copied()
                        .collect::<BTreeSet<_>>()
                        .into_iter()
                        .collect();
                    let join = self.subgroup_generated(&joined);
                    added |= found.insert(join);
                }
            }
            if !added {
                break;
            }
        }
        let mut out: Vec<Vec<usize>> = found.into_iter().collect();
        out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        out
    }

    /// A small generating set: greedily add elements of large order.
    pub fn generators(&self) -> Vec<usize> {
        let mut by_order: Vec<usize> = self.elements().skip(1).collect();
        by_order.sort_by_key(|&a| std::cmp::Reverse(self.element_order(a)));
        let mut gens = Vec::new();
        let mut span = vec![0];
        for a in by_order {
            if span.len() == self.order() {
                break;
            }
            if span.binary_search(&a).is_err() {
                gens.push(a);
                span = self.subgroup_generated(&gens);
            }
        }
        gens
    }

    /// Isomorphism invariant of an element: (order, centralizer size).
    fn element_signature(&self, a: usize) -> (usize, usize) {
        (self.element_order(a), self.centralizer_size(a))
    }

    /// Sorted multiset of element signatures; equal for isomorphic groups.
    pub fn invariant(&self) -> Vec<(usize, usize)> {
        let mut v: Vec<_> = self.elements().map(|a| self.element_signature(a)).collect();
        v.sort_unstable();
        v
    }
}

fn all_permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut p: Vec<usize> = (0..n).collect();
    loop {
        out.push(p.clone());
        let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| p[i] < p[i + 1]) else {
            break;
        };
        let j = (i + 1..n).rev().find(|&j| p[j] > p[i]).expect("successor exists");
        p.swap(i, j);
        p[i + 1..].reverse();
    }
    out
}

fn is_even(p: &[usize]) -> bool {
    let inversions = (0..p.len())
        .flat_map(|i| (i + 1..p.len()).map(move |j| (i, j)))
        .filter(|&(i, j)| p[i] > p[j])
        .count();
    inversions % 2 == 0
}

/// Exhaustive check of the homomorphism law for a total map.
pub fn is_hom(map: &[usize], domain: &FiniteGroup, codomain: &FiniteGroup) -> bool {
    map.len() == domain.order()
        && map.iter().all(|&x| x < codomain.order())
        && domain.elements().all(|a| {
            domain
                .elements()
                .all(|b| map[domain.mul(a, b)] == codomain.mul(map[a], map[b]))
        })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupHom {
    pub domain: Arc<FiniteGroup>,
    pub codomain: Arc<FiniteGroup>,
    pub map: Vec<usize>,
}

impl GroupHom {
    pub fn new(domain: Arc<FiniteGroup>, codomain: Arc<FiniteGroup>, map: Vec<usize>) -> Result<Self, GroupError> {
        if map.len() != domain.order() {
            return Err(GroupError::MapLength {
                expected: domain.order(),
                found: map.len(),
            });
        }
        if !is_hom(&map, &domain, &codomain) {
            return Err(GroupError::NotHomomorphism);
        }
        Ok(GroupHom { domain, codomain, map })
    }

    pub fn identity(g: Arc<FiniteGroup>) -> Self {
        let map = g.elements().collect();
        GroupHom {
            domain: g.clone(),
            codomain: g,
            map,
        }
    }

    pub fn apply(&self, a: usize) -> usize {
        self.map[a]
    }

    pub fn is_surjective(&self) -> bool {
        let mut hit = vec![false; self.codomain.order()];
        self.map.iter().for_each(|&x| hit[x] = true);
        hit.into_iter().all(|h| h)
    }

    pub fn is_injective(&self) -> bool {
        self.kernel() == vec![0]
    }

    pub fn kernel(&self) -> Vec<usize> {
        self.domain.elements().filter(|&a| self.map[a] == 0).collect()
    }

    /// `self ∘ first`.
    pub fn after(&self, first: &GroupHom) -> GroupHom {
        GroupHom {
            domain: first.domain.clone(),
            codomain: self.codomain.clone(),
            map: first.map.iter().map(|&x| self.map[x]).collect(),
        }
    }

    /// Elements of the fibre over `x`, ascending.
    pub fn fiber(&self, x: usize) -> Vec<usize> {
        self.domain.elements().filter(|&a| self.map[a] == x).collect()
    }
}

/// `g / n` with cosets numbered by their smallest element, and the projection.
pub fn quotient(g: &Arc<FiniteGroup>, normal: &[usize]) -> Result<(Arc<FiniteGroup>, GroupHom), GroupError> {
    if !g.is_normal_subgroup(normal) {
        return Err(GroupError::NotNormal(normal.to_vec()));
    }
    let mut label = vec![usize::MAX; g.order()];
    let mut reps = Vec::new();
    for a in g.elements() {
        if label[a] == usize::MAX {
            for &n in normal {
                label[g.mul(a, n)] = reps.len();
            }
            reps.push(a);
        }
    }
    let table = reps
        .iter()
        .map(|&a| reps.iter().map(|&b| label[g.mul(a, b)]).collect())
        .collect();
    let names = reps.iter().map(|&a| format!("{}N", g.name(a))).collect();
    let q = Arc::new(FiniteGroup::trusted(table, names));
    let projection = GroupHom {
        domain: g.clone(),
        codomain: q.clone(),
        map: label,
    };
    Ok((q, projection))
}

/// `H / Z(H)` and the natural projection.
pub fn quotient_by_center(g: &Arc<FiniteGroup>) -> (Arc<FiniteGroup>, GroupHom) {
    quotient(g, &g.center()).expect("the center is normal")
}

/// Extends generator images to a map by breadth-first search over words.
/// Returns `None` when the assignment is inconsistent. The result is a
/// homomorphism on the subgroup generated by `gens` (unset elsewhere).
fn extend_on_generators(g: &FiniteGroup, h: &FiniteGroup, gens: &[usize], images: &[usize]) -> Option<Vec<usize>> {
    let mut map = vec![usize::MAX; g.order()];
    map[0] = 0;
    let mut queue = VecDeque::from([0]);
    while let Some(x) = queue.pop_front() {
        for (&gen, &img) in gens.iter().zip(images) {
            let y = g.mul(x, gen);
            let v = h.mul(map[x], img);
            if map[y] == usize::MAX {
                map[y] = v;
                queue.push_back(y);
            } else if map[y] != v {
                return None;
            }
        }
    }
    Some(map)
}

fn search_homs(g: &FiniteGroup, h: &FiniteGroup, bijective: bool, visit: &mut dyn FnMut(&[usize]) -> bool) {
    let gens = g.generators();
    if bijective && (g.order() != h.order() || g.invariant() != h.invariant()) {
        return;
    }
    let sig_g: Vec<_> = gens.iter().map(|&a| g.element_signature(a)).collect();
    let sig_h: Vec<_> = if bijective {
        h.elements().map(|a| h.element_signature(a)).collect()
    } else {
        Vec::new()
    };
    let mut images = Vec::with_capacity(gens.len());
    #[allow(clippy::too_many_arguments)]
    fn rec(
        g: &FiniteGroup,
        h: &FiniteGroup,
        gens: &[usize],
        images: &mut Vec<usize>,
        bijective: bool,
        sig_g: &[(usize, usize)],
        sig_h: &[(usize, usize)],
        visit: &mut dyn FnMut(&[usize]) -> bool,
    ) -> bool {
        let k = images.len();
        if k == gens.len() {
            let map = extend_on_generators(g, h, gens, images).expect("checked at last step");
            if bijective {
                let mut hit = vec![false; h.order()];
                if map.iter().any(|&x| std::mem::replace(&mut hit[x], true)) {
                    return true;
                }
            }
            return visit(&map);
        }
        let ord = g.element_order(gens[k]);
        for cand in h.elements() {
            if bijective && sig_h[cand] != sig_g[k] {
                continue;
            }
            if !ord.is_multiple_of(h.element_order(cand)) {
                continue;
            }
            images.push(cand);
            let ok = extend_on_generators(g, h, &gens[..=k], images).is_some();
            let keep_going = !ok || rec(g, h, gens, images, bijective, sig_g, sig_h, visit);
            images.pop();
            if !keep_going {
                return false;
            }
        }
        true
    }
    rec(g, h, &gens, &mut images, bijective, &sig_g, &sig_h, visit);
}

/// Every homomorphism `g -> h`.
pub fn homomorphisms(g: &FiniteGroup, h: &FiniteGroup) -> Vec<Vec<usize>> {
    let mut out = BTreeSet::new();
    search_homs(g, h, false, &mut |m| {
        out.insert(m.to_vec());
        true
    });
    out.into_iter().collect()
}

/// Some isomorphism `g -> h`, if the groups are isomorphic.
pub fn find_isomorphism(g: &FiniteGroup, h: &FiniteGroup) -> Option<Vec<usize>> {
    let mut found = None;
    search_homs(g, h, true, &mut |m| {
        found = Some(m.to_vec());
        false
    });
    found
}

pub fn are_isomorphic(g: &FiniteGroup, h: &FiniteGroup) -> bool {
    find_isomorphism(g, h).is_some()
}

/// The automorphism group of a structure under composition, with the
/// element-to-map action. Element 0 is the identity map.
pub fn aut_group(s: &SortedStructure) -> Result<(Arc<FiniteGroup>, Vec<SortedMap>), GroupError> {
    aut_group_within(s, structures::DEFAULT_MAX_ELEMENTS)
}

pub fn aut_group_within(s: &SortedStructure, bound: usize) -> Result<(Arc<FiniteGroup>, Vec<SortedMap>), GroupError> {
    let auts = structures::automorphisms_within(s, bound)?;
    Ok((Arc::new(group_of_maps(&auts)), auts))
}

/// Cayley table of a list of per-sort maps closed under composition, identity first.
pub fn group_of_maps(maps: &[SortedMap]) -> FiniteGroup {
    let index: HashMap<&SortedMap, usize> = maps.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let table = maps
        .iter()
        .map(|a| maps.iter().map(|b| index[&a.compose(b)]).collect())
        .collect();
    let names = (0..maps.len()).map(|i| format!("a{i}")).collect();
    FiniteGroup::trusted(table, names)
}
