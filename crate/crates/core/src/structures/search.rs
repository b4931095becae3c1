//! Backtracking isomorphism search.
//!
//! Elements are visited in global order (sort 0 first, then sort 1, ...) and
//! candidate images are tried in increasing order, so results come out in
//! lexicographic order of the image table and the identity is always the
//! first automorphism. Every constraint (relation tuple, function entry,
//! constant) is checked once, at the step where its last element is assigned.

use std::collections::HashSet;

use super::{SortedMap, SortedStructure, StructureError};

/// Default cap on the total number of elements for exhaustive searches.
pub const DEFAULT_MAX_ELEMENTS: usize = 12;

enum Constraint {
    /// `R_a(tuple)` holds; images must satisfy `R_b`.
    Tuple { relation: usize, elems: Vec<usize> },
    /// `f_a(args) = value`; images must satisfy `f_b(f(args)) = f(value)`.
    Entry {
        function: usize,
        args: Vec<usize>,
        value: usize,
    },
    /// `c_a = elem`; the image must be `c_b`.
    Constant { constant: usize, elem: usize },
}

struct Problem<'a> {
    a: &'a SortedStructure,
    b: &'a SortedStructure,
    /// Global index of (sort, i) is offsets[sort] + i.
    offsets: Vec<usize>,
    sort_of: Vec<usize>,
    /// Constraints whose largest global element index equals the key.
    triggered: Vec<Vec<Constraint>>,
    /// Isomorphism-invariant colour per global element, for `a` and `b`.
    colour_a: Vec<Vec<usize>>,
    colour_b: Vec<Vec<usize>>,
}

fn offsets(sizes: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(sizes.len());
    let mut acc = 0;
    for &n in sizes {
        out.push(acc);
        acc += n;
    }
    out
}

/// Counts of occurrences of each element per (symbol, position).
fn colours(s: &SortedStructure, offsets: &[usize]) -> Vec<Vec<usize>> {
    let total = s.total_elements();
    let mut width = 0;
    for sym in &s.signature.relations {
        width += sym.sorts.len();
    }
    for sym in &s.signature.functions {
        width += sym.args.len() + 1;
    }
    width += s.signature.constants.len();
    let mut out = vec![vec![0usize; width]; total];
    let mut col = 0;
    for (sym, tuples) in s.signature.relations.iter().zip(&s.relations) {
        for t in tuples {
            for (p, (&e, &sort)) in t.iter().zip(&sym.sorts).enumerate() {
                out[offsets[sort] + e][col + p] += 1;
            }
        }
        col += sym.sorts.len();
    }
    for (sym, table) in s.signature.functions.iter().zip(&s.functions) {
        for (args, &v) in table {
            for (p, (&e, &sort)) in args.iter().zip(&sym.args).enumerate() {
                out[offsets[sort] + e][col + p] += 1;
            }
            out[offsets[sym.target] + v][col + sym.args.len()] += 1;
        }
        col += sym.args.len() + 1;
    }
    for (sym, &c) in s.signature.constants.iter().zip(&s.constants) {
        out[offsets[sym.sort] + c][col] += 1;
        col += 1;
    }
    out
}

impl<'a> Problem<'a> {
    fn new(a: &'a SortedStructure, b: &'a SortedStructure) -> Self {
        let offs = offsets(&a.sizes);
        let total = a.total_elements();
        let mut sort_of = Vec::with_capacity(total);
        for (s, &n) in a.sizes.iter().enumerate() {
            sort_of.extend(std::iter::repeat_n(s, n));
        }
        let mut triggered: Vec<Vec<Constraint>> = (0..total).map(|_| Vec::new()).collect();
        let sig = &a.signature;
        for (r, (sym, tuples)) in sig.relations.iter().zip(&a.relations).enumerate() {
            for t in tuples {
                let elems: Vec<usize> = t.iter().zip(&sym.sorts).map(|(&e, &s)| offs[s] + e).collect();
                if let Some(&last) = elems.iter().max() {
                    triggered[last].push(Constraint::Tuple { relation: r, elems });
                }
            }
        }
        for (f, (sym, table)) in sig.functions.iter().zip(&a.functions).enumerate() {
            for (args, &v) in table {
                let args: Vec<usize> = args.iter().zip(&sym.args).map(|(&e, &s)| offs[s] + e).collect();
                let value = offs[sym.target] + v;
                let last = args.iter().copied().chain([value]).max().unwrap_or(value);
                triggered[last].push(Constraint::Entry {
                    function: f,
                    args,
                    value,
                });
            }
        }
        for (c, (sym, &v)) in sig.constants.iter().zip(&a.constants).enumerate() {
            let elem = offs[sym.sort] + v;
            triggered[elem].push(Constraint::Constant { constant: c, elem });
        }
        Problem {
            a,
            b,
            colour_a: colours(a, &offs),
            colour_b: colours(b, &offs),
            offsets: offs,
            sort_of,
            triggered,
        }
    }

    fn local(&self, g: usize) -> usize {
        g - self.offsets[self.sort_of[g]]
    }

    fn satisfied(&self, c: &Constraint, image: &[usize]) -> bool {
        let local_tuple = |elems: &[usize]| -> Vec<usize> { elems.iter().map(|&g| self.local(image[g])).collect() };
        match c {
            Constraint::Tuple { relation, elems } => self.b.relations[*relation].contains(&local_tuple(elems)),
            Constraint::Entry { function, args, value } => {
                self.b.functions[*function].get(&local_tuple(args)) == Some(&self.local(image[*value]))
            }
            Constraint::Constant { constant, elem } => self.b.constants[*constant] == self.local(image[*elem]),
        }
    }

    /// Visits every isomorphism in lexicographic order until `visit` returns false.
    fn run(&self, visit: &mut dyn FnMut(&SortedMap) -> bool) {
        let total = self.a.total_elements();
        let mut image = vec![usize::MAX; total];
        let mut used = vec![false; total];
        self.extend(0, &mut image, &mut used, visit);
    }

    fn extend(
        &self,
        g: usize,
        image: &mut Vec<usize>,
        used: &mut Vec<bool>,
        visit: &mut dyn FnMut(&SortedMap) -> bool,
    ) -> bool {
        if g == image.len() {
            let maps = self
                .a
                .sizes
                .iter()
                .enumerate()
                .map(|(s, &n)| (0..n).map(|i| self.local(image[self.offsets[s] + i])).collect())
                .collect();
            return visit(&SortedMap::new(maps));
        }
        let sort = self.sort_of[g];
        let start = self.offsets[sort];
        for cand in start..start + self.a.sizes[sort] {
            if used[cand] || self.colour_a[g] != self.colour_b[cand] {
                continue;
            }
            image[g] = cand;
            if self.triggered[g].iter().all(|c| self.satisfied(c, image)) {
                used[cand] = true;
                let keep_going = self.extend(g + 1, image, used, visit);
                used[cand] = false;
                if !keep_going {
                    image[g] = usize::MAX;
                    return false;
                }
            }
            image[g] = usize::MAX;
        }
        true
    }
}

fn compatible(a: &SortedStructure, b: &SortedStructure) -> Result<bool, StructureError> {
    if a.signature != b.signature {
        return Err(StructureError::SignatureMismatch);
    }
    Ok(a.sizes == b.sizes && a.relations.iter().zip(&b.relations).all(|(x, y)| x.len() == y.len()))
}

fn check_bound(s: &SortedStructure, bound: usize) -> Result<(), StructureError> {
    let total = s.total_elements();
    if total > bound {
        return Err(StructureError::SizeBoundExceeded { total, bound });
    }
    Ok(())
}

/// Visits isomorphisms `a -> b` in lexicographic order until `visit` returns false.
pub fn for_each_isomorphism(
    a: &SortedStructure,
    b: &SortedStructure,
    bound: usize,
    mut visit: impl FnMut(&SortedMap) -> bool,
) -> Result<(), StructureError> {
    check_bound(a, bound)?;
    if compatible(a, b)? {
        Problem::new(a, b).run(&mut visit);
    }
    Ok(())
}

pub fn isomorphisms_within(
    a: &SortedStructure,
    b: &SortedStructure,
    bound: usize,
) -> Result<Vec<SortedMap>, StructureError> {
    let mut out = Vec::new();
    for_each_isomorphism(a, b, bound, |m| {
        out.push(m.clone());
        true
    })?;
    Ok(out)
}

/// All isomorphisms `a -> b`, lexicographically sorted.
pub fn isomorphisms(a: &SortedStructure, b: &SortedStructure) -> Result<Vec<SortedMap>, StructureError> {
    isomorphisms_within(a, b, DEFAULT_MAX_ELEMENTS)
}

pub fn automorphisms_within(s: &SortedStructure, bound: usize) -> Result<Vec<SortedMap>, StructureError> {
    isomorphisms_within(s, s, bound)
}

/// All automorphisms, lexicographically sorted; the identity comes first.
pub fn automorphisms(s: &SortedStructure) -> Result<Vec<SortedMap>, StructureError> {
    automorphisms_within(s, DEFAULT_MAX_ELEMENTS)
}

/// Lexicographically least isomorphism, if any.
pub fn first_isomorphism(
    a: &SortedStructure,
    b: &SortedStructure,
    bound: usize,
) -> Result<Option<SortedMap>, StructureError> {
    let mut found = None;
    for_each_isomorphism(a, b, bound, |m| {
        found = Some(m.clone());
        false
    })?;
    Ok(found)
}

/// Steps `perm` to its lexicographic successor; false when it was the last.
fn next_permutation(perm: &mut [usize]) -> bool {
    let n = perm.len();
    if n < 2 {
        return false;
    }
    let Some(i) = (0..n - 1).rev().find(|&i| perm[i] < perm[i + 1]) else {
        return false;
    };
    let j = (i + 1..n).rev().find(|&j| perm[j] > perm[i]).expect("successor exists");
    perm.swap(i, j);
    perm[i + 1..].reverse();
    true
}

/// Distinct relabelings of `s` over its own universe together with a
/// relabeling map producing each, in order of first appearance when
/// per-sort permutations are enumerated lexicographically. Stops after
/// `cap` copies or once all `prod(n_s!) / |Aut|` copies are found.
pub fn canonical_copies_with_maps(
    s: &SortedStructure,
    cap: usize,
    bound: usize,
) -> Result<Vec<(SortedStructure, SortedMap)>, StructureError> {
    let aut = automorphisms_within(s, bound)?.len();
    let perms: u128 = s.sizes.iter().map(|&n| (1..=n as u128).product::<u128>()).product();
    let expected = perms / aut as u128;
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    let mut current = SortedMap::identity(&s.sizes);
    while out.len() < cap && (out.len() as u128) < expected {
        let copy = s.relabel(&current)?;
        if seen.insert(copy.clone()) {
            out.push((copy, current.clone()));
        }
        let mut advanced = false;
        for sort in (0..current.maps.len()).rev() {
            if next_permutation(&mut current.maps[sort]) {
                for later in sort + 1..current.maps.len() {
                    current.maps[later].sort_unstable();
                }
                advanced = true;
                break;
            }
        }
        if !advanced {
            break;
        }
    }
    Ok(out)
}

pub fn canonical_copies_within(
    s: &SortedStructure,
    cap: usize,
    bound: usize,
) -> Result<Vec<SortedStructure>, StructureError> {
    Ok(canonical_copies_with_maps(s, cap, bound)?
        .into_iter()
        .map(|(c, _)| c)
        .collect())
}

/// Up to `cap` pairwise distinct isomorphic copies of `s` on its own universe;
/// the first copy is `s` itself.
pub fn canonical_copies(s: &SortedStructure, cap: usize) -> Result<Vec<SortedStructure>, StructureError> {
    canonical_copies_within(s, cap, DEFAULT_MAX_ELEMENTS)
}
