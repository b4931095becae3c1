//! Uniform reconstruction of a two-sorted structure from its first sort.
//!
//! A family of weakly lifted copies `(B_s, psi_s)` is fixed. For a target `A`
//! isomorphic to the first sorts `A_s`, the matched triples `(pi, g, b)` over
//! `A` form a structure whose quotient by `E` is again a copy of `B`, built
//! from `A` alone. Members are indexed `0..n`; member 0 is the base of the
//! enumeration.
//!
//! Relations of the triple structure are evaluated after moving every
//! coordinate to the iso tuple of the first coordinate along `psi`; with that
//! reading the relation is `E`-invariant. The raw reading (test the `b`
//! coordinates as they are) is kept for the report.

mod claims;
pub mod fixtures;

use std::collections::{HashMap, HashSet};

use serde::Serialize;
use serde_json::{json, Value};

use crate::groups::{GroupError, SectionClass};
use crate::structures::{
    canonical_copies_with_maps, first_isomorphism, isomorphisms_within, Element, SortedMap, SortedStructure,
    StructureError,
};
use crate::ucp::{assemble_blocked, PsiChoice, UcpError, UniConstructionProblem};

pub use claims::{verify_claims, verify_claims_within, ClaimCheck, ClaimsReport};

/// Default cap on the number of matched triples enumerated.
pub const DEFAULT_TRIPLE_BOUND: u128 = 100_000;
/// Cap on `|X|^arity` summed over relations in the exhaustive relation checks.
pub const RELATION_CHECK_BOUND: u128 = 20_000_000;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum UniformError {
    #[error("structure is not relational")]
    NotRelational,
    #[error("expected a two-sorted structure, found {0} sorts")]
    NotTwoSorted(usize),
    #[error("member {0}: section is not a weak splitting of the restriction map")]
    NotWeakSplitting(usize),
    #[error("family is empty")]
    EmptyFamily,
    #[error("member {0} is not isomorphic to member 0")]
    NotIsomorphic(usize),
    #[error("target does not match the first sort of the family: {0}")]
    TargetMismatch(String),
    #[error("{what}: {total} exceeds the bound {bound}")]
    BoundExceeded {
        what: &'static str,
        total: u128,
        bound: u128,
    },
    #[error("verification failed: {0}")]
    ClaimFailed(String),
    #[error("invalid section document: {0}")]
    Json(String),
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Ucp(#[from] UcpError),
}

/// One member `(B_s, psi_s)` of a family.
#[derive(Clone, Debug)]
pub struct LiftedCopy {
    pub problem: UniConstructionProblem,
    pub class: SectionClass,
    lookup: HashMap<Vec<usize>, usize>,
}

impl LiftedCopy {
    pub fn new(b: &SortedStructure, psi: PsiChoice, bound: usize) -> Result<Self, UniformError> {
        Self::member(0, b, psi, bound)
    }

    fn member(id: usize, b: &SortedStructure, psi: PsiChoice, bound: usize) -> Result<Self, UniformError> {
        if b.sort_count() != 2 {
            return Err(UniformError::NotTwoSorted(b.sort_count()));
        }
        if !b.is_relational() {
            return Err(UniformError::NotRelational);
        }
        let problem = assemble_blocked(b, &[0], psi, bound)?;
        if problem.report.f_weak_split != Some(true) {
            return Err(UniformError::NotWeakSplitting(id));
        }
        let class = problem.report.psi_class.ok_or(UniformError::NotWeakSplitting(id))?;
        let lookup = problem
            .g_maps
            .iter()
            .enumerate()
            .map(|(i, m)| (m.maps[0].clone(), i))
            .collect();
        Ok(LiftedCopy { problem, class, lookup })
    }

    pub fn b(&self) -> &SortedStructure {
        &self.problem.b
    }

    pub fn a(&self) -> &SortedStructure {
        &self.problem.a
    }

    /// `psi_s(u)` for an automorphism `u` of `A_s`, given by its permutation.
    pub fn lift(&self, u: &[usize]) -> &SortedMap {
        let g = self.lookup[u];
        let psi = self.problem.psi.as_ref().expect("lifted copies carry a section");
        &self.problem.h_maps[psi[g]]
    }

    /// The section as `(automorphism of A, automorphism of B)` pairs.
    pub fn psi_pairs(&self) -> Vec<(Vec<usize>, SortedMap)> {
        let psi = self.problem.psi.as_ref().expect("lifted copies carry a section");
        self.problem
            .g_maps
            .iter()
            .zip(psi)
            .map(|(g, &h)| (g.maps[0].clone(), self.problem.h_maps[h].clone()))
            .collect()
    }

    /// Whether only the identity of `B_s` fixes `A_s` pointwise.
    pub fn kernel_trivial(&self) -> bool {
        self.problem.phi.kernel().len() == 1
    }
}

/// Pairwise isomorphic lifted copies.
#[derive(Clone, Debug)]
pub struct Family {
    pub members: Vec<LiftedCopy>,
    pub bound: usize,
}

impl Family {
    /// Explicit members, checked against member 0.
    pub fn from_members(members: Vec<(SortedStructure, PsiChoice)>, bound: usize) -> Result<Self, UniformError> {
        if members.is_empty() {
            return Err(UniformError::EmptyFamily);
        }
        let mut out: Vec<LiftedCopy> = Vec::with_capacity(members.len());
        for (i, (b, psi)) in members.into_iter().enumerate() {
            let copy = LiftedCopy::member(i, &b, psi, bound)?;
            if i > 0 && first_isomorphism(out[0].b(), copy.b(), bound)?.is_none() {
                return Err(UniformError::NotIsomorphic(i));
            }
            out.push(copy);
        }
        Ok(Family { members: out, bound })
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn all_kernels_trivial(&self) -> bool {
        self.members.iter().all(LiftedCopy::kernel_trivial)
    }
}

/// `n` members: member 0 is `(b, psi)`, member `i` is the `i`-th distinct
/// relabeling of `b` with the section transported along the relabeling.
/// Relabelings are reused cyclically when `b` has fewer than `n` copies.
pub fn build_family(b: &SortedStructure, psi: PsiChoice, n: usize, bound: usize) -> Result<Family, UniformError> {
    if n == 0 {
        return Err(UniformError::EmptyFamily);
    }
    let base = LiftedCopy::member(0, b, psi, bound)?;
    let copies = canonical_copies_with_maps(b, n, bound)?;
    let mut members = vec![base];
    for i in 1..n {
        let (copy, f) = &copies[i % copies.len()];
        let psi = transport(&members[0], copy, f, bound)?;
        members.push(LiftedCopy::member(i, copy, PsiChoice::Given(psi), bound)?);
    }
    Ok(Family { members, bound })
}

/// `psi'(g') = f ∘ psi(f_A^-1 ∘ g' ∘ f_A) ∘ f^-1` as indices for `copy`.
fn transport(
    base: &LiftedCopy,
    copy: &SortedStructure,
    f: &SortedMap,
    bound: usize,
) -> Result<Vec<usize>, UniformError> {
    let target = assemble_blocked(copy, &[0], PsiChoice::None, bound)?;
    let f_inv = f.inverse();
    let fa = f.restrict(&[0]);
    let fa_inv = fa.inverse();
    let h_index: HashMap<&SortedMap, usize> = target.h_maps.iter().enumerate().map(|(i, m)| (m, i)).collect();
    target
        .g_maps
        .iter()
        .map(|g| {
            let u = fa_inv.compose(g).compose(&fa);
            let lifted = f.compose(base.lift(&u.maps[0])).compose(&f_inv);
            h_index.get(&lifted).copied().ok_or(UniformError::NotWeakSplitting(0))
        })
        .collect()
}

/// Section of `b`'s restriction map from explicit pairs.
pub fn psi_from_pairs(
    b: &SortedStructure,
    pairs: &[(Vec<usize>, SortedMap)],
    bound: usize,
) -> Result<Vec<usize>, UniformError> {
    let problem = assemble_blocked(b, &[0], PsiChoice::None, bound)?;
    let given: HashMap<&Vec<usize>, &SortedMap> = pairs.iter().map(|(a, h)| (a, h)).collect();
    problem
        .g_maps
        .iter()
        .map(|g| {
            let h = given
                .get(&g.maps[0])
                .ok_or_else(|| UniformError::Json(format!("no lift given for {:?}", g.maps[0])))?;
            problem
                .h_maps
                .iter()
                .position(|m| m == *h)
                .ok_or_else(|| UniformError::Json(format!("lift of {:?} is not an automorphism", g.maps[0])))
        })
        .collect()
}

/// `[{"a": perm, "b": [[..], [..]]}, ..]`
pub fn psi_to_json(copy: &LiftedCopy) -> Value {
    Value::Array(
        copy.psi_pairs()
            .into_iter()
            .map(|(a, h)| json!({"a": a, "b": h.maps}))
            .collect(),
    )
}

pub fn psi_from_json(v: &Value) -> Result<Vec<(Vec<usize>, SortedMap)>, UniformError> {
    #[derive(serde::Deserialize)]
    struct Pair {
        a: Vec<usize>,
        b: Vec<Vec<usize>>,
    }
    let pairs: Vec<Pair> = serde_json::from_value(v.clone()).map_err(|e| UniformError::Json(e.to_string()))?;
    Ok(pairs.into_iter().map(|p| (p.a, SortedMap::new(p.b))).collect())
}

/// `(pi, g, b)`: an iso tuple onto the target, a commuting family of
/// isomorphisms extending it, and a matching thread of elements.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MatchedTriple {
    /// `pi[s]`: `A_s -> A` as a permutation of the first sort.
    pub pi: Vec<Vec<usize>>,
    /// Position of `pi[s]` in the sorted list of isomorphisms `A_s -> A`.
    pub pi_index: Vec<usize>,
    /// `g_{0,t}: B_0 -> B_t`; entry 0 is the identity.
    pub base: Vec<SortedMap>,
    /// `b[s]` in `B_s`.
    pub b: Vec<Element>,
}

impl MatchedTriple {
    /// `g_{s,t} = g_{0,t} ∘ g_{0,s}^-1`.
    pub fn g(&self, s: usize, t: usize) -> SortedMap {
        self.base[t].compose(&self.base[s].inverse())
    }

    pub fn sort(&self) -> usize {
        self.b[0].0
    }

    /// `h_{pi,s,t} = pi_t^-1 ∘ pi_s`.
    pub fn h(&self, s: usize, t: usize) -> Vec<usize> {
        let inv = invert(&self.pi[t]);
        self.pi[s].iter().map(|&x| inv[x]).collect()
    }
}

fn invert(p: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; p.len()];
    for (i, &x) in p.iter().enumerate() {
        inv[x] = i;
    }
    inv
}

/// The target together with everything the enumeration needs.
pub(crate) struct Frame<'a> {
    pub fam: &'a Family,
    /// Per member, sorted isomorphisms `A_s -> A`.
    pub isos: Vec<Vec<Vec<usize>>>,
    /// Per member `t`, the isomorphisms `B_0 -> B_t` keyed by their first-sort part.
    pub ext: Vec<HashMap<Vec<usize>, Vec<SortedMap>>>,
}

impl<'a> Frame<'a> {
    pub fn new(target: &'a SortedStructure, fam: &'a Family) -> Result<Self, UniformError> {
        if fam.is_empty() {
            return Err(UniformError::EmptyFamily);
        }
        let a0 = fam.members[0].a();
        if target.signature != a0.signature || target.sizes != a0.sizes {
            return Err(UniformError::TargetMismatch("signature or size differs".into()));
        }
        let mut isos = Vec::new();
        for m in &fam.members {
            let mut list: Vec<Vec<usize>> = isomorphisms_within(m.a(), target, fam.bound)?
                .into_iter()
                .map(|f| f.maps[0].clone())
                .collect();
            list.sort();
            isos.push(list);
        }
        let b0 = fam.members[0].b();
        let mut ext = vec![HashMap::new()];
        for m in &fam.members[1..] {
            let mut by_restriction: HashMap<Vec<usize>, Vec<SortedMap>> = HashMap::new();
            for f in isomorphisms_within(b0, m.b(), fam.bound)? {
                by_restriction.entry(f.maps[0].clone()).or_default().push(f);
            }
            for list in by_restriction.values_mut() {
                list.sort();
            }
            ext.push(by_restriction);
        }
        Ok(Frame { fam, isos, ext })
    }

    pub fn members(&self) -> usize {
        self.fam.len()
    }

    /// Upper bound on `|X|`.
    pub fn estimate(&self) -> u128 {
        let pis: u128 = self.isos.iter().map(|l| l.len() as u128).product();
        let exts: u128 = self.ext[1..]
            .iter()
            .map(|m| m.values().map(Vec::len).max().unwrap_or(0) as u128)
            .product();
        pis * exts * self.fam.members[0].b().total_elements() as u128
    }

    /// Extension choices for a fixed iso tuple, one list per member `t >= 1`.
    fn extensions(&self, pi: &[&Vec<usize>]) -> Vec<&[SortedMap]> {
        (1..self.members())
            .map(|t| {
                let inv = invert(pi[t]);
                let h: Vec<usize> = pi[0].iter().map(|&x| inv[x]).collect();
                self.ext[t].get(&h).map(Vec::as_slice).unwrap_or(&[])
            })
            .collect()
    }

    /// Every matched triple, iso tuples in lexicographic order (last member
    /// fastest), then extensions, then `b_0` over the elements of `B_0`.
    pub fn enumerate(&self, bound: u128) -> Result<Vec<MatchedTriple>, UniformError> {
        let total = self.estimate();
        if total > bound {
            return Err(UniformError::BoundExceeded {
                what: "matched triples",
                total,
                bound,
            });
        }
        let mut out = Vec::new();
        if self.isos.iter().any(Vec::is_empty) {
            return Ok(out);
        }
        for_each_index(&self.isos.iter().map(Vec::len).collect::<Vec<_>>(), |pi_index| {
            self.push_fibre(pi_index, None, &mut out);
            true
        });
        Ok(out)
    }

    /// Triples over the first iso tuple and the first extension choice.
    pub fn representatives(&self) -> Result<Vec<MatchedTriple>, UniformError> {
        if self.isos.iter().any(Vec::is_empty) {
            return Err(UniformError::TargetMismatch(
                "target is not isomorphic to the first sort".into(),
            ));
        }
        let mut out = Vec::new();
        self.push_fibre(&vec![0; self.members()], Some(1), &mut out);
        Ok(out)
    }

    fn push_fibre(&self, pi_index: &[usize], limit: Option<usize>, out: &mut Vec<MatchedTriple>) {
        let pi: Vec<&Vec<usize>> = pi_index.iter().zip(&self.isos).map(|(&i, l)| &l[i]).collect();
        let ext = self.extensions(&pi);
        let b0 = self.fam.members[0].b();
        let elements: Vec<Element> = b0.elements().collect();
        let mut taken = 0;
        for_each_index(&ext.iter().map(|l| l.len()).collect::<Vec<_>>(), |choice| {
            let mut base = vec![SortedMap::identity(&b0.sizes)];
            base.extend(choice.iter().zip(&ext).map(|(&c, l)| l[c].clone()));
            for &e in &elements {
                out.push(MatchedTriple {
                    pi: pi.iter().map(|p| (*p).clone()).collect(),
                    pi_index: pi_index.to_vec(),
                    b: base.iter().map(|g| g.apply_element(e)).collect(),
                    base: base.clone(),
                });
            }
            taken += 1;
            limit.is_none_or(|l| taken < l)
        });
    }

    /// `psi_s(to^-1 ∘ from)` for isomorphisms `from, to: A_s -> A`.
    pub fn change(&self, s: usize, from: &[usize], to: &[usize]) -> &SortedMap {
        let inv = invert(to);
        let u: Vec<usize> = from.iter().map(|&x| inv[x]).collect();
        self.fam.members[s].lift(&u)
    }
}

/// Calls `f` on every index vector below `sizes`, last position fastest,
/// until `f` returns false. An empty `sizes` yields one empty vector.
fn for_each_index(sizes: &[usize], mut f: impl FnMut(&[usize]) -> bool) {
    if sizes.contains(&0) {
        return;
    }
    let mut idx = vec![0; sizes.len()];
    loop {
        if !f(&idx) {
            return;
        }
        let mut pos = sizes.len();
        loop {
            if pos == 0 {
                return;
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < sizes[pos] {
                break;
            }
            idx[pos] = 0;
        }
    }
}

/// All matched triples over `a`, in canonical order.
pub fn matched_triples(a: &SortedStructure, fam: &Family) -> Result<Vec<MatchedTriple>, UniformError> {
    matched_triples_within(a, fam, DEFAULT_TRIPLE_BOUND)
}

pub fn matched_triples_within(
    a: &SortedStructure,
    fam: &Family,
    bound: u128,
) -> Result<Vec<MatchedTriple>, UniformError> {
    match Frame::new(a, fam) {
        Err(UniformError::TargetMismatch(_)) => Ok(Vec::new()),
        other => other?.enumerate(bound),
    }
}

/// `x1 E x2`: for every member, `psi_s((pi1_s^-1 ∘ pi2_s)^-1)` sends `b1_s` to `b2_s`.
pub fn e_equiv(fam: &Family, x1: &MatchedTriple, x2: &MatchedTriple) -> bool {
    fam.members.iter().enumerate().all(|(s, m)| {
        let inv = invert(&x2.pi[s]);
        let u: Vec<usize> = x1.pi[s].iter().map(|&x| inv[x]).collect();
        m.lift(&u).apply_element(x1.b[s]) == x2.b[s]
    })
}

/// Triples whose thread is `pi_s^-1(a)` in every member.
pub fn k_class(element: usize, a: &SortedStructure, fam: &Family) -> Result<Vec<MatchedTriple>, UniformError> {
    Ok(matched_triples(a, fam)?
        .into_iter()
        .filter(|x| in_k(x, element))
        .collect())
}

pub(crate) fn in_k(x: &MatchedTriple, element: usize) -> bool {
    x.pi.iter().zip(&x.b).all(|(p, &b)| b == (0, invert(p)[element]))
}

/// Precomputed relation tests on a list of triples.
pub(crate) struct Evaluator<'f, 'a> {
    pub frame: &'f Frame<'a>,
    /// `norm[x][s][p] = psi_s(iso_p^-1 ∘ pi_s)(b_s)`: the thread of `x` moved
    /// to the `p`-th isomorphism `A_s -> A`.
    norm: Vec<Vec<Vec<Element>>>,
    relations: Vec<Vec<HashSet<Vec<usize>>>>,
}

impl<'f, 'a> Evaluator<'f, 'a> {
    pub fn new(frame: &'f Frame<'a>, xs: &[MatchedTriple]) -> Self {
        let norm = xs
            .iter()
            .map(|x| {
                (0..frame.members())
                    .map(|s| {
                        frame.isos[s]
                            .iter()
                            .map(|p| frame.change(s, &x.pi[s], p).apply_element(x.b[s]))
                            .collect()
                    })
                    .collect()
            })
            .collect();
        let relations = frame
            .fam
            .members
            .iter()
            .map(|m| m.b().relations.iter().map(|r| r.iter().cloned().collect()).collect())
            .collect();
        Evaluator { frame, norm, relations }
    }

    pub fn equiv(&self, xs: &[MatchedTriple], i: usize, j: usize) -> bool {
        (0..self.frame.members()).all(|s| self.norm[i][s][xs[j].pi_index[s]] == xs[j].b[s])
    }

    /// Relation `r` in member `s` on the tuple `t`, coordinates moved to the
    /// iso tuple of `t[0]`.
    pub fn holds_in(&self, xs: &[MatchedTriple], r: usize, s: usize, t: &[usize]) -> bool {
        let p = xs[t[0]].pi_index[s];
        let tuple: Vec<usize> = t.iter().map(|&i| self.norm[i][s][p].1).collect();
        self.relations[s][r].contains(&tuple)
    }

    /// Relation `r` in member `s` on the raw `b_s` coordinates.
    pub fn holds_raw(&self, xs: &[MatchedTriple], r: usize, s: usize, t: &[usize]) -> bool {
        let tuple: Vec<usize> = t.iter().map(|&i| xs[i].b[s].1).collect();
        self.relations[s][r].contains(&tuple)
    }

    pub fn holds(&self, xs: &[MatchedTriple], r: usize, t: &[usize]) -> bool {
        (0..self.frame.members()).any(|s| self.holds_in(xs, r, s, t))
    }
}

/// How the quotient is built.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum QuotientMode {
    /// One fibre of triples: first iso tuple, first extension choice.
    Representative,
    /// All matched triples, classes computed and checked exhaustively.
    Full,
}

/// The quotient by `E` and, for every quotient element, the index of its
/// least triple in `triples`.
#[derive(Clone, Debug)]
pub struct Quotient {
    pub mode: QuotientMode,
    pub structure: SortedStructure,
    pub triples: Vec<MatchedTriple>,
    /// `class_of[x]` is the quotient element `(sort, index)` of triple `x`.
    pub class_of: Vec<Element>,
    pub representatives: Vec<Vec<usize>>,
}

pub fn build_quotient(a: &SortedStructure, fam: &Family, mode: QuotientMode) -> Result<Quotient, UniformError> {
    build_quotient_within(a, fam, mode, DEFAULT_TRIPLE_BOUND)
}

pub fn build_quotient_within(
    a: &SortedStructure,
    fam: &Family,
    mode: QuotientMode,
    bound: u128,
) -> Result<Quotient, UniformError> {
    let frame = Frame::new(a, fam)?;
    let triples = match mode {
        QuotientMode::Representative => frame.representatives()?,
        QuotientMode::Full => frame.enumerate(bound)?,
    };
    if triples.is_empty() {
        return Err(UniformError::TargetMismatch("no matched triples".into()));
    }
    let ev = Evaluator::new(&frame, &triples);
    let labels = match mode {
        QuotientMode::Representative => (0..triples.len()).collect(),
        QuotientMode::Full => {
            let classes = claims::EClasses::compute(&ev, &triples);
            if let Some(why) = classes.equivalence_failure() {
                return Err(UniformError::ClaimFailed(why));
            }
            let check = claims::relation_checks(&ev, &triples, &classes.labels, RELATION_CHECK_BOUND)?;
            if !check.exists_forall || !check.congruence {
                return Err(UniformError::ClaimFailed(check.detail()));
            }
            classes.labels
        }
    };
    assemble_quotient(mode, fam, &ev, triples, &labels)
}

/// `labels[x]` is the least triple index of the class of `x`.
fn assemble_quotient(
    mode: QuotientMode,
    fam: &Family,
    ev: &Evaluator,
    triples: Vec<MatchedTriple>,
    labels: &[usize],
) -> Result<Quotient, UniformError> {
    let b0 = fam.members[0].b();
    let mut representatives = vec![Vec::new(); 2];
    let mut class_index: HashMap<usize, Element> = HashMap::new();
    for (x, t) in triples.iter().enumerate() {
        if labels[x] == x {
            let sort = t.sort();
            class_index.insert(x, (sort, representatives[sort].len()));
            representatives[sort].push(x);
        }
    }
    let class_of: Vec<Element> = labels.iter().map(|l| class_index[l]).collect();
    let sizes = vec![representatives[0].len(), representatives[1].len()];
    let mut q = SortedStructure::new(b0.signature.clone(), sizes.clone());
    for (r, sym) in b0.signature.relations.iter().enumerate() {
        let dims: Vec<usize> = sym.sorts.iter().map(|&s| sizes[s]).collect();
        let mut found = Vec::new();
        for_each_index(&dims, |idx| {
            let reps: Vec<usize> = idx
                .iter()
                .zip(&sym.sorts)
                .map(|(&i, &s)| representatives[s][i])
                .collect();
            if ev.holds(&triples, r, &reps) {
                found.push(idx.to_vec());
            }
            true
        });
        for t in found {
            q.insert(&sym.name, &t)?;
        }
    }
    Ok(Quotient {
        mode,
        structure: q,
        triples,
        class_of,
        representatives,
    })
}

/// `F(A)`: the quotient with each class `k(a)` renamed to `a`.
#[derive(Clone, Debug)]
pub struct UniformOutput {
    pub structure: SortedStructure,
    pub quotient: Quotient,
    /// `f_a[a]` is the index of the first-sort class `k(a)` in the quotient.
    pub f_a: Vec<usize>,
}

pub fn uniform_f(a: &SortedStructure, fam: &Family, mode: QuotientMode) -> Result<UniformOutput, UniformError> {
    uniform_f_within(a, fam, mode, DEFAULT_TRIPLE_BOUND)
}

pub fn uniform_f_within(
    a: &SortedStructure,
    fam: &Family,
    mode: QuotientMode,
    bound: u128,
) -> Result<UniformOutput, UniformError> {
    let quotient = build_quotient_within(a, fam, mode, bound)?;
    let n = a.sizes[0];
    let mut f_a = Vec::with_capacity(n);
    for element in 0..n {
        let classes: HashSet<Element> = quotient
            .triples
            .iter()
            .zip(&quotient.class_of)
            .filter(|(x, _)| in_k(x, element))
            .map(|(_, &c)| c)
            .collect();
        if classes.len() != 1 {
            return Err(UniformError::ClaimFailed(format!(
                "k({element}) meets {} classes",
                classes.len()
            )));
        }
        let (sort, idx) = classes.into_iter().next().expect("one class");
        debug_assert_eq!(sort, 0);
        f_a.push(idx);
    }
    let first_sort = quotient.structure.sizes[0];
    let mut seen = vec![false; first_sort];
    if f_a.len() != first_sort || f_a.iter().any(|&c| std::mem::replace(&mut seen[c], true)) {
        return Err(UniformError::ClaimFailed(
            "first-sort classes are not the classes k(a)".into(),
        ));
    }
    let rename = SortedMap::new(vec![invert(&f_a), (0..quotient.structure.sizes[1]).collect()]);
    let structure = quotient.structure.relabel(&rename)?;
    if structure.reduct(&[0])? != *a {
        return Err(UniformError::ClaimFailed("first sort of F(A) differs from A".into()));
    }
    for (s, m) in fam.members.iter().enumerate() {
        if first_isomorphism(&structure, m.b(), fam.bound)?.is_none() {
            return Err(UniformError::ClaimFailed(format!(
                "F(A) is not isomorphic to member {s}"
            )));
        }
    }
    Ok(UniformOutput {
        structure,
        quotient,
        f_a,
    })
}

/// Runs `uniform_f` on every distinct relabeling of `A` (up to `cap`) and
/// checks the first sort of each output is that relabeling.
pub fn uniform_over_copies(
    fam: &Family,
    cap: usize,
    mode: QuotientMode,
) -> Result<Vec<(SortedStructure, SortedStructure)>, UniformError> {
    let a0 = fam.members[0].a();
    let mut out = Vec::new();
    for (copy, _) in canonical_copies_with_maps(a0, cap, fam.bound)? {
        let f = uniform_f(&copy, fam, mode)?;
        if f.structure.reduct(&[0])? != copy {
            return Err(UniformError::ClaimFailed("copy not reproduced".into()));
        }
        out.push((copy, f.structure));
    }
    Ok(out)
}

#[cfg(test)]
mod tests;
