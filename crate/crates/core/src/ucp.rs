//! Uni-construction problems over finite structures, the triple derived from
//! a three-sorted structure, and finite solvers with their algebra.
//!
//! A problem is a structure `B` whose sorts are split into a first block
//! (the sorts of `A`) and the rest. For an ordinary two-sorted `B` the first
//! block is `{0}`; for the middle problem of a three-sorted `C` it is `{0, 1}`.
//! Automorphisms are always computed on the unfused structure, and the
//! restriction map keeps the per-sort maps of the first block.

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use serde::Serialize;

use crate::groups::{self, classify_section, FiniteGroup, GroupError, GroupHom, SectionClass};
use crate::structures::{self, SortedMap, SortedSignature, SortedStructure, StructureError};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum UcpError {
    #[error("expected a {expected}-sorted structure, found {found} sorts")]
    SortCount { expected: usize, found: usize },
    #[error("first block {0:?} is empty, out of range or covers every sort")]
    BadBlock(Vec<usize>),
    #[error("restriction of an automorphism is not an automorphism of the reduct")]
    RestrictionNotAutomorphism,
    #[error("section has {found} entries, expected {expected}")]
    PsiLength { expected: usize, found: usize },
    #[error("section entry {0} is not an element of Aut(B)")]
    PsiOutOfRange(usize),
    #[error("solver catalogs do not match: {0}")]
    CatalogMismatch(String),
    #[error("solver invariant violated: {0}")]
    SolverInvariant(String),
    #[error("not an expansion: {0}")]
    NotAnExpansion(String),
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error(transparent)]
    Group(#[from] GroupError),
}

/// How the section `psi` of a problem is chosen.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PsiChoice {
    /// No section: the problem can at best be weak.
    None,
    /// `psi[g]` is an index into the automorphism list of `B`, for each
    /// automorphism index `g` of `A`.
    Given(Vec<usize>),
    /// First splitting in canonical order, else first weak splitting.
    Search,
}

/// Pass/fail per defining clause.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClauseReport {
    /// (a) two blocks of sorts.
    pub a_two_sorted: bool,
    /// (b) `A` is the reduct of `B` to the first block.
    pub b_reduct: bool,
    /// (c) `H`, `K`, `G` computed; `K` is the center of `H`.
    pub c_groups: bool,
    /// (d) restriction is a group homomorphism into `Aut(A)`.
    pub d_restriction_hom: bool,
    /// (e) restriction is onto.
    pub e_surjective: bool,
    /// (f) `psi` weakly splits the restriction; `None` when no `psi`.
    pub f_weak_split: Option<bool>,
    /// Classification of `psi`; `None` when absent or not a section.
    pub psi_class: Option<SectionClass>,
    /// Kernel of the restriction equals the automorphisms fixing the first block pointwise.
    pub kernel_matches: bool,
}

impl ClauseReport {
    pub fn is_weak_ucp(&self) -> bool {
        self.a_two_sorted && self.b_reduct && self.c_groups && self.d_restriction_hom && self.e_surjective
    }

    pub fn is_ucp(&self) -> bool {
        self.is_weak_ucp() && self.f_weak_split == Some(true)
    }

    /// Names of failed clauses.
    pub fn failures(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        let checks = [
            (self.a_two_sorted, "a"),
            (self.b_reduct, "b"),
            (self.c_groups, "c"),
            (self.d_restriction_hom, "d"),
            (self.e_surjective, "e"),
            (self.f_weak_split != Some(false), "f"),
            (self.kernel_matches, "kernel"),
        ];
        for (ok, name) in checks {
            if !ok {
                out.push(name);
            }
        }
        out
    }
}

#[derive(Clone, Debug)]
pub struct UniConstructionProblem {
    pub b: SortedStructure,
    pub a: SortedStructure,
    pub first_block: Vec<usize>,
    pub h: Arc<FiniteGroup>,
    /// Automorphisms of `B`, indexed like the elements of `h`.
    pub h_maps: Vec<SortedMap>,
    pub g: Arc<FiniteGroup>,
    /// Automorphisms of `A`, indexed like the elements of `g`.
    pub g_maps: Vec<SortedMap>,
    pub k: Vec<usize>,
    pub phi: GroupHom,
    pub psi: Option<Vec<usize>>,
    pub weak_only: bool,
    pub report: ClauseReport,
}

impl UniConstructionProblem {
    /// The automorphism of `B` chosen by `psi` above the automorphism `g` of `A`.
    pub fn psi_map(&self, g: &SortedMap) -> Option<&SortedMap> {
        let psi = self.psi.as_ref()?;
        let idx = self.g_maps.iter().position(|m| m == g)?;
        Some(&self.h_maps[psi[idx]])
    }

    pub fn g_index(&self, g: &SortedMap) -> Option<usize> {
        self.g_maps.iter().position(|m| m == g)
    }
}

/// Assembles the problem of a two-sorted `B` with the default search bound.
pub fn assemble_ucp(b: &SortedStructure, psi: PsiChoice) -> Result<UniConstructionProblem, UcpError> {
    if b.sort_count() != 2 {
        return Err(UcpError::SortCount {
            expected: 2,
            found: b.sort_count(),
        });
    }
    assemble_blocked(b, &[0], psi, structures::DEFAULT_MAX_ELEMENTS)
}

/// Assembles the problem whose `A` is the reduct of `b` to `first_block`.
pub fn assemble_blocked(
    b: &SortedStructure,
    first_block: &[usize],
    psi: PsiChoice,
    bound: usize,
) -> Result<UniConstructionProblem, UcpError> {
    let block: BTreeSet<usize> = first_block.iter().copied().collect();
    let n = b.sort_count();
    if block.is_empty() || block.len() >= n || block.iter().any(|&s| s >= n) {
        return Err(UcpError::BadBlock(first_block.to_vec()));
    }
    let first_block: Vec<usize> = block.into_iter().collect();
    let a = b.reduct(&first_block)?;
    let (h, h_maps) = groups::aut_group_within(b, bound)?;
    let (g, g_maps) = groups::aut_group_within(&a, bound)?;
    let k = h.center();
    let g_index: HashMap<&SortedMap, usize> = g_maps.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let mut restriction = Vec::with_capacity(h_maps.len());
    for f in &h_maps {
        let r = f.restrict(&first_block);
        match g_index.get(&r) {
            Some(&i) => restriction.push(i),
            None => return Err(UcpError::RestrictionNotAutomorphism),
        }
    }
    let d_restriction_hom = groups::is_hom(&restriction, &h, &g);
    if !d_restriction_hom {
        return Err(UcpError::RestrictionNotAutomorphism);
    }
    let phi = GroupHom {
        domain: h.clone(),
        codomain: g.clone(),
        map: restriction,
    };
    let fixing: Vec<usize> = h_maps
        .iter()
        .enumerate()
        .filter(|(_, f)| {
            first_block
                .iter()
                .all(|&s| f.maps[s].iter().enumerate().all(|(i, &x)| i == x))
        })
        .map(|(i, _)| i)
        .collect();
    let e_surjective = phi.is_surjective();
    let psi = match psi {
        PsiChoice::None => None,
        PsiChoice::Given(p) => {
            if p.len() != g.order() {
                return Err(UcpError::PsiLength {
                    expected: g.order(),
                    found: p.len(),
                });
            }
            if let Some(&bad) = p.iter().find(|&&x| x >= h.order()) {
                return Err(UcpError::PsiOutOfRange(bad));
            }
            Some(p)
        }
        PsiChoice::Search if e_surjective => {
            let r = groups::classify_sections(&phi)?;
            r.splittings.first().or(r.weak_splittings.first()).cloned()
        }
        PsiChoice::Search => None,
    };
    let psi_class = psi.as_ref().and_then(|p| classify_section(&phi, p));
    let f_weak_split = psi.as_ref().map(|p| e_surjective && groups::is_weak_splitting(&phi, p));
    let report = ClauseReport {
        a_two_sorted: true,
        b_reduct: b.reduct(&first_block)? == a,
        c_groups: k == h.center() && h.order() == h_maps.len() && g.order() == g_maps.len(),
        d_restriction_hom,
        e_surjective,
        f_weak_split,
        psi_class,
        kernel_matches: phi.kernel() == fixing,
    };
    Ok(UniConstructionProblem {
        b: b.clone(),
        a,
        first_block,
        h,
        h_maps,
        g,
        g_maps,
        k,
        weak_only: psi.is_none() || f_weak_split != Some(true),
        phi,
        psi,
        report,
    })
}

/// The three problems of a three-sorted structure `C`: sort 1 inside
/// `sort_{1,2}(C)`, `sort_{1,2}(C)` inside `C`, and sort 1 inside `C`.
#[derive(Clone, Debug)]
pub struct Triple {
    pub c12: UniConstructionProblem,
    pub c23: UniConstructionProblem,
    pub c13: UniConstructionProblem,
    /// `phi13 = phi12 ∘ phi23` as maps on automorphism lists.
    pub composition_holds: bool,
}

impl Triple {
    pub fn all_weak_ucps(&self) -> bool {
        [&self.c12, &self.c23, &self.c13].iter().all(|c| c.report.is_weak_ucp())
    }
}

pub fn derive_triple(c: &SortedStructure, psi: PsiChoice) -> Result<Triple, UcpError> {
    derive_triple_within(c, psi, structures::DEFAULT_MAX_ELEMENTS)
}

pub fn derive_triple_within(c: &SortedStructure, psi: PsiChoice, bound: usize) -> Result<Triple, UcpError> {
    if c.sort_count() != 3 {
        return Err(UcpError::SortCount {
            expected: 3,
            found: c.sort_count(),
        });
    }
    let explicit = matches!(psi, PsiChoice::Given(_));
    let choice = || if explicit { PsiChoice::None } else { psi.clone() };
    let c12 = assemble_blocked(&c.reduct(&[0, 1])?, &[0], choice(), bound)?;
    let c23 = assemble_blocked(c, &[0, 1], choice(), bound)?;
    let c13 = assemble_blocked(c, &[0], choice(), bound)?;
    let composition_holds = c12.h_maps == c23.g_maps
        && c12.g_maps == c13.g_maps
        && c23.h_maps == c13.h_maps
        && (0..c13.h.order()).all(|x| c13.phi.apply(x) == c12.phi.apply(c23.phi.apply(x)))
        && c23
            .h_maps
            .iter()
            .all(|f| f.restrict(&[0]) == f.restrict(&[0, 1]).restrict(&[0]));
    Ok(Triple {
        c12,
        c23,
        c13,
        composition_holds,
    })
}

/// A finite solver: each input structure is sent to an output whose reduct to
/// `first_block` is that input.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Solver {
    pub first_block: Vec<usize>,
    pub pairs: Vec<(SortedStructure, SortedStructure)>,
}

impl Solver {
    /// Builds the solver that sends `reduct(B, first_block)` to `B` for each
    /// `B` in the output catalog.
    pub fn from_outputs(first_block: &[usize], outputs: &[SortedStructure]) -> Result<Self, UcpError> {
        let pairs = outputs
            .iter()
            .map(|b| Ok((b.reduct(first_block)?, b.clone())))
            .collect::<Result<Vec<_>, UcpError>>()?;
        let s = Solver {
            first_block: first_block.to_vec(),
            pairs,
        };
        s.verify()?;
        Ok(s)
    }

    pub fn identity(first_block: &[usize], structures: &[SortedStructure]) -> Result<Self, UcpError> {
        Self::from_outputs(first_block, structures)
    }

    pub fn catalog1(&self) -> impl Iterator<Item = &SortedStructure> {
        self.pairs.iter().map(|(a, _)| a)
    }

    pub fn catalog2(&self) -> impl Iterator<Item = &SortedStructure> {
        self.pairs.iter().map(|(_, b)| b)
    }

    pub fn apply(&self, a: &SortedStructure) -> Option<&SortedStructure> {
        self.pairs.iter().find(|(x, _)| x == a).map(|(_, b)| b)
    }

    /// Checks single-valuedness, `F(reduct(B)) = B` for every output and
    /// pairwise isomorphism inside each catalog.
    pub fn verify(&self) -> Result<(), UcpError> {
        let inputs: BTreeSet<_> = self.catalog1().map(|a| a.to_json()).collect();
        if inputs.len() != self.pairs.len() {
            return Err(UcpError::SolverInvariant("input catalog has repeated members".into()));
        }
        for (i, (a, b)) in self.pairs.iter().enumerate() {
            if b.reduct(&self.first_block)? != *a {
                return Err(UcpError::SolverInvariant(format!(
                    "pair {i}: output does not reduce to its input"
                )));
            }
        }
        if let Some((a0, b0)) = self.pairs.first() {
            let bound = b0.total_elements().max(structures::DEFAULT_MAX_ELEMENTS);
            for (i, (a, b)) in self.pairs.iter().enumerate().skip(1) {
                if structures::first_isomorphism(a0, a, bound)?.is_none() {
                    return Err(UcpError::SolverInvariant(format!(
                        "input {i} is not isomorphic to input 0"
                    )));
                }
                if structures::first_isomorphism(b0, b, bound)?.is_none() {
                    return Err(UcpError::SolverInvariant(format!(
                        "output {i} is not isomorphic to output 0"
                    )));
                }
            }
        }
        Ok(())
    }

    /// A list of `[input, output]` structure documents.
    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.pairs
                .iter()
                .map(|(a, b)| serde_json::json!([a.to_json_value(), b.to_json_value()]))
                .collect(),
        )
    }

    /// Parses a pair list; the first block is recovered from the input sort names.
    pub fn from_json_value(v: &serde_json::Value) -> Result<Self, UcpError> {
        let bad = |m: &str| UcpError::Structure(StructureError::Json(m.to_string()));
        let items = v.as_array().ok_or_else(|| bad("solver must be a list of pairs"))?;
        let mut pairs = Vec::with_capacity(items.len());
        for item in items {
            let pair = item
                .as_array()
                .filter(|p| p.len() == 2)
                .ok_or_else(|| bad("each entry must be a pair"))?;
            pairs.push((
                SortedStructure::from_json_value(&pair[0])?,
                SortedStructure::from_json_value(&pair[1])?,
            ));
        }
        let first_block = match pairs.first() {
            Some((a, b)) => a
                .signature
                .sorts
                .iter()
                .map(|name| {
                    b.signature
                        .sort_index(name)
                        .ok_or_else(|| bad("input sort missing in output"))
                })
                .collect::<Result<Vec<_>, _>>()?,
            None => Vec::new(),
        };
        let s = Solver { first_block, pairs };
        s.verify()?;
        Ok(s)
    }
}

/// `F13 = F23 ∘ F12`. The outputs of `F12` must be exactly the inputs of `F23`.
pub fn compose_solvers(f12: &Solver, f23: &Solver) -> Result<Solver, UcpError> {
    let out12: BTreeSet<String> = f12.catalog2().map(|b| b.to_json()).collect();
    let in23: BTreeSet<String> = f23.catalog1().map(|b| b.to_json()).collect();
    if out12 != in23 {
        return Err(UcpError::CatalogMismatch(
            "outputs of the first solver differ from inputs of the second".into(),
        ));
    }
    let first_block = f12.first_block.iter().map(|&s| f23.first_block[s]).collect();
    let pairs = f12
        .pairs
        .iter()
        .map(|(a, b)| {
            let c = f23.apply(b).expect("catalogs agree");
            (a.clone(), c.clone())
        })
        .collect();
    let s = Solver { first_block, pairs };
    s.verify()?;
    Ok(s)
}

/// The solver `A -> reduct(F(A), target)`, for a target signature that the
/// outputs expand and that keeps the first-block structure unchanged.
pub fn reduct_solver(fd: &Solver, target: &SortedSignature) -> Result<Solver, UcpError> {
    let mut pairs = Vec::with_capacity(fd.pairs.len());
    for (a, b) in &fd.pairs {
        let reduced = b
            .reduct_to_signature(target)
            .map_err(|e| UcpError::NotAnExpansion(e.to_string()))?;
        if reduced.reduct(&fd.first_block)? != *a {
            return Err(UcpError::NotAnExpansion(
                "target signature changes the first-block structure".into(),
            ));
        }
        pairs.push((a.clone(), reduced));
    }
    let s = Solver {
        first_block: fd.first_block.clone(),
        pairs,
    };
    s.verify()?;
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bare(sizes: [usize; 2]) -> SortedStructure {
        SortedStructure::new(SortedSignature::new(["A", "B"]), sizes.to_vec())
    }

    #[test]
    fn trivial_problem() {
        let c = assemble_ucp(&bare([1, 1]), PsiChoice::Search).unwrap();
        assert_eq!(c.h.order(), 1);
        assert_eq!(c.g.order(), 1);
        assert!(c.report.is_ucp());
        assert_eq!(c.psi, Some(vec![0]));
    }

    #[test]
    fn two_free_points_split() {
        let c = assemble_ucp(&bare([2, 1]), PsiChoice::Search).unwrap();
        assert_eq!((c.h.order(), c.g.order()), (2, 2));
        assert!(c.phi.is_injective());
        assert_eq!(c.report.psi_class, Some(SectionClass::Splitting));
        assert!(c.report.is_ucp());
    }

    #[test]
    fn pinned_swap_fails_clause_e() {
        let sig = SortedSignature::new(["A", "B"]).relation("R", &[0, 1]);
        let mut b = SortedStructure::new(sig, vec![2, 1]);
        b.insert("R", &[0, 0]).unwrap();
        // R is cross-sort, so A is two free points but Aut(B) fixes point 0
        let c = assemble_ucp(&b, PsiChoice::Search).unwrap();
        assert_eq!(c.g.order(), 2);
        assert_eq!(c.h.order(), 1);
        assert!(!c.report.e_surjective);
        assert!(!c.report.is_weak_ucp());
        assert_eq!(c.report.failures(), vec!["e"]);
    }

    #[test]
    fn wrong_sort_count() {
        let s = SortedStructure::new(SortedSignature::new(["A"]), vec![1]);
        assert_eq!(
            assemble_ucp(&s, PsiChoice::None).unwrap_err(),
            UcpError::SortCount { expected: 2, found: 1 }
        );
        assert!(derive_triple(&s, PsiChoice::None).is_err());
    }

    #[test]
    fn kernel_is_pointwise_fixer() {
        let c = assemble_ucp(&bare([1, 3]), PsiChoice::None).unwrap();
        assert_eq!(c.h.order(), 6);
        assert_eq!(c.phi.kernel().len(), 6);
        assert!(c.report.kernel_matches);
        assert!(c.weak_only);
    }

    #[test]
    fn derive_triple_of_bare_sorts() {
        let c = SortedStructure::new(SortedSignature::new(["1", "2", "3"]), vec![2, 1, 2]);
        let t = derive_triple(&c, PsiChoice::Search).unwrap();
        assert!(t.composition_holds);
        assert!(t.all_weak_ucps());
        assert_eq!(t.c23.g.order(), 2);
        assert_eq!(t.c13.h.order(), 4);
    }

    fn marked(n: usize, mark: usize) -> SortedStructure {
        let sig = SortedSignature::new(["A", "B"])
            .relation("P", &[0])
            .relation("R", &[0, 1]);
        let mut s = SortedStructure::new(sig, vec![n, 1]);
        s.insert("P", &[mark]).unwrap();
        s.insert("R", &[mark, 0]).unwrap();
        s
    }

    #[test]
    fn solver_identity_composition() {
        let outputs: Vec<_> = (0..3).map(|m| marked(3, m)).collect();
        let f = Solver::from_outputs(&[0], &outputs).unwrap();
        let id = Solver::identity(&[0, 1], &outputs).unwrap();
        assert_eq!(compose_solvers(&f, &id).unwrap(), f);
        let v = f.to_json_value();
        assert_eq!(Solver::from_json_value(&v).unwrap(), f);
    }

    #[test]
    fn solver_rejects_non_function() {
        let mut b2 = marked(3, 0);
        b2.insert("R", &[1, 0]).unwrap();
        let err = Solver::from_outputs(&[0], &[marked(3, 0), b2]).unwrap_err();
        assert!(matches!(err, UcpError::SolverInvariant(_)));
    }

    #[test]
    fn reduct_solver_examples() {
        let outputs: Vec<_> = (0..3).map(|m| marked(3, m)).collect();
        let f = Solver::from_outputs(&[0], &outputs).unwrap();
        let same = reduct_solver(&f, &outputs[0].signature).unwrap();
        assert_eq!(same, f);
        let drop_r = SortedSignature::new(["A", "B"]).relation("P", &[0]);
        let r = reduct_solver(&f, &drop_r).unwrap();
        assert!(r.catalog2().all(|b| b.signature == drop_r));
        let foreign = SortedSignature::new(["A", "B"]).relation("Q", &[1]);
        assert!(matches!(reduct_solver(&f, &foreign), Err(UcpError::NotAnExpansion(_))));
        let drop_p = SortedSignature::new(["A", "B"]).relation("R", &[0, 1]);
        assert!(matches!(reduct_solver(&f, &drop_p), Err(UcpError::NotAnExpansion(_))));
    }
}
