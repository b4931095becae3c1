//! Exhaustive verification of the reconstruction on all matched triples.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use serde::Serialize;

use super::{
    assemble_quotient, for_each_index, in_k, Evaluator, Family, Frame, MatchedTriple, QuotientMode, UniformError,
    DEFAULT_TRIPLE_BOUND, RELATION_CHECK_BOUND,
};
use crate::groups::is_weak_splitting;
use crate::structures::{first_isomorphism, SortedMap};

/// `E` as a bit matrix over the triple list.
pub(crate) struct EClasses {
    rows: Vec<Vec<u64>>,
    /// Least related index per triple; only meaningful for an equivalence.
    pub labels: Vec<usize>,
    pub reflexive: bool,
    pub symmetric: bool,
    pub transitive: bool,
}

impl EClasses {
    pub fn compute(ev: &Evaluator, xs: &[MatchedTriple]) -> Self {
        let n = xs.len();
        let words = n.div_ceil(64);
        let mut rows = vec![vec![0u64; words]; n];
        for (i, row) in rows.iter_mut().enumerate() {
            for j in 0..n {
                if ev.equiv(xs, i, j) {
                    row[j / 64] |= 1 << (j % 64);
                }
            }
        }
        let bit = |rows: &[Vec<u64>], i: usize, j: usize| rows[i][j / 64] >> (j % 64) & 1 == 1;
        let reflexive = (0..n).all(|i| bit(&rows, i, i));
        let symmetric = (0..n).all(|i| (0..n).all(|j| bit(&rows, i, j) == bit(&rows, j, i)));
        let transitive = (0..n).all(|i| {
            (0..n)
                .filter(|&j| bit(&rows, i, j))
                .all(|j| rows[j].iter().zip(&rows[i]).all(|(rj, ri)| rj & !ri == 0))
        });
        let labels = rows
            .iter()
            .enumerate()
            .map(|(i, row)| {
                row.iter()
                    .enumerate()
                    .find(|(_, w)| **w != 0)
                    .map(|(k, w)| k * 64 + w.trailing_zeros() as usize)
                    .unwrap_or(i)
            })
            .collect();
        EClasses {
            rows,
            labels,
            reflexive,
            symmetric,
            transitive,
        }
    }

    pub fn related(&self, i: usize, j: usize) -> bool {
        self.rows[i][j / 64] >> (j % 64) & 1 == 1
    }

    pub fn is_equivalence(&self) -> bool {
        self.reflexive && self.symmetric && self.transitive
    }

    pub fn equivalence_failure(&self) -> Option<String> {
        let failed: Vec<&str> = [
            (self.reflexive, "reflexive"),
            (self.symmetric, "symmetric"),
            (self.transitive, "transitive"),
        ]
        .iter()
        .filter(|(ok, _)| !ok)
        .map(|(_, name)| *name)
        .collect();
        (!failed.is_empty()).then(|| format!("E is not {}", failed.join(", ")))
    }

    pub fn class_count(&self) -> usize {
        self.labels.iter().enumerate().filter(|(i, l)| i == *l).count()
    }
}

/// Results of the pass over every relation tuple of triples.
pub(crate) struct RelationCheck {
    pub tuples: u128,
    pub exists_forall: bool,
    pub congruence: bool,
    pub raw_exists_forall: bool,
    pub raw_congruence: bool,
    pub first_failure: Option<String>,
}

impl RelationCheck {
    pub fn detail(&self) -> String {
        self.first_failure
            .clone()
            .unwrap_or_else(|| format!("{} tuples checked", self.tuples))
    }
}

pub(crate) fn relation_checks(
    ev: &Evaluator,
    xs: &[MatchedTriple],
    labels: &[usize],
    bound: u128,
) -> Result<RelationCheck, UniformError> {
    let sig = &ev.frame.fam.members[0].b().signature;
    let mut by_sort: Vec<Vec<usize>> = vec![Vec::new(); 2];
    for (i, x) in xs.iter().enumerate() {
        by_sort[x.sort()].push(i);
    }
    let total: u128 = sig
        .relations
        .iter()
        .map(|r| r.sorts.iter().map(|&s| by_sort[s].len() as u128).product::<u128>())
        .sum();
    if total > bound {
        return Err(UniformError::BoundExceeded {
            what: "relation tuples",
            total,
            bound,
        });
    }
    let members = ev.frame.members();
    let mut out = RelationCheck {
        tuples: total,
        exists_forall: true,
        congruence: true,
        raw_exists_forall: true,
        raw_congruence: true,
        first_failure: None,
    };
    for (r, sym) in sig.relations.iter().enumerate() {
        let dims: Vec<usize> = sym.sorts.iter().map(|&s| by_sort[s].len()).collect();
        for_each_index(&dims, |idx| {
            let t: Vec<usize> = idx.iter().zip(&sym.sorts).map(|(&i, &s)| by_sort[s][i]).collect();
            let reps: Vec<usize> = t.iter().map(|&i| labels[i]).collect();
            let moved: Vec<bool> = (0..members).map(|s| ev.holds_in(xs, r, s, &t)).collect();
            let raw: Vec<bool> = (0..members).map(|s| ev.holds_raw(xs, r, s, &t)).collect();
            let exists = moved.iter().any(|&v| v);
            if moved.iter().any(|&v| v != exists) {
                out.exists_forall = false;
                out.first_failure
                    .get_or_insert_with(|| format!("{}{:?}: members disagree {:?}", sym.name, t, moved));
            }
            if exists != ev.holds(xs, r, &reps) {
                out.congruence = false;
                out.first_failure.get_or_insert_with(|| {
                    format!("{}{:?} differs from class representatives {:?}", sym.name, t, reps)
                });
            }
            let raw_exists = raw.iter().any(|&v| v);
            if raw.iter().any(|&v| v != raw_exists) {
                out.raw_exists_forall = false;
            }
            let raw_reps = (0..members).any(|s| ev.holds_raw(xs, r, s, &reps));
            if raw_exists != raw_reps {
                out.raw_congruence = false;
            }
            true
        });
    }
    Ok(out)
}

/// One verified property.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClaimCheck {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// Every check over the full set of matched triples.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClaimsReport {
    pub members: usize,
    pub triples: usize,
    pub classes: usize,
    pub checks: Vec<ClaimCheck>,
    /// Whether the relation read on raw threads agrees across members.
    pub raw_exists_forall: bool,
    /// Whether the relation read on raw threads is `E`-invariant.
    pub raw_congruence: bool,
}

impl ClaimsReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> Vec<&'static str> {
        self.checks.iter().filter(|c| !c.passed).map(|c| c.name).collect()
    }

    pub fn check(&self, name: &str) -> Option<&ClaimCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

impl fmt::Display for ClaimsReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{} members, {} matched triples, {} classes",
            self.members, self.triples, self.classes
        )?;
        for c in &self.checks {
            let mark = if c.passed { "PASS" } else { "FAIL" };
            writeln!(f, "{mark} {}: {}", c.name, c.detail)?;
        }
        write!(
            f,
            "raw-thread relation: members agree {}, E-invariant {}",
            self.raw_exists_forall, self.raw_congruence
        )
    }
}

struct Checks(Vec<ClaimCheck>);

impl Checks {
    fn push(&mut self, name: &'static str, passed: bool, detail: impl Into<String>) {
        self.0.push(ClaimCheck {
            name,
            passed,
            detail: detail.into(),
        });
    }

    fn skip(&mut self, name: &'static str, why: &str) {
        self.push(name, false, format!("skipped: {why}"));
    }
}

pub fn verify_claims(a: &crate::structures::SortedStructure, fam: &Family) -> Result<ClaimsReport, UniformError> {
    verify_claims_within(a, fam, DEFAULT_TRIPLE_BOUND)
}

/// Enumerates every matched triple over `a` and checks the reconstruction.
/// Only enumeration bounds and malformed input are errors; failed properties
/// are report entries.
pub fn verify_claims_within(
    a: &crate::structures::SortedStructure,
    fam: &Family,
    bound: u128,
) -> Result<ClaimsReport, UniformError> {
    let mut checks = Checks(Vec::new());

    let lifted = fam.members.iter().all(|m| {
        m.problem
            .psi
            .as_ref()
            .is_some_and(|p| m.problem.phi.is_surjective() && is_weak_splitting(&m.problem.phi, p))
    });
    checks.push(
        "family_nonempty",
        !fam.is_empty() && lifted,
        format!("{} members, every section a weak splitting: {lifted}", fam.len()),
    );
    let b0 = fam.members[0].b();
    let mut same_class = true;
    for m in &fam.members[1..] {
        same_class &= m.b().sizes == b0.sizes && first_isomorphism(b0, m.b(), fam.bound)?.is_some();
    }
    checks.push(
        "single_relabeling_class",
        same_class,
        "every member is a relabeling of member 0 on the same universe",
    );

    let frame = Frame::new(a, fam)?;
    let xs = frame.enumerate(bound)?;
    let n = fam.len();

    let tuples: BTreeSet<&Vec<usize>> = xs.iter().map(|x| &x.pi_index).collect();
    let mut commute = !tuples.is_empty();
    for pi_index in &tuples {
        let x = xs.iter().find(|x| &x.pi_index == *pi_index).expect("present");
        for r in 0..n {
            commute &= x.h(r, r).iter().enumerate().all(|(i, &v)| i == v);
            for s in 0..n {
                let hrs = x.h(r, s);
                let hs = SortedMap::new(vec![hrs.clone()]);
                commute &= fam.members[r].a().is_isomorphism_to(fam.members[s].a(), &hs);
                for t in 0..n {
                    let hst = x.h(s, t);
                    let composed: Vec<usize> = hrs.iter().map(|&v| hst[v]).collect();
                    commute &= composed == x.h(r, t);
                }
            }
        }
    }
    checks.push("induced_maps_commute", commute, format!("{} iso tuples", tuples.len()));

    let mut matched = true;
    for x in &xs {
        for s in 0..n {
            matched &= x.g(s, s).is_identity();
            for t in 0..n {
                let g = x.g(s, t);
                matched &= fam.members[s].b().is_isomorphism_to(fam.members[t].b(), &g)
                    && g.maps[0] == x.h(s, t)
                    && g.apply_element(x.b[s]) == x.b[t];
                for r in 0..n {
                    matched &= x.g(r, t) == g.compose(&x.g(r, s));
                }
            }
        }
    }
    checks.push(
        "triples_matched",
        matched && !xs.is_empty(),
        format!("{} triples", xs.len()),
    );

    let ev = Evaluator::new(&frame, &xs);
    let classes = EClasses::compute(&ev, &xs);
    let equivalence = classes.is_equivalence();
    checks.push(
        "e_equivalence",
        equivalence,
        classes
            .equivalence_failure()
            .unwrap_or_else(|| format!("{} classes", classes.class_count())),
    );

    let mut raw = (false, false);
    if !equivalence {
        for name in [
            "exists_forall_agree",
            "congruence",
            "k_classes",
            "rho_constant",
            "y_meets_every_class",
            "rho_bijective",
            "quotient_isomorphic",
            "representative_mode_agrees",
        ] {
            checks.skip(name, "E is not an equivalence");
        }
    } else {
        let rel = relation_checks(&ev, &xs, &classes.labels, RELATION_CHECK_BOUND)?;
        raw = (rel.raw_exists_forall, rel.raw_congruence);
        checks.push("exists_forall_agree", rel.exists_forall, rel.detail());
        checks.push("congruence", rel.congruence, rel.detail());

        let mut k_ok = true;
        let mut k_classes = HashSet::new();
        for element in 0..a.sizes[0] {
            let members: Vec<usize> = (0..xs.len()).filter(|&i| in_k(&xs[i], element)).collect();
            let label = members.first().map(|&i| classes.labels[i]);
            k_ok &= label.is_some_and(|l| {
                let class: Vec<usize> = (0..xs.len()).filter(|&i| classes.labels[i] == l).collect();
                class == members && k_classes.insert(l)
            });
        }
        checks.push(
            "k_classes",
            k_ok,
            format!("{} first-sort elements, each k(a) one class", a.sizes[0]),
        );

        let (constant, meets, bijective) = rho_checks(&frame, &xs, &classes);
        checks.push("rho_constant", constant, "within Y, E-related triples share b_s");
        checks.push("y_meets_every_class", meets, "Y meets every class, for every member");
        checks.push(
            "rho_bijective",
            bijective,
            "rho induces a bijection from the classes onto B_s",
        );

        let q = assemble_quotient(QuotientMode::Full, fam, &ev, xs.clone(), &classes.labels)?;
        let mut iso = constant && meets && bijective;
        if iso {
            for s in 0..n {
                let mut maps = vec![vec![0; q.structure.sizes[0]], vec![0; q.structure.sizes[1]]];
                for (x, t) in xs.iter().enumerate() {
                    if t.pi_index[s] == 0 {
                        let (sort, c) = q.class_of[x];
                        maps[sort][c] = t.b[s].1;
                    }
                }
                iso &= q.structure.is_isomorphism_to(fam.members[s].b(), &SortedMap::new(maps));
            }
        }
        checks.push(
            "quotient_isomorphic",
            iso,
            "class -> rho(Y member) is an isomorphism onto every member",
        );

        let rep = super::build_quotient_within(a, fam, QuotientMode::Representative, bound)?;
        checks.push(
            "representative_mode_agrees",
            rep.structure == q.structure,
            format!(
                "{} representative classes, {} full classes",
                rep.structure.total_elements(),
                q.structure.total_elements()
            ),
        );
    }

    Ok(ClaimsReport {
        members: n,
        triples: xs.len(),
        classes: classes.class_count(),
        checks: checks.0,
        raw_exists_forall: raw.0,
        raw_congruence: raw.1,
    })
}

/// Per member `s` with `phi` the least isomorphism `A_s -> A`,
/// `Y = {x : pi_s = phi}` and `rho(x) = b_s`.
fn rho_checks(frame: &Frame, xs: &[MatchedTriple], classes: &EClasses) -> (bool, bool, bool) {
    let (mut constant, mut meets, mut bijective) = (true, true, true);
    let class_total = classes.class_count();
    for s in 0..frame.members() {
        let y: Vec<usize> = (0..xs.len()).filter(|&i| xs[i].pi_index[s] == 0).collect();
        for &i in &y {
            for &j in &y {
                if classes.related(i, j) && xs[i].b[s] != xs[j].b[s] {
                    constant = false;
                }
            }
        }
        let mut rho: HashMap<usize, HashSet<(usize, usize)>> = HashMap::new();
        for &i in &y {
            rho.entry(classes.labels[i]).or_default().insert(xs[i].b[s]);
        }
        meets &= rho.len() == class_total;
        let images: HashSet<(usize, usize)> = rho.values().flatten().copied().collect();
        let b = frame.fam.members[s].b();
        bijective &=
            rho.values().all(|v| v.len() == 1) && images.len() == rho.len() && images.len() == b.total_elements();
    }
    (constant, meets, bijective)
}
