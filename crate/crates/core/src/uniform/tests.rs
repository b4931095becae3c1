use super::fixtures::*;
use super::*;
use crate::structures::{isomorphisms, SortedSignature, DEFAULT_MAX_ELEMENTS};

fn family(b: &SortedStructure, n: usize) -> Family {
    build_family(b, PsiChoice::Search, n, DEFAULT_MAX_ELEMENTS).unwrap()
}

fn first_sort(b: &SortedStructure) -> SortedStructure {
    b.reduct(&[0]).unwrap()
}

#[test]
fn singleton_family() {
    let fam = family(&matching(2), 1);
    assert_eq!(fam.len(), 1);
    assert_eq!(fam.members[0].class, SectionClass::Splitting);
}

#[test]
fn transported_section_is_checked() {
    let fam = family(&shared_point(), 3);
    assert_eq!(fam.len(), 3);
    assert_ne!(fam.members[1].b(), fam.members[0].b());
    for m in &fam.members {
        assert_eq!(m.class, SectionClass::Splitting);
        assert!(m.problem.report.is_ucp());
    }
}

#[test]
fn no_weak_splitting_is_rejected() {
    let sig = SortedSignature::new(["A", "B"]).relation("R", &[0, 1]);
    let mut b = SortedStructure::new(sig, vec![2, 1]);
    b.insert("R", &[0, 0]).unwrap();
    assert_eq!(
        build_family(&b, PsiChoice::Search, 1, DEFAULT_MAX_ELEMENTS).unwrap_err(),
        UniformError::NotWeakSplitting(0)
    );
}

#[test]
fn rigid_singleton_has_one_triple_per_element() {
    let b = matching(1);
    let fam = family(&b, 1);
    let xs = matched_triples(&first_sort(&b), &fam).unwrap();
    assert_eq!(xs.len(), b.total_elements());
    assert_eq!(k_class(0, &first_sort(&b), &fam).unwrap().len(), 1);
}

#[test]
fn non_isomorphic_target_gives_nothing() {
    let fam = family(&cycle_matching(3), 1);
    let mut a = first_sort(&cycle_matching(3));
    a.relations[0].clear();
    assert!(matched_triples(&a, &fam).unwrap().is_empty());
}

/// Every family `g_{s,t}` over all ordered pairs, filtered by the defining
/// conditions, against the enumeration through member 0.
#[test]
fn extensions_match_naive_families() {
    let b = free_points(2, 1);
    let fam = family(&b, 2);
    let a = first_sort(&b);
    let xs = matched_triples(&a, &fam).unwrap();
    let isos = |s: usize, t: usize| isomorphisms(fam.members[s].b(), fam.members[t].b()).unwrap();
    let to_a = |s: usize| isomorphisms(fam.members[s].a(), &a).unwrap();
    let mut naive = HashSet::new();
    for p0 in to_a(0) {
        for p1 in to_a(1) {
            let pi = [p0.maps[0].clone(), p1.maps[0].clone()];
            for g01 in isos(0, 1) {
                for g10 in isos(1, 0) {
                    let g = |s: usize, t: usize| match (s, t) {
                        (0, 1) => g01.clone(),
                        (1, 0) => g10.clone(),
                        _ => SortedMap::identity(&fam.members[s].b().sizes),
                    };
                    let ok = (0..2).all(|r| {
                        (0..2).all(|s| {
                            let inv = invert(&pi[s]);
                            let h: Vec<usize> = pi[r].iter().map(|&x| inv[x]).collect();
                            g(r, s).maps[0] == h && (0..2).all(|t| g(r, t) == g(s, t).compose(&g(r, s)))
                        })
                    });
                    if !ok {
                        continue;
                    }
                    for e in b.elements() {
                        naive.insert((pi.clone(), g01.clone(), e, g01.apply_element(e)));
                    }
                }
            }
        }
    }
    let ours: HashSet<_> = xs
        .iter()
        .map(|x| ([x.pi[0].clone(), x.pi[1].clone()], x.g(0, 1), x.b[0], x.b[1]))
        .collect();
    assert_eq!(ours.len(), xs.len());
    assert_eq!(ours, naive);
}

#[test]
fn e_examples() {
    let b = matching(2);
    let fam = family(&b, 2);
    let xs = matched_triples(&first_sort(&b), &fam).unwrap();
    assert!(xs.iter().all(|x| e_equiv(&fam, x, x)));
    let x = &xs[0];
    let mut y = x.clone();
    y.b[1] = if y.b[1] == (0, 0) { (0, 1) } else { (0, 0) };
    assert!(!e_equiv(&fam, x, &y));
    for x1 in &xs {
        for x2 in xs.iter().filter(|x2| e_equiv(&fam, x1, x2)) {
            for x3 in xs.iter().filter(|x3| e_equiv(&fam, x2, x3)) {
                assert!(e_equiv(&fam, x1, x3));
            }
        }
    }
}

#[test]
fn k_classes_are_disjoint_and_closed() {
    let b = cycle_matching(3);
    let a = first_sort(&b);
    let fam = family(&b, 2);
    let xs = matched_triples(&a, &fam).unwrap();
    let k: Vec<Vec<MatchedTriple>> = (0..3).map(|e| k_class(e, &a, &fam).unwrap()).collect();
    for (i, ki) in k.iter().enumerate() {
        assert!(!ki.is_empty());
        for kj in &k[i + 1..] {
            assert!(ki.iter().all(|x| !kj.contains(x)));
        }
        for x in ki {
            for y in xs.iter().filter(|y| e_equiv(&fam, x, y)) {
                assert!(ki.contains(y));
            }
        }
    }
}

#[test]
fn singleton_quotient_is_b() {
    for b in [twin_points(), matching(2), shared_point()] {
        let fam = family(&b, 1);
        for mode in [QuotientMode::Representative, QuotientMode::Full] {
            let q = build_quotient(&first_sort(&b), &fam, mode).unwrap();
            assert!(first_isomorphism(&q.structure, &b, DEFAULT_MAX_ELEMENTS)
                .unwrap()
                .is_some());
        }
    }
}

#[test]
fn empty_relation_stays_empty() {
    let sig = SortedSignature::new(["A", "B"]).relation("R", &[0, 1]);
    let b = SortedStructure::new(sig, vec![2, 1]);
    let fam = family(&b, 2);
    let q = build_quotient(&first_sort(&b), &fam, QuotientMode::Full).unwrap();
    assert!(q.structure.relations[0].is_empty());
}

#[test]
fn full_and_representative_quotients_coincide() {
    let b = cycle_matching(3);
    let fam = family(&b, 2);
    let a = first_sort(&b);
    let rep = build_quotient(&a, &fam, QuotientMode::Representative).unwrap();
    let full = build_quotient(&a, &fam, QuotientMode::Full).unwrap();
    assert_eq!(rep.structure, full.structure);
    assert_eq!(rep.triples.len(), b.total_elements());
}

#[test]
fn small_cases_verify() {
    for (name, b, n) in reconstruction_cases()
        .into_iter()
        .filter(|(_, b, n)| b.total_elements() * n <= 9)
    {
        let fam = family(&b, n);
        let report = verify_claims(&first_sort(&b), &fam).unwrap();
        assert!(report.passed(), "{name}: {report}");
    }
}

#[test]
fn raw_thread_relation_is_not_invariant() {
    let b = matching(2);
    let fam = family(&b, 1);
    let report = verify_claims(&first_sort(&b), &fam).unwrap();
    assert!(report.passed());
    assert!(!report.raw_congruence);
}

/// Two members whose restriction map has a kernel: the threads over one iso
/// tuple are no longer determined by `b_0`, and the classes outnumber `B`.
#[test]
fn kernel_splits_classes_with_two_members() {
    let b = twin_points();
    let fam = family(&b, 2);
    let report = verify_claims(&first_sort(&b), &fam).unwrap();
    assert!(!report.passed());
    assert!(report.check("e_equivalence").unwrap().passed);
    assert!(!report.check("rho_bijective").unwrap().passed);
    assert!(report.classes > b.total_elements());
}

#[test]
fn uniform_f_keeps_the_target() {
    let b = cycle_matching(3);
    let fam = family(&b, 2);
    let a = first_sort(&b);
    let out = uniform_f(&a, &fam, QuotientMode::Representative).unwrap();
    assert_eq!(out.structure.reduct(&[0]).unwrap(), a);
    let again = uniform_f(&a, &fam, QuotientMode::Representative).unwrap();
    assert_eq!(out.structure.to_json(), again.structure.to_json());
    let full = uniform_f(&a, &fam, QuotientMode::Full).unwrap();
    assert_eq!(full.structure, out.structure);
}

#[test]
fn uniform_f_on_copies() {
    let b = shared_point();
    let fam = family(&b, 2);
    let runs = uniform_over_copies(&fam, 24, QuotientMode::Representative).unwrap();
    assert_eq!(runs.len(), 1);
    let b = matching(3);
    let fam = family(&b, 2);
    let runs = uniform_over_copies(&fam, 24, QuotientMode::Representative).unwrap();
    assert_eq!(runs.len(), 1);
    let b = cycle_matching(3);
    let fam = family(&b, 1);
    let runs = uniform_over_copies(&fam, 24, QuotientMode::Representative).unwrap();
    assert_eq!(runs.len(), 2);
    let (c0, f0) = &runs[0];
    let (c1, f1) = &runs[1];
    assert_ne!(c0, c1);
    assert_eq!(f1.reduct(&[0]).unwrap(), *c1);
    assert!(first_isomorphism(f0, f1, DEFAULT_MAX_ELEMENTS).unwrap().is_some());
}

#[test]
fn psi_json_round_trip() {
    let b = shared_point();
    let fam = family(&b, 1);
    let v = psi_to_json(&fam.members[0]);
    let pairs = psi_from_json(&v).unwrap();
    let psi = psi_from_pairs(&b, &pairs, DEFAULT_MAX_ELEMENTS).unwrap();
    assert_eq!(Some(psi), fam.members[0].problem.psi);
}
