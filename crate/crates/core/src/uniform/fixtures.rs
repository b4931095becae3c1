//! Small two-sorted relational structures used by the tests and the CLI.

use crate::structures::{SortedSignature, SortedStructure};

fn signature(relations: &[(&str, &[usize])]) -> SortedSignature {
    relations
        .iter()
        .fold(SortedSignature::new(["A", "B"]), |sig, (name, sorts)| {
            sig.relation(*name, sorts)
        })
}

/// `n` first-sort points, `m` second-sort points, no relations.
pub fn free_points(n: usize, m: usize) -> SortedStructure {
    SortedStructure::new(signature(&[]), vec![n, m])
}

/// `n + n` points joined by the matching `M(i, i)`.
pub fn matching(n: usize) -> SortedStructure {
    let mut s = SortedStructure::new(signature(&[("M", &[0, 1])]), vec![n, n]);
    for i in 0..n {
        s.insert("M", &[i, i]).expect("in range");
    }
    s
}

/// A directed `n`-cycle on the first sort, matched to `n` second-sort points.
pub fn cycle_matching(n: usize) -> SortedStructure {
    let mut s = SortedStructure::new(signature(&[("E", &[0, 0]), ("M", &[0, 1])]), vec![n, n]);
    for i in 0..n {
        s.insert("E", &[i, (i + 1) % n]).expect("in range");
        s.insert("M", &[i, i]).expect("in range");
    }
    s
}

/// Two first-sort points, each with a private second-sort point, plus one
/// second-sort point marked by `P` and joined to both.
pub fn shared_point() -> SortedStructure {
    let mut s = SortedStructure::new(signature(&[("M", &[0, 1]), ("P", &[1])]), vec![2, 3]);
    for (a, b) in [(0, 0), (1, 1), (0, 2), (1, 2)] {
        s.insert("M", &[a, b]).expect("in range");
    }
    s.insert("P", &[2]).expect("in range");
    s
}

/// One first-sort point and two interchangeable second-sort points: the
/// restriction map has a kernel of order 2.
pub fn twin_points() -> SortedStructure {
    free_points(1, 2)
}

/// `(name, B, family size)` for the end-to-end reconstruction runs.
pub fn reconstruction_cases() -> Vec<(&'static str, SortedStructure, usize)> {
    vec![
        ("free 2+1, one member", free_points(2, 1), 1),
        ("free 2+1, two members", free_points(2, 1), 2),
        ("matching 2+2, two members", matching(2), 2),
        ("twin points, one member", twin_points(), 1),
        ("cycle 3+3, two members", cycle_matching(3), 2),
        ("shared point 2+3, three members", shared_point(), 3),
        ("matching 3+3, three members", matching(3), 3),
    ]
}
