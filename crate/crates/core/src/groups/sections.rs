//! Sections of a surjective homomorphism and their classification into
//! splittings, weak splittings and plain set-theoretic sections.

use std::fmt;

use serde::Serialize;

use super::{is_hom, FiniteGroup, GroupError, GroupHom};

/// Default cap on the number of sections enumerated exhaustively.
pub const DEFAULT_SECTION_BOUND: u128 = 1_000_000;

/// Witness lists stop growing at this length; counts stay exact.
const MAX_STORED: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SectionMode {
    /// Exhaustive within the bound, backtracking above it.
    Auto,
    Exhaustive,
    Backtracking,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SectionClass {
    Splitting,
    WeakSplitting,
    SectionOnly,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SectionReport {
    pub mode: SectionMode,
    pub total_sections: u128,
    pub splitting_count: u64,
    /// Weak splittings that are not homomorphisms.
    pub weak_count: u64,
    pub section_only_count: u128,
    /// Splittings in lexicographic order of the map.
    pub splittings: Vec<Vec<usize>>,
    /// Weak splittings that are not splittings, in lexicographic order.
    pub weak_splittings: Vec<Vec<usize>>,
    /// True when a witness list was cut at its storage cap.
    pub truncated: bool,
}

impl SectionReport {
    pub fn has_splitting(&self) -> bool {
        self.splitting_count > 0
    }

    /// Every splitting is a weak splitting, so this includes them.
    pub fn has_weak_splitting(&self) -> bool {
        self.splitting_count + self.weak_count > 0
    }

    pub fn is_weak_not_strong(&self) -> bool {
        !self.has_splitting() && self.weak_count > 0
    }

    pub fn summary(&self) -> &'static str {
        match (self.has_splitting(), self.has_weak_splitting()) {
            (true, _) => "splitting exists",
            (false, true) => "no splitting; weak splitting exists",
            (false, false) => "no splitting; no weak splitting",
        }
    }

    fn record(&mut self, class: SectionClass, psi: &[usize]) {
        let list = match class {
            SectionClass::Splitting => {
                self.splitting_count += 1;
                &mut self.splittings
            }
            SectionClass::WeakSplitting => {
                self.weak_count += 1;
                &mut self.weak_splittings
            }
            SectionClass::SectionOnly => {
                self.section_only_count += 1;
                return;
            }
        };
        if list.len() < MAX_STORED {
            list.push(psi.to_vec());
        } else {
            self.truncated = true;
        }
    }
}

impl fmt::Display for SectionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} ({} sections: {} splittings, {} weak-only, {} plain)",
            self.summary(),
            self.total_sections,
            self.splitting_count,
            self.weak_count,
            self.section_only_count
        )
    }
}

struct Ctx<'a> {
    h: &'a FiniteGroup,
    g: &'a FiniteGroup,
    central: Vec<bool>,
}

impl<'a> Ctx<'a> {
    fn new(phi: &'a GroupHom) -> Self {
        let h = &*phi.domain;
        let mut central = vec![false; h.order()];
        h.center().into_iter().for_each(|z| central[z] = true);
        Ctx {
            h,
            g: &phi.codomain,
            central,
        }
    }

    /// `psi(a) psi(b) psi(ab)^-1` is central.
    fn cocycle_central(&self, psi: &[usize], a: usize, b: usize) -> bool {
        let h = self.h;
        let ab = self.g.mul(a, b);
        self.central[h.mul(h.mul(psi[a], psi[b]), h.inv(psi[ab]))]
    }

    fn inverse_law(&self, psi: &[usize]) -> bool {
        psi[0] == 0 && self.g.elements().all(|x| psi[self.g.inv(x)] == self.h.inv(psi[x]))
    }

    fn classify(&self, psi: &[usize]) -> SectionClass {
        let weak = self.inverse_law(psi)
            && self
                .g
                .elements()
                .all(|a| self.g.elements().all(|b| self.cocycle_central(psi, a, b)));
        if !weak {
            SectionClass::SectionOnly
        } else if is_hom(psi, self.g, self.h) {
            SectionClass::Splitting
        } else {
            SectionClass::WeakSplitting
        }
    }
}

/// Literal weak-splitting test: section, `psi(1) = 1`, `psi(x^-1) = psi(x)^-1`
/// and `psi(x) psi(y) psi(xy)^-1` central for all `x, y`.
pub fn is_weak_splitting(phi: &GroupHom, psi: &[usize]) -> bool {
    classify_section(phi, psi).is_some_and(|c| c != SectionClass::SectionOnly)
}

/// Class of a single map, or `None` if it is not a section of `phi`.
pub fn classify_section(phi: &GroupHom, psi: &[usize]) -> Option<SectionClass> {
    let g = &phi.codomain;
    if psi.len() != g.order() || psi.iter().any(|&y| y >= phi.domain.order()) {
        return None;
    }
    if g.elements().any(|x| phi.apply(psi[x]) != x) {
        return None;
    }
    Some(Ctx::new(phi).classify(psi))
}

/// Classifies every section of `phi` with the default bound and mode.
pub fn classify_sections(phi: &GroupHom) -> Result<SectionReport, GroupError> {
    classify_sections_with(phi, SectionMode::Auto, DEFAULT_SECTION_BOUND)
}

pub fn classify_sections_with(phi: &GroupHom, mode: SectionMode, bound: u128) -> Result<SectionReport, GroupError> {
    if !phi.is_surjective() {
        return Err(GroupError::NotSurjective);
    }
    let g = &*phi.codomain;
    let fibers: Vec<Vec<usize>> = g.elements().map(|x| phi.fiber(x)).collect();
    let total = fibers
        .iter()
        .try_fold(1u128, |acc, f| acc.checked_mul(f.len() as u128))
        .unwrap_or(u128::MAX);
    let mode = match mode {
        SectionMode::Auto if total <= bound => SectionMode::Exhaustive,
        SectionMode::Auto => SectionMode::Backtracking,
        SectionMode::Exhaustive if total > bound => {
            return Err(GroupError::SectionBoundExceeded { total, bound });
        }
        m => m,
    };
    let mut report = SectionReport {
        mode,
        total_sections: total,
        splitting_count: 0,
        weak_count: 0,
        section_only_count: 0,
        splittings: Vec::new(),
        weak_splittings: Vec::new(),
        truncated: false,
    };
    let ctx = Ctx::new(phi);
    if mode == SectionMode::Exhaustive {
        exhaustive(&ctx, &fibers, &mut report);
    } else {
        let mut psi = vec![usize::MAX; g.order()];
        backtrack(&ctx, &fibers, 0, &mut psi, &mut report);
        report.section_only_count = total - u128::from(report.splitting_count) - u128::from(report.weak_count);
    }
    Ok(report)
}

/// Odometer over fibre choices, last element of G varying fastest.
fn exhaustive(ctx: &Ctx, fibers: &[Vec<usize>], report: &mut SectionReport) {
    let n = fibers.len();
    let mut choice = vec![0usize; n];
    let mut psi: Vec<usize> = fibers.iter().map(|f| f[0]).collect();
    loop {
        report.record(ctx.classify(&psi), &psi);
        let Some(pos) = (0..n).rev().find(|&i| choice[i] + 1 < fibers[i].len()) else {
            break;
        };
        choice[pos] += 1;
        psi[pos] = fibers[pos][choice[pos]];
        for i in pos + 1..n {
            choice[i] = 0;
            psi[i] = fibers[i][0];
        }
    }
}

/// Enumerates sections satisfying the inverse law, pruning on the centrality
/// condition as soon as all three of `x`, `y`, `xy` are assigned.
fn backtrack(ctx: &Ctx, fibers: &[Vec<usize>], x: usize, psi: &mut Vec<usize>, report: &mut SectionReport) {
    let (g, h) = (ctx.g, ctx.h);
    if x == g.order() {
        let class = if is_hom(psi, g, h) {
            SectionClass::Splitting
        } else {
            SectionClass::WeakSplitting
        };
        report.record(class, psi);
        return;
    }
    let xi = g.inv(x);
    let forced;
    let candidates: &[usize] = if x == 0 {
        &[0]
    } else if xi < x {
        forced = [h.inv(psi[xi])];
        &forced
    } else {
        &fibers[x]
    };
    for &c in candidates {
        if xi == x && h.inv(c) != c {
            continue;
        }
        psi[x] = c;
        let consistent = (0..=x).all(|a| {
            (0..=x).all(|b| {
                let ab = g.mul(a, b);
                ab > x || (a != x && b != x && ab != x) || ctx.cocycle_central(psi, a, b)
            })
        });
        if consistent {
            backtrack(ctx, fibers, x + 1, psi, report);
        }
    }
    psi[x] = usize::MAX;
}
