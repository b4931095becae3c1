//! A small catalog of named finite groups and the search for surjections
//! that weakly split without splitting.

use std::sync::Arc;

use super::{are_isomorphic, classify_sections, quotient, FiniteGroup, GroupError, GroupHom, SectionReport};

const MAX_CATALOG_ORDER: usize = 32;

#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub name: String,
    pub group: Arc<FiniteGroup>,
}

/// Named families up to `max_order`, closed under binary direct products,
/// deduplicated up to isomorphism (first name wins), sorted by order.
pub fn catalog(max_order: usize) -> Result<Vec<CatalogEntry>, GroupError> {
    if max_order > MAX_CATALOG_ORDER {
        return Err(GroupError::CatalogBound(max_order));
    }
    let mut seeds: Vec<(String, FiniteGroup)> = Vec::new();
    seeds.push(("C1".into(), FiniteGroup::trivial()));
    for n in 2..=max_order {
        seeds.push((format!("C{n}"), FiniteGroup::cyclic(n)));
    }
    for n in 3..=4 {
        let order = (1..=n).product::<usize>();
        if order <= max_order {
            seeds.push((format!("S{n}"), FiniteGroup::symmetric(n)));
        }
        if order / 2 <= max_order {
            seeds.push((format!("A{n}"), FiniteGroup::alternating(n)));
        }
    }
    for n in 3..=max_order / 2 {
        seeds.push((format!("D{n}"), FiniteGroup::dihedral(n)));
    }
    for n in 2..=max_order / 4 {
        let name = match n {
            2 => "Q8".to_string(),
            4 => "Q16".to_string(),
            _ => format!("Dic{n}"),
        };
        seeds.push((name, FiniteGroup::dicyclic(n)));
    }
    let mut entries: Vec<CatalogEntry> = Vec::new();
    for (name, g) in seeds {
        add_unique(&mut entries, name, g);
    }
    loop {
        let before = entries.len();
        let snapshot = entries.clone();
        for (i, a) in snapshot.iter().enumerate() {
            for b in &snapshot[..=i] {
                if a.group.order() < 2 || b.group.order() < 2 || a.group.order() * b.group.order() > max_order {
                    continue;
                }
                let (big, small) = if a.group.order() >= b.group.order() {
                    (a, b)
                } else {
                    (b, a)
                };
                let name = format!("{}x{}", big.name, small.name);
                add_unique(
                    &mut entries,
                    name,
                    FiniteGroup::direct_product(&big.group, &small.group),
                );
            }
        }
        if entries.len() == before {
            break;
        }
    }
    entries.sort_by_key(|e| e.group.order());
    Ok(entries)
}

fn add_unique(entries: &mut Vec<CatalogEntry>, name: String, g: FiniteGroup) {
    let duplicate = entries
        .iter()
        .any(|e| e.group.order() == g.order() && are_isomorphic(&e.group, &g));
    if !duplicate {
        entries.push(CatalogEntry {
            name,
            group: Arc::new(g),
        });
    }
}

/// One surjection `G -> G/N` and the classification of its sections.
#[derive(Clone, Debug)]
pub struct QuotientCase {
    pub group: String,
    pub normal: Vec<usize>,
    pub hom: GroupHom,
    pub report: SectionReport,
}

#[derive(Clone, Debug)]
pub struct CatalogSearch {
    pub max_order: usize,
    pub cases: Vec<QuotientCase>,
}

impl CatalogSearch {
    /// Cases with a weak splitting but no splitting.
    pub fn witnesses(&self) -> impl Iterator<Item = &QuotientCase> {
        self.cases.iter().filter(|c| c.report.is_weak_not_strong())
    }
}

/// Classifies the sections of `G -> G/N` for every catalog group `G` of order
/// at most `max_order` and every proper nontrivial normal subgroup `N`.
pub fn catalog_search_weak_not_strong(max_order: usize) -> Result<CatalogSearch, GroupError> {
    let mut cases = Vec::new();
    for entry in catalog(max_order)? {
        let g = &entry.group;
        for normal in g.normal_subgroups() {
            if normal.len() == 1 || normal.len() == g.order() {
                continue;
            }
            let (_, hom) = quotient(g, &normal)?;
            let report = classify_sections(&hom)?;
            cases.push(QuotientCase {
                group: entry.name.clone(),
                normal,
                hom,
                report,
            });
        }
    }
    Ok(CatalogSearch { max_order, cases })
}
