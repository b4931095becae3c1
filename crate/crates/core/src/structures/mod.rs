//! Finite multi-sorted first-order structures.
//!
//! Elements are dense 0-based indices inside their sort, so two structures
//! live on "the same universe" exactly when their `sizes` agree. Relations are
//! stored as ordered tuple sets and functions as explicit tables, which keeps
//! equality structural and serialization canonical.

mod json;
mod search;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

pub use json::{map_from_json, map_to_json, StructureDoc};
pub use search::{
    automorphisms, automorphisms_within, canonical_copies, canonical_copies_with_maps, canonical_copies_within,
    first_isomorphism, for_each_isomorphism, isomorphisms, isomorphisms_within, DEFAULT_MAX_ELEMENTS,
};

/// An element of a structure: `(sort index, element index)`.
pub type Element = (usize, usize);

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum StructureError {
    #[error("unknown symbol {0:?}")]
    UnknownSymbol(String),
    #[error("sort index {0} out of range")]
    SortOutOfRange(usize),
    #[error("reduct must keep at least one sort")]
    EmptyReduct,
    #[error("structure has {total} elements, search bound is {bound}")]
    SizeBoundExceeded { total: usize, bound: usize },
    #[error("signatures differ")]
    SignatureMismatch,
    #[error("map is not a per-sort bijection of the universe")]
    NotBijective,
    #[error("quotient requires a relational structure (found function or constant symbols)")]
    NotRelational,
    #[error("sort {sort}: relation is not an equivalence ({reason})")]
    NotEquivalence { sort: usize, reason: &'static str },
    #[error("relation {relation:?} is not invariant under the equivalence")]
    CongruenceViolation { relation: String },
    #[error("target signature is not a reduct of this structure: {0}")]
    NotAnExpansion(String),
    #[error("invalid structure: {0}")]
    Invalid(String),
    #[error("json: {0}")]
    Json(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RelationSymbol {
    pub name: String,
    pub sorts: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FunctionSymbol {
    pub name: String,
    pub args: Vec<usize>,
    pub target: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ConstantSymbol {
    pub name: String,
    pub sort: usize,
}

/// Vocabulary of a multi-sorted structure.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct SortedSignature {
    pub sorts: Vec<String>,
    pub relations: Vec<RelationSymbol>,
    pub functions: Vec<FunctionSymbol>,
    pub constants: Vec<ConstantSymbol>,
}

impl SortedSignature {
    pub fn new<S: Into<String>>(sorts: impl IntoIterator<Item = S>) -> Self {
        SortedSignature {
            sorts: sorts.into_iter().map(Into::into).collect(),
            ..Default::default()
        }
    }

    pub fn relation(mut self, name: impl Into<String>, sorts: &[usize]) -> Self {
        self.relations.push(RelationSymbol {
            name: name.into(),
            sorts: sorts.to_vec(),
        });
        self
    }

    pub fn function(mut self, name: impl Into<String>, args: &[usize], target: usize) -> Self {
        self.functions.push(FunctionSymbol {
            name: name.into(),
            args: args.to_vec(),
            target,
        });
        self
    }

    pub fn constant(mut self, name: impl Into<String>, sort: usize) -> Self {
        self.constants.push(ConstantSymbol {
            name: name.into(),
            sort,
        });
        self
    }

    pub fn sort_count(&self) -> usize {
        self.sorts.len()
    }

    pub fn sort_index(&self, name: &str) -> Option<usize> {
        self.sorts.iter().position(|s| s == name)
    }

    pub fn relation_index(&self, name: &str) -> Option<usize> {
        self.relations.iter().position(|r| r.name == name)
    }

    pub fn function_index(&self, name: &str) -> Option<usize> {
        self.functions.iter().position(|f| f.name == name)
    }

    pub fn constant_index(&self, name: &str) -> Option<usize> {
        self.constants.iter().position(|c| c.name == name)
    }

    pub fn is_relational(&self) -> bool {
        self.functions.is_empty() && self.constants.is_empty()
    }

    /// Signature problems: no sorts, out-of-range sort indices, duplicate names.
    pub fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let n = self.sorts.len();
        if n == 0 {
            out.push(Violation::NoSorts);
        }
        let mut check = |symbol: &str, idx: usize| {
            if idx >= n {
                out.push(Violation::SortIndexOutOfRange {
                    symbol: symbol.to_string(),
                    sort: idx,
                });
            }
        };
        for r in &self.relations {
            r.sorts.iter().for_each(|&i| check(&r.name, i));
        }
        for f in &self.functions {
            f.args.iter().for_each(|&i| check(&f.name, i));
            check(&f.name, f.target);
        }
        for c in &self.constants {
            check(&c.name, c.sort);
        }
        let mut seen = BTreeSet::new();
        let names = self
            .relations
            .iter()
            .map(|r| &r.name)
            .chain(self.functions.iter().map(|f| &f.name))
            .chain(self.constants.iter().map(|c| &c.name));
        for name in names {
            if !seen.insert(name.clone()) {
                out.push(Violation::DuplicateSymbol(name.clone()));
            }
        }
        let mut sort_names = BTreeSet::new();
        for s in &self.sorts {
            if !sort_names.insert(s) {
                out.push(Violation::DuplicateSort(s.clone()));
            }
        }
        out
    }
}

/// A single failed invariant reported by [`SortedStructure::validate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    NoSorts,
    DuplicateSort(String),
    DuplicateSymbol(String),
    SortIndexOutOfRange { symbol: String, sort: usize },
    SizesMismatch,
    EmptySort(usize),
    TupleArity { relation: String },
    TupleOutOfRange { relation: String, tuple: Vec<usize> },
    FunctionEntryOutOfRange { function: String },
    FunctionNotTotal { function: String, missing: usize },
    ConstantOutOfRange { constant: String },
    SymbolCountMismatch,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoSorts => write!(f, "signature has no sorts"),
            Violation::DuplicateSort(s) => write!(f, "duplicate sort name {s:?}"),
            Violation::DuplicateSymbol(s) => write!(f, "duplicate symbol name {s:?}"),
            Violation::SortIndexOutOfRange { symbol, sort } => {
                write!(f, "symbol {symbol:?} uses sort index {sort} out of range")
            }
            Violation::SizesMismatch => write!(f, "sort size list does not match signature"),
            Violation::EmptySort(s) => write!(f, "universe of sort {s} is empty"),
            Violation::TupleArity { relation } => {
                write!(f, "tuple arity mismatch in relation {relation:?}")
            }
            Violation::TupleOutOfRange { relation, tuple } => {
                write!(f, "tuple out of range in relation {relation:?}: {tuple:?}")
            }
            Violation::FunctionEntryOutOfRange { function } => {
                write!(f, "function table entry out of range in {function:?}")
            }
            Violation::FunctionNotTotal { function, missing } => {
                write!(f, "function not total: {function:?} misses {missing} argument tuples")
            }
            Violation::ConstantOutOfRange { constant } => {
                write!(f, "constant {constant:?} out of range")
            }
            Violation::SymbolCountMismatch => {
                write!(f, "interpretation count does not match signature")
            }
        }
    }
}

/// A finite n-sorted structure.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SortedStructure {
    pub signature: SortedSignature,
    pub sizes: Vec<usize>,
    pub relations: Vec<BTreeSet<Vec<usize>>>,
    pub functions: Vec<BTreeMap<Vec<usize>, usize>>,
    pub constants: Vec<usize>,
}

impl SortedStructure {
    /// Empty interpretation: no tuples, empty function tables, constants at 0.
    pub fn new(signature: SortedSignature, sizes: Vec<usize>) -> Self {
        let relations = vec![BTreeSet::new(); signature.relations.len()];
        let functions = vec![BTreeMap::new(); signature.functions.len()];
        let constants = vec![0; signature.constants.len()];
        SortedStructure {
            signature,
            sizes,
            relations,
            functions,
            constants,
        }
    }

    pub fn insert(&mut self, relation: &str, tuple: &[usize]) -> Result<(), StructureError> {
        let i = self
            .signature
            .relation_index(relation)
            .ok_or_else(|| StructureError::UnknownSymbol(relation.to_string()))?;
        self.relations[i].insert(tuple.to_vec());
        Ok(())
    }

    pub fn define(&mut self, function: &str, args: &[usize], value: usize) -> Result<(), StructureError> {
        let i = self
            .signature
            .function_index(function)
            .ok_or_else(|| StructureError::UnknownSymbol(function.to_string()))?;
        self.functions[i].insert(args.to_vec(), value);
        Ok(())
    }

    pub fn set_constant(&mut self, constant: &str, value: usize) -> Result<(), StructureError> {
        let i = self
            .signature
            .constant_index(constant)
            .ok_or_else(|| StructureError::UnknownSymbol(constant.to_string()))?;
        self.constants[i] = value;
        Ok(())
    }

    pub fn sort_count(&self) -> usize {
        self.sizes.len()
    }

    pub fn total_elements(&self) -> usize {
        self.sizes.iter().sum()
    }

    pub fn elements(&self) -> impl Iterator<Item = Element> + '_ {
        self.sizes
            .iter()
            .enumerate()
            .flat_map(|(s, &n)| (0..n).map(move |i| (s, i)))
    }

    pub fn is_relational(&self) -> bool {
        self.signature.is_relational()
    }

    /// Checks every structural invariant; an empty list means the structure is valid.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = self.signature.violations();
        let sig = &self.signature;
        if self.sizes.len() != sig.sorts.len() {
            out.push(Violation::SizesMismatch);
            return out;
        }
        if self.relations.len() != sig.relations.len()
            || self.functions.len() != sig.functions.len()
            || self.constants.len() != sig.constants.len()
        {
            out.push(Violation::SymbolCountMismatch);
            return out;
        }
        if !out.is_empty() {
            return out;
        }
        for (s, &n) in self.sizes.iter().enumerate() {
            if n == 0 {
                out.push(Violation::EmptySort(s));
            }
        }
        for (sym, tuples) in sig.relations.iter().zip(&self.relations) {
            for t in tuples {
                if t.len() != sym.sorts.len() {
                    out.push(Violation::TupleArity {
                        relation: sym.name.clone(),
                    });
                } else if t.iter().zip(&sym.sorts).any(|(&e, &s)| e >= self.sizes[s]) {
                    out.push(Violation::TupleOutOfRange {
                        relation: sym.name.clone(),
                        tuple: t.clone(),
                    });
                }
            }
        }
        for (sym, table) in sig.functions.iter().zip(&self.functions) {
            let mut in_range = 0usize;
            for (args, &v) in table {
                let ok = args.len() == sym.args.len()
                    && args.iter().zip(&sym.args).all(|(&e, &s)| e < self.sizes[s])
                    && v < self.sizes[sym.target];
                if ok {
                    in_range += 1;
                } else {
                    out.push(Violation::FunctionEntryOutOfRange {
                        function: sym.name.clone(),
                    });
                }
            }
            let domain: usize = sym.args.iter().map(|&s| self.sizes[s]).product();
            if in_range < domain {
                out.push(Violation::FunctionNotTotal {
                    function: sym.name.clone(),
                    missing: domain - in_range,
                });
            }
        }
        for (sym, &c) in sig.constants.iter().zip(&self.constants) {
            if c >= self.sizes[sym.sort] {
                out.push(Violation::ConstantOutOfRange {
                    constant: sym.name.clone(),
                });
            }
        }
        out
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    /// Restriction to the sorts in `keep`, dropping every symbol that touches
    /// another sort. Kept sorts are renumbered in increasing original order.
    pub fn reduct(&self, keep: &[usize]) -> Result<SortedStructure, StructureError> {
        let keep: BTreeSet<usize> = keep.iter().copied().collect();
        if keep.is_empty() {
            return Err(StructureError::EmptyReduct);
        }
        if let Some(&bad) = keep.iter().find(|&&s| s >= self.sort_count()) {
            return Err(StructureError::SortOutOfRange(bad));
        }
        let renumber: BTreeMap<usize, usize> = keep.iter().enumerate().map(|(new, &old)| (old, new)).collect();
        let remap =
            |sorts: &[usize]| -> Option<Vec<usize>> { sorts.iter().map(|s| renumber.get(s).copied()).collect() };
        let mut sig = SortedSignature::new(keep.iter().map(|&s| self.signature.sorts[s].clone()));
        let mut relations = Vec::new();
        for (sym, tuples) in self.signature.relations.iter().zip(&self.relations) {
            if let Some(sorts) = remap(&sym.sorts) {
                sig.relations.push(RelationSymbol {
                    name: sym.name.clone(),
                    sorts,
                });
                relations.push(tuples.clone());
            }
        }
        let mut functions = Vec::new();
        for (sym, table) in self.signature.functions.iter().zip(&self.functions) {
            if let (Some(args), Some(&target)) = (remap(&sym.args), renumber.get(&sym.target)) {
                sig.functions.push(FunctionSymbol {
                    name: sym.name.clone(),
                    args,
                    target,
                });
                functions.push(table.clone());
            }
        }
        let mut constants = Vec::new();
        for (sym, &c) in self.signature.constants.iter().zip(&self.constants) {
            if let Some(&sort) = renumber.get(&sym.sort) {
                sig.constants.push(ConstantSymbol {
                    name: sym.name.clone(),
                    sort,
                });
                constants.push(c);
            }
        }
        Ok(SortedStructure {
            signature: sig,
            sizes: keep.iter().map(|&s| self.sizes[s]).collect(),
            relations,
            functions,
            constants,
        })
    }

    /// Drops the symbols not present in `target`; sorts must coincide and every
    /// target symbol must occur here with the same profile.
    pub fn reduct_to_signature(&self, target: &SortedSignature) -> Result<SortedStructure, StructureError> {
        let sig = &self.signature;
        if sig.sorts != target.sorts {
            return Err(StructureError::NotAnExpansion("sorts differ".into()));
        }
        let mut out = SortedStructure::new(target.clone(), self.sizes.clone());
        for (i, sym) in target.relations.iter().enumerate() {
            let j = sig
                .relations
                .iter()
                .position(|r| r == sym)
                .ok_or_else(|| StructureError::NotAnExpansion(format!("missing relation {:?}", sym.name)))?;
            out.relations[i] = self.relations[j].clone();
        }
        for (i, sym) in target.functions.iter().enumerate() {
            let j = sig
                .functions
                .iter()
                .position(|f| f == sym)
                .ok_or_else(|| StructureError::NotAnExpansion(format!("missing function {:?}", sym.name)))?;
            out.functions[i] = self.functions[j].clone();
        }
        for (i, sym) in target.constants.iter().enumerate() {
            let j = sig
                .constants
                .iter()
                .position(|c| c == sym)
                .ok_or_else(|| StructureError::NotAnExpansion(format!("missing constant {:?}", sym.name)))?;
            out.constants[i] = self.constants[j];
        }
        Ok(out)
    }

    /// Transports the structure along the per-sort bijection `b`, so that `b`
    /// becomes an isomorphism `self -> result`.
    pub fn relabel(&self, b: &SortedMap) -> Result<SortedStructure, StructureError> {
        if !b.is_bijection_on(&self.sizes) {
            return Err(StructureError::NotBijective);
        }
        let sig = &self.signature;
        let relations = sig
            .relations
            .iter()
            .zip(&self.relations)
            .map(|(sym, tuples)| tuples.iter().map(|t| b.apply_tuple(&sym.sorts, t)).collect())
            .collect();
        let functions = sig
            .functions
            .iter()
            .zip(&self.functions)
            .map(|(sym, table)| {
                table
                    .iter()
                    .map(|(args, &v)| (b.apply_tuple(&sym.args, args), b.apply(sym.target, v)))
                    .collect()
            })
            .collect();
        let constants = sig
            .constants
            .iter()
            .zip(&self.constants)
            .map(|(sym, &c)| b.apply(sym.sort, c))
            .collect();
        Ok(SortedStructure {
            signature: sig.clone(),
            sizes: self.sizes.clone(),
            relations,
            functions,
            constants,
        })
    }

    /// True iff `m` is a per-sort bijection that maps `self` onto `other`
    /// preserving every symbol in both directions.
    pub fn is_isomorphism_to(&self, other: &SortedStructure, m: &SortedMap) -> bool {
        if self.signature != other.signature || self.sizes != other.sizes {
            return false;
        }
        match self.relabel(m) {
            Ok(image) => image == *other,
            Err(_) => false,
        }
    }

    pub fn is_automorphism(&self, m: &SortedMap) -> bool {
        self.is_isomorphism_to(self, m)
    }

    /// Quotient of a relational structure by a per-sort congruence.
    ///
    /// Classes are numbered by their smallest member. The congruence
    /// condition is verified exhaustively: the preimage of the class-level
    /// relation must coincide with the original relation.
    pub fn quotient(&self, eq: &[Equivalence]) -> Result<(SortedStructure, SortedMap), StructureError> {
        if !self.is_relational() {
            return Err(StructureError::NotRelational);
        }
        if eq.len() != self.sort_count() {
            return Err(StructureError::Invalid("one equivalence per sort required".into()));
        }
        let mut class_of = Vec::with_capacity(eq.len());
        let mut class_sizes = Vec::with_capacity(eq.len());
        for (sort, e) in eq.iter().enumerate() {
            if e.size() != self.sizes[sort] {
                return Err(StructureError::Invalid(format!(
                    "equivalence for sort {sort} has the wrong size"
                )));
            }
            let labels = e
                .class_labels()
                .map_err(|reason| StructureError::NotEquivalence { sort, reason })?;
            let count = labels.iter().copied().max().map_or(0, |m| m + 1);
            let mut sizes = vec![0usize; count];
            labels.iter().for_each(|&c| sizes[c] += 1);
            class_of.push(labels);
            class_sizes.push(sizes);
        }
        let projection = SortedMap::new(class_of.clone());
        let mut relations = Vec::with_capacity(self.relations.len());
        for (sym, tuples) in self.signature.relations.iter().zip(&self.relations) {
            let classes: BTreeSet<Vec<usize>> = tuples.iter().map(|t| projection.apply_tuple(&sym.sorts, t)).collect();
            let preimage_size: usize = classes
                .iter()
                .map(|ct| {
                    ct.iter()
                        .zip(&sym.sorts)
                        .map(|(&c, &s)| class_sizes[s][c])
                        .product::<usize>()
                })
                .sum();
            if preimage_size != tuples.len() {
                return Err(StructureError::CongruenceViolation {
                    relation: sym.name.clone(),
                });
            }
            relations.push(classes);
        }
        let quotient = SortedStructure {
            signature: self.signature.clone(),
            sizes: class_sizes.iter().map(Vec::len).collect(),
            relations,
            functions: Vec::new(),
            constants: Vec::new(),
        };
        Ok((quotient, projection))
    }

    /// Lists every relation tuple as `(relation index, tuple)`.
    pub fn tuples(&self) -> impl Iterator<Item = (usize, &Vec<usize>)> {
        self.relations
            .iter()
            .enumerate()
            .flat_map(|(i, ts)| ts.iter().map(move |t| (i, t)))
    }
}

/// An equivalence relation on `0..size`, given as a set of related pairs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Equivalence {
    size: usize,
    pairs: BTreeSet<(usize, usize)>,
}

impl Equivalence {
    pub fn from_pairs(size: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Self {
        Equivalence {
            size,
            pairs: pairs.into_iter().collect(),
        }
    }

    /// The equivalence whose classes are the fibres of `labels`.
    pub fn from_labels(labels: &[usize]) -> Self {
        let n = labels.len();
        let pairs = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .filter(|&(i, j)| labels[i] == labels[j]);
        Equivalence::from_pairs(n, pairs)
    }

    pub fn identity(size: usize) -> Self {
        Equivalence::from_pairs(size, (0..size).map(|i| (i, i)))
    }

    pub fn total(size: usize) -> Self {
        Equivalence::from_pairs(size, (0..size).flat_map(|i| (0..size).map(move |j| (i, j))))
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn related(&self, a: usize, b: usize) -> bool {
        self.pairs.contains(&(a, b))
    }

    /// Class index per element (classes numbered by smallest member), or the
    /// first failed equivalence axiom.
    pub fn class_labels(&self) -> Result<Vec<usize>, &'static str> {
        let n = self.size;
        if self.pairs.iter().any(|&(a, b)| a >= n || b >= n) {
            return Err("pair out of range");
        }
        if (0..n).any(|i| !self.related(i, i)) {
            return Err("not reflexive");
        }
        if self.pairs.iter().any(|&(a, b)| !self.related(b, a)) {
            return Err("not symmetric");
        }
        for &(a, b) in &self.pairs {
            for c in 0..n {
                if self.related(b, c) && !self.related(a, c) {
                    return Err("not transitive");
                }
            }
        }
        let mut labels = vec![usize::MAX; n];
        let mut next = 0;
        for i in 0..n {
            if labels[i] == usize::MAX {
                for j in i..n {
                    if self.related(i, j) {
                        labels[j] = next;
                    }
                }
                next += 1;
            }
        }
        Ok(labels)
    }
}

/// Per-sort family of maps; the carrier of isomorphisms and automorphisms.
///
/// `maps[s][i]` is the image of element `i` of sort `s`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SortedMap {
    pub maps: Vec<Vec<usize>>,
}

impl SortedMap {
    pub fn new(maps: Vec<Vec<usize>>) -> Self {
        SortedMap { maps }
    }

    pub fn identity(sizes: &[usize]) -> Self {
        SortedMap::new(sizes.iter().map(|&n| (0..n).collect()).collect())
    }

    pub fn sort_count(&self) -> usize {
        self.maps.len()
    }

    pub fn apply(&self, sort: usize, e: usize) -> usize {
        self.maps[sort][e]
    }

    pub fn apply_element(&self, (sort, e): Element) -> Element {
        (sort, self.maps[sort][e])
    }

    pub fn apply_tuple(&self, sorts: &[usize], t: &[usize]) -> Vec<usize> {
        t.iter().zip(sorts).map(|(&e, &s)| self.maps[s][e]).collect()
    }

    /// True iff every per-sort map is a permutation of `0..sizes[s]`.
    pub fn is_bijection_on(&self, sizes: &[usize]) -> bool {
        self.maps.len() == sizes.len()
            && self.maps.iter().zip(sizes).all(|(m, &n)| {
                let mut seen = vec![false; n];
                m.len() == n && m.iter().all(|&x| x < n && !std::mem::replace(&mut seen[x], true))
            })
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &SortedMap) -> SortedMap {
        SortedMap::new(
            other
                .maps
                .iter()
                .zip(&self.maps)
                .map(|(inner, outer)| inner.iter().map(|&x| outer[x]).collect())
                .collect(),
        )
    }

    /// Inverse of a per-sort bijection.
    pub fn inverse(&self) -> SortedMap {
        SortedMap::new(
            self.maps
                .iter()
                .map(|m| {
                    let mut inv = vec![0; m.len()];
                    m.iter().enumerate().for_each(|(i, &x)| inv[x] = i);
                    inv
                })
                .collect(),
        )
    }

    /// Keeps the per-sort maps of the listed sorts.
    pub fn restrict(&self, sorts: &[usize]) -> SortedMap {
        SortedMap::new(sorts.iter().map(|&s| self.maps[s].clone()).collect())
    }

    pub fn is_identity(&self) -> bool {
        self.maps.iter().all(|m| m.iter().enumerate().all(|(i, &x)| i == x))
    }
}
