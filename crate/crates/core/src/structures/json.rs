//! JSON document form of structures and per-sort maps.

use serde::{Deserialize, Serialize};

use super::{SortedMap, SortedSignature, SortedStructure, StructureError};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SortDoc {
    pub name: String,
    pub size: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationDoc {
    pub name: String,
    pub signature: Vec<String>,
    #[serde(default)]
    pub tuples: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FunctionDoc {
    pub name: String,
    pub args: Vec<String>,
    pub target: String,
    /// Rows `[arg_1, .., arg_k, value]`.
    #[serde(default)]
    pub table: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstantDoc {
    pub name: String,
    pub sort: String,
    pub value: usize,
}

/// Serialized structure; field order and tuple order are canonical on write.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureDoc {
    pub sorts: Vec<SortDoc>,
    #[serde(default)]
    pub relations: Vec<RelationDoc>,
    #[serde(default)]
    pub functions: Vec<FunctionDoc>,
    #[serde(default)]
    pub constants: Vec<ConstantDoc>,
}

fn sort_lookup(sig: &SortedSignature, name: &str) -> Result<usize, StructureError> {
    sig.sort_index(name)
        .ok_or_else(|| StructureError::Json(format!("unknown sort {name:?}")))
}

impl From<&SortedStructure> for StructureDoc {
    fn from(s: &SortedStructure) -> Self {
        let sig = &s.signature;
        let names = |sorts: &[usize]| sorts.iter().map(|&i| sig.sorts[i].clone()).collect();
        StructureDoc {
            sorts: sig
                .sorts
                .iter()
                .zip(&s.sizes)
                .map(|(name, &size)| SortDoc {
                    name: name.clone(),
                    size,
                })
                .collect(),
            relations: sig
                .relations
                .iter()
                .zip(&s.relations)
                .map(|(sym, tuples)| RelationDoc {
                    name: sym.name.clone(),
                    signature: names(&sym.sorts),
                    tuples: tuples.iter().cloned().collect(),
                })
                .collect(),
            functions: sig
                .functions
                .iter()
                .zip(&s.functions)
                .map(|(sym, table)| FunctionDoc {
                    name: sym.name.clone(),
                    args: names(&sym.args),
                    target: sig.sorts[sym.target].clone(),
                    table: table
                        .iter()
                        .map(|(args, &v)| args.iter().copied().chain([v]).collect())
                        .collect(),
                })
                .collect(),
            constants: sig
                .constants
                .iter()
                .zip(&s.constants)
                .map(|(sym, &value)| ConstantDoc {
                    name: sym.name.clone(),
                    sort: sig.sorts[sym.sort].clone(),
                    value,
                })
                .collect(),
        }
    }
}

impl TryFrom<&StructureDoc> for SortedStructure {
    type Error = StructureError;

    fn try_from(doc: &StructureDoc) -> Result<Self, Self::Error> {
        let mut sig = SortedSignature::new(doc.sorts.iter().map(|s| s.name.clone()));
        let lookup_all = |sig: &SortedSignature, names: &[String]| -> Result<Vec<usize>, StructureError> {
            names.iter().map(|n| sort_lookup(sig, n)).collect()
        };
        for r in &doc.relations {
            let sorts = lookup_all(&sig, &r.signature)?;
            sig = sig.relation(r.name.clone(), &sorts);
        }
        for f in &doc.functions {
            let args = lookup_all(&sig, &f.args)?;
            let target = sort_lookup(&sig, &f.target)?;
            sig = sig.function(f.name.clone(), &args, target);
        }
        for c in &doc.constants {
            let sort = sort_lookup(&sig, &c.sort)?;
            sig = sig.constant(c.name.clone(), sort);
        }
        let mut s = SortedStructure::new(sig, doc.sorts.iter().map(|s| s.size).collect());
        for (i, r) in doc.relations.iter().enumerate() {
            s.relations[i] = r.tuples.iter().cloned().collect();
        }
        for (i, f) in doc.functions.iter().enumerate() {
            for row in &f.table {
                let Some((&v, args)) = row.split_last() else {
                    return Err(StructureError::Json(format!("empty table row in {:?}", f.name)));
                };
                if args.len() != f.args.len() {
                    return Err(StructureError::Json(format!("table row arity in {:?}", f.name)));
                }
                if s.functions[i].insert(args.to_vec(), v).is_some() {
                    return Err(StructureError::Json(format!("duplicate table row in {:?}", f.name)));
                }
            }
        }
        for (i, c) in doc.constants.iter().enumerate() {
            s.constants[i] = c.value;
        }
        let violations = s.validate();
        if let Some(v) = violations.first() {
            return Err(StructureError::Invalid(v.to_string()));
        }
        Ok(s)
    }
}

impl SortedStructure {
    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(StructureDoc::from(self)).expect("structure documents serialize")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&StructureDoc::from(self)).expect("structure documents serialize")
    }

    pub fn from_json_value(v: &serde_json::Value) -> Result<Self, StructureError> {
        let doc: StructureDoc = serde_json::from_value(v.clone()).map_err(|e| StructureError::Json(e.to_string()))?;
        SortedStructure::try_from(&doc)
    }

    pub fn from_json(text: &str) -> Result<Self, StructureError> {
        let doc: StructureDoc = serde_json::from_str(text).map_err(|e| StructureError::Json(e.to_string()))?;
        SortedStructure::try_from(&doc)
    }
}

/// A per-sort map as a JSON array of arrays.
pub fn map_to_json(m: &SortedMap) -> serde_json::Value {
    serde_json::json!(m.maps)
}

pub fn map_from_json(v: &serde_json::Value) -> Result<SortedMap, StructureError> {
    serde_json::from_value(v.clone())
        .map(SortedMap::new)
        .map_err(|e| StructureError::Json(e.to_string()))
}
