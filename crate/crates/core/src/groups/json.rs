//! JSON document forms of groups and homomorphisms.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{FiniteGroup, GroupError, GroupHom};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupDoc {
    pub order: usize,
    pub table: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub names: Option<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomDoc {
    pub domain: GroupDoc,
    pub codomain: GroupDoc,
    pub map: Vec<usize>,
}

impl From<&FiniteGroup> for GroupDoc {
    fn from(g: &FiniteGroup) -> Self {
        GroupDoc {
            order: g.order(),
            table: g.table().to_vec(),
            names: Some(g.names().to_vec()),
        }
    }
}

impl TryFrom<&GroupDoc> for FiniteGroup {
    type Error = GroupError;

    fn try_from(doc: &GroupDoc) -> Result<Self, GroupError> {
        if doc.table.len() != doc.order {
            return Err(GroupError::InvalidTable(format!(
                "order {} but table has {} rows",
                doc.order,
                doc.table.len()
            )));
        }
        FiniteGroup::from_table(doc.table.clone(), doc.names.clone())
    }
}

impl From<&GroupHom> for HomDoc {
    fn from(h: &GroupHom) -> Self {
        HomDoc {
            domain: GroupDoc::from(&*h.domain),
            codomain: GroupDoc::from(&*h.codomain),
            map: h.map.clone(),
        }
    }
}

impl TryFrom<&HomDoc> for GroupHom {
    type Error = GroupError;

    fn try_from(doc: &HomDoc) -> Result<Self, GroupError> {
        let domain = Arc::new(FiniteGroup::try_from(&doc.domain)?);
        let codomain = Arc::new(FiniteGroup::try_from(&doc.codomain)?);
        GroupHom::new(domain, codomain, doc.map.clone())
    }
}

impl FiniteGroup {
    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(GroupDoc::from(self)).expect("group documents serialize")
    }

    pub fn from_json_value(v: &serde_json::Value) -> Result<Self, GroupError> {
        let doc: GroupDoc = serde_json::from_value(v.clone()).map_err(|e| GroupError::Json(e.to_string()))?;
        FiniteGroup::try_from(&doc)
    }
}

impl GroupHom {
    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(HomDoc::from(self)).expect("hom documents serialize")
    }

    pub fn from_json_value(v: &serde_json::Value) -> Result<Self, GroupError> {
        let doc: HomDoc = serde_json::from_value(v.clone()).map_err(|e| GroupError::Json(e.to_string()))?;
        GroupHom::try_from(&doc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hom_round_trip() {
        let h = GroupHom::new(
            Arc::new(FiniteGroup::cyclic(4)),
            Arc::new(FiniteGroup::cyclic(2)),
            vec![0, 1, 0, 1],
        )
        .unwrap();
        let v = h.to_json_value();
        assert_eq!(GroupHom::from_json_value(&v).unwrap(), h);
        let bad = serde_json::json!({"domain": v["domain"], "codomain": v["codomain"], "map": [0, 1, 1, 1]});
        assert_eq!(GroupHom::from_json_value(&bad), Err(GroupError::NotHomomorphism));
    }

    #[test]
    fn names_are_optional() {
        let v = serde_json::json!({"order": 2, "table": [[0, 1], [1, 0]]});
        assert_eq!(FiniteGroup::from_json_value(&v).unwrap().name(1), "1");
    }
}
