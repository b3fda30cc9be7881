//! JSON model files: `{"worlds": [...], "edges": [[a, b], ...], "val": {"p": [...]}}`.
//! Space files use the key `"preorder"` in place of `"edges"`.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{Frame, Model};
use crate::symbol::Symbol;
use crate::worldset::WorldSet;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormatError {
    #[error("malformed JSON: {0}")]
    Json(String),
    #[error("duplicate world name {0:?}")]
    DuplicateWorld(String),
    #[error("unknown world name {0:?}")]
    UnknownWorld(String),
    #[error("duplicate edge {0:?} -> {1:?}")]
    DuplicateEdge(String, String),
    #[error("missing key {0:?}")]
    MissingKey(&'static str),
    #[error("invalid atom name {0:?}")]
    InvalidAtom(String),
    #[error("{0}")]
    Invalid(String),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFile {
    worlds: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    edges: Option<Vec<(String, String)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    preorder: Option<Vec<(String, String)>>,
    #[serde(default)]
    val: BTreeMap<String, Vec<String>>,
}

/// Which key carries the relation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RelationKey {
    Edges,
    Preorder,
}

impl RelationKey {
    fn name(self) -> &'static str {
        match self {
            RelationKey::Edges => "edges",
            RelationKey::Preorder => "preorder",
        }
    }
}

/// A model with the world names from its file. Indices follow file order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NamedModel {
    pub names: Vec<String>,
    pub model: Model,
}

impl NamedModel {
    pub fn with_default_names(model: Model) -> NamedModel {
        let names = (0..model.len()).map(|i| format!("w{i}")).collect();
        NamedModel { names, model }
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn names_of(&self, set: &WorldSet) -> Vec<String> {
        set.iter().map(|w| self.names[w].clone()).collect()
    }
}

fn valid_atom(name: &str) -> bool {
    let mut chars = name.chars();
    chars.next().is_some_and(|c| c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
        && !matches!(name, "T" | "F" | "nu" | "mu" | "tangle_d" | "tangle_c")
}

/// Reads a model file whose relation sits under `key`.
pub fn parse_relational(text: &str, key: RelationKey) -> Result<NamedModel, FormatError> {
    let raw: RawFile = serde_json::from_str(text).map_err(|e| FormatError::Json(e.to_string()))?;
    let (pairs, other) = match key {
        RelationKey::Edges => (raw.edges, raw.preorder),
        RelationKey::Preorder => (raw.preorder, raw.edges),
    };
    if other.is_some() {
        return Err(FormatError::Invalid(format!(
            "unexpected key; this file kind uses {:?}",
            key.name()
        )));
    }
    let pairs = pairs.ok_or(FormatError::MissingKey(key.name()))?;
    let mut index = HashMap::new();
    for (i, name) in raw.worlds.iter().enumerate() {
        if index.insert(name.clone(), i).is_some() {
            return Err(FormatError::DuplicateWorld(name.clone()));
        }
    }
    let n = raw.worlds.len();
    let lookup = |name: &String| {
        index
            .get(name)
            .copied()
            .ok_or_else(|| FormatError::UnknownWorld(name.clone()))
    };
    let mut frame = Frame::new(n);
    for (a, b) in &pairs {
        let (i, j) = (lookup(a)?, lookup(b)?);
        if frame.has_edge(i, j) {
            return Err(FormatError::DuplicateEdge(a.clone(), b.clone()));
        }
        frame.add_edge(i, j);
    }
    let mut model = Model::new(frame);
    for (atom, worlds) in &raw.val {
        if !valid_atom(atom) {
            return Err(FormatError::InvalidAtom(atom.clone()));
        }
        let mut set = WorldSet::empty(n);
        for w in worlds {
            set.insert(lookup(w)?);
        }
        model.valuation.insert(Symbol::new(atom), set);
    }
    Ok(NamedModel {
        names: raw.worlds,
        model,
    })
}

pub fn parse_model(text: &str) -> Result<NamedModel, FormatError> {
    parse_relational(text, RelationKey::Edges)
}

/// Serializes with the relation under `key`; edges in lexicographic index order.
pub fn to_json_value(m: &NamedModel, key: RelationKey) -> serde_json::Value {
    let pairs: Vec<(String, String)> = m
        .model
        .frame
        .edges()
        .map(|(a, b)| (m.names[a].clone(), m.names[b].clone()))
        .collect();
    let val = m
        .model
        .valuation
        .iter()
        .map(|(p, set)| (p.as_str().to_owned(), m.names_of(set)))
        .collect();
    let raw = RawFile {
        worlds: m.names.clone(),
        edges: (key == RelationKey::Edges).then(|| pairs.clone()),
        preorder: (key == RelationKey::Preorder).then_some(pairs),
        val,
    };
    serde_json::to_value(raw).expect("model serializes")
}

pub fn model_to_json(m: &NamedModel) -> String {
    serde_json::to_string_pretty(&to_json_value(m, RelationKey::Edges)).expect("model serializes")
}
