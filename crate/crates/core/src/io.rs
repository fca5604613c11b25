//! JSON file formats and Graphviz export.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::complex::{Complex, ScalarField, SimplexId, SimplexSet};
use crate::error::{Error, Result};
use crate::morse::VectorField;
use crate::pointdata::VertexField;
use crate::strat::Stratification;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimplexEntry {
    pub vertices: Vec<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
}

/// On-disk complex: simplices in id order, optional values, an optional
/// stratum name per simplex index and free-form metadata.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexFile {
    pub simplices: Vec<SimplexEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strata: Option<BTreeMap<String, String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meta: Option<serde_json::Value>,
}

/// A parsed complex file.
#[derive(Debug, Clone)]
pub struct Loaded {
    pub complex: Complex,
    values: Vec<Option<f64>>,
    pub strata: Option<Stratification>,
    pub meta: Option<serde_json::Value>,
}

impl Loaded {
    /// Whether every simplex carries a value.
    pub fn has_values(&self) -> bool {
        self.values.iter().all(Option::is_some)
    }

    pub fn field(&self) -> Result<ScalarField> {
        self.values
            .iter()
            .enumerate()
            .map(|(i, v)| v.ok_or_else(|| Error::MissingValue(self.complex.simplex(i).vertices.clone())))
            .collect::<Result<Vec<_>>>()
            .map(ScalarField::new)
    }
}

fn parse_err(e: serde_json::Error) -> Error {
    Error::Parse(e.to_string())
}

pub fn parse_complex(text: &str) -> Result<Loaded> {
    let file: ComplexFile = serde_json::from_str(text).map_err(parse_err)?;
    let complex = Complex::from_vertex_lists(file.simplices.iter().map(|s| &s.vertices))?;
    let values = file.simplices.iter().map(|s| s.value).collect();
    let strata = match &file.strata {
        None => None,
        Some(map) => {
            let mut groups: BTreeMap<&str, SimplexSet> = BTreeMap::new();
            for (idx, name) in map {
                let id: SimplexId = idx
                    .parse()
                    .map_err(|_| Error::Parse(format!("stratum key '{idx}' is not a simplex index")))?;
                complex.check_id(id)?;
                groups.entry(name.as_str()).or_default().insert(id);
            }
            Some(Stratification::new(&complex, groups)?)
        }
    };
    Ok(Loaded {
        complex,
        values,
        strata,
        meta: file.meta,
    })
}

pub fn complex_file(
    k: &Complex,
    f: Option<&ScalarField>,
    s: Option<&Stratification>,
    meta: Option<serde_json::Value>,
) -> ComplexFile {
    let simplices = k
        .simplices()
        .iter()
        .map(|sx| SimplexEntry {
            vertices: sx.vertices.clone(),
            value: f.map(|f| f.value(sx.id)),
        })
        .collect();
    let strata = s.map(|s| {
        (0..k.len())
            .filter_map(|a| s.stratum_of(a).map(|i| (a.to_string(), s.name(i).to_string())))
            .collect()
    });
    ComplexFile {
        simplices,
        strata,
        meta,
    }
}

pub fn complex_to_json(
    k: &Complex,
    f: Option<&ScalarField>,
    s: Option<&Stratification>,
    meta: Option<serde_json::Value>,
) -> String {
    to_json(&complex_file(k, f, s, meta))
}

/// Stratification file: a map from stratum name to simplex ids.
pub fn parse_stratification(text: &str, k: &Complex) -> Result<Stratification> {
    let map: BTreeMap<String, Vec<SimplexId>> = serde_json::from_str(text).map_err(parse_err)?;
    Stratification::from_map(k, &map)
}

pub fn stratification_to_json(s: &Stratification) -> String {
    to_json(&s.to_map())
}

/// Vertex field file: `{"vertices": {"<label>": value, ...}}`.
pub fn parse_vertex_field(text: &str) -> Result<VertexField> {
    serde_json::from_str(text).map_err(parse_err)
}

pub fn vertex_field_to_json(f0: &VertexField) -> String {
    to_json(f0)
}

/// Vector field file: a list of `[lower, upper]` id pairs.
pub fn parse_vector_field(text: &str, k: &Complex) -> Result<VectorField> {
    let pairs: Vec<[SimplexId; 2]> = serde_json::from_str(text).map_err(parse_err)?;
    VectorField::from_pairs(k, pairs.into_iter().map(|[a, b]| (a, b)))
}

pub fn vector_field_to_json(v: &VectorField) -> String {
    to_json(v)
}

pub fn parse_scalar_field(text: &str, k: &Complex) -> Result<ScalarField> {
    let f: ScalarField = serde_json::from_str(text).map_err(parse_err)?;
    if f.len() != k.len() {
        return Err(Error::Parse(format!(
            "scalar field has {} values for {} simplices",
            f.len(),
            k.len()
        )));
    }
    Ok(f)
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn label(k: &Complex, f: Option<&ScalarField>, a: SimplexId) -> String {
    match f {
        Some(f) => format!("{} : {}", k.simplex(a), f.value(a)),
        None => k.simplex(a).to_string(),
    }
}

/// Hasse diagram in DOT. Incidences are drawn from coface to face; gradient
/// pairs are drawn in green from face to coface.
pub fn to_dot(
    k: &Complex,
    f: Option<&ScalarField>,
    v: Option<&VectorField>,
    s: Option<&Stratification>,
) -> String {
    let mut out = String::from("digraph hasse {\n  rankdir=BT;\n  node [shape=box];\n");
    let node = |out: &mut String, a: SimplexId| {
        let _ = writeln!(out, "    s{a} [label=\"{}\"];", label(k, f, a));
    };
    match s {
        Some(s) => {
            for (i, (name, set)) in s.iter().enumerate() {
                let _ = writeln!(out, "  subgraph cluster_{i} {{\n    label=\"{name}\";");
                for a in set.iter() {
                    node(&mut out, a);
                }
                out.push_str("  }\n");
            }
        }
        None => {
            for a in 0..k.len() {
                node(&mut out, a);
            }
        }
    }
    for t in 0..k.len() {
        for &a in k.faces(t) {
            if v.is_some_and(|v| v.up(a) == Some(t)) {
                let _ = writeln!(out, "  s{a} -> s{t} [color=green, penwidth=2];");
            } else {
                let _ = writeln!(out, "  s{t} -> s{a};");
            }
        }
    }
    out.push_str("}\n");
    out
}
