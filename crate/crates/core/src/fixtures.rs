//! Small complexes with known answers, bundled into the library.

use crate::complex::{Complex, ScalarField, SimplexId};
use crate::error::{Error, Result};
use crate::io::parse_complex;

const FILES: &[(&str, &str)] = &[
    ("pentagon-down", include_str!("../fixtures/pentagon-down.json")),
    ("tetrahedron", include_str!("../fixtures/tetrahedron.json")),
    ("pentagon", include_str!("../fixtures/pentagon.json")),
    ("split-octagon", include_str!("../fixtures/split-octagon.json")),
    ("split-square", include_str!("../fixtures/split-square.json")),
    ("circle", include_str!("../fixtures/circle.json")),
];

#[derive(Debug, Clone)]
pub struct Fixture {
    pub name: &'static str,
    pub complex: Complex,
    pub values: ScalarField,
    pub reconstructed: bool,
    pub source: &'static str,
}

impl Fixture {
    /// The simplex carrying value `x`; fixture values are distinct.
    pub fn by_value(&self, x: f64) -> SimplexId {
        self.values
            .values()
            .iter()
            .position(|&y| y == x)
            .unwrap_or_else(|| panic!("no simplex with value {x} in {}", self.name))
    }

    pub fn by_values(&self, xs: &[f64]) -> Vec<SimplexId> {
        xs.iter().map(|&x| self.by_value(x)).collect()
    }

    pub fn value_of(&self, s: SimplexId) -> f64 {
        self.values.value(s)
    }
}

pub fn names() -> impl Iterator<Item = &'static str> {
    FILES.iter().map(|(n, _)| *n)
}

pub fn load(name: &str) -> Result<Fixture> {
    let (name, source) = FILES
        .iter()
        .find(|(n, _)| *n == name)
        .ok_or_else(|| Error::Parse(format!("unknown fixture '{name}'")))?;
    let loaded = parse_complex(source)?;
    let reconstructed = loaded
        .meta
        .as_ref()
        .and_then(|m| m.get("reconstructed"))
        .and_then(|r| r.as_bool())
        .unwrap_or(false);
    Ok(Fixture {
        name,
        values: loaded.field()?,
        complex: loaded.complex,
        reconstructed,
        source,
    })
}

pub fn all() -> Vec<Fixture> {
    names().map(|n| load(n).expect("bundled fixtures parse")).collect()
}
