//! Discrete Morse functions on the whole complex that realise a
//! strata-respecting gradient and sweep the strata in order.

use serde::Serialize;

use crate::complex::{Complex, ScalarField};
use crate::error::{Error, Result};
use crate::morse::{is_acyclic, VectorField};
use crate::pointdata::modified_hasse_order;
use crate::strat::{strata_order, Stratification};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeparatingFunction {
    pub values: ScalarField,
    /// `thresholds[i]` is the largest value on the first `i + 1` strata of
    /// `order`, so the preimage of `(-∞, thresholds[i]]` is exactly their union.
    pub thresholds: Vec<f64>,
    /// Stratum indices in the order they are swept.
    pub order: Vec<usize>,
}

/// Builds `g` with gradient exactly `v`. Strata are visited along a linear
/// extension of the strata order; inside a stratum the values follow a
/// topological order of the Hasse diagram with paired arrows reversed.
pub fn separating_function(
    k: &Complex,
    s: &Stratification,
    v: &VectorField,
) -> Result<SeparatingFunction> {
    let order = strata_order(k, s)?;
    for (a, b) in v.pairs() {
        if !s.same_stratum(a, b) {
            return Err(Error::NonRespectingField { lower: a, upper: b });
        }
    }
    if let Some(witness) = is_acyclic(k, v).witness {
        return Err(Error::CyclicField { witness });
    }
    let mut values = vec![0.0; k.len()];
    let mut thresholds = Vec::with_capacity(s.len());
    let mut level = 0usize;
    for &i in &order.linear {
        let members = s.stratum(i).to_vec();
        for a in modified_hasse_order(k, v, &members, |b| s.stratum_of(b) == Some(i)) {
            level += 1;
            values[a] = level as f64;
        }
        thresholds.push(level as f64);
    }
    Ok(SeparatingFunction {
        values: ScalarField::new(values),
        thresholds,
        order: order.linear,
    })
}
