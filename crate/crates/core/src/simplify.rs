//! Stratum-preserving simplification: critical-cell inventory, an explicit
//! collapse sequence and homology of the resulting Morse complex.

use serde::Serialize;

use crate::complex::{Complex, ScalarField, SimplexId};
use crate::error::Result;
use crate::homology::{betti, BettiVector};
use crate::morse::{collapse_with, critical_cells, morse_chain_complex, VectorField};
use crate::separating::{separating_function, SeparatingFunction};
use crate::strat::{union_gradient, Stratification};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimplifyReport {
    /// Critical cells of the union gradient per dimension.
    pub critical_counts: Vec<usize>,
    pub critical: Vec<SimplexId>,
    pub critical_values: Vec<f64>,
    pub pairs: Vec<[SimplexId; 2]>,
    /// Free pairs in removal order, each inside one stratum.
    pub collapses: Vec<[SimplexId; 2]>,
    pub morse_betti: BettiVector,
    pub betti: BettiVector,
    pub euler_characteristic: i64,
}

impl SimplifyReport {
    /// `Σ (-1)^p c_p` over the critical counts.
    pub fn critical_euler(&self) -> i64 {
        self.critical_counts
            .iter()
            .enumerate()
            .map(|(p, &c)| if p % 2 == 0 { c as i64 } else { -(c as i64) })
            .sum()
    }
}

/// Removes the pairs of `v` as free pairs, sweeping the sublevel complexes of
/// the separating function `g` from the top down, one gap between critical
/// values at a time. `None` if some gap fails to collapse.
pub fn collapse_sequence(
    k: &Complex,
    v: &VectorField,
    g: &SeparatingFunction,
) -> Option<Vec<[SimplexId; 2]>> {
    let mut crit: Vec<f64> = critical_cells(v, &k.all())
        .iter()
        .map(|c| g.values.value(c))
        .collect();
    crit.sort_by(f64::total_cmp);
    let top = g.values.values().iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut out = Vec::new();
    for (i, &c) in crit.iter().enumerate().rev() {
        // g takes the integer values 1..=n, so the gap above c ends just
        // below the next critical value
        let upper = crit.get(i + 1).map(|&next| next - 1.0).unwrap_or(top);
        if upper > c {
            let step = collapse_with(k, &g.values, v, c, upper)?;
            out.extend(step.into_iter().map(|(a, b)| [a, b]));
        }
    }
    Some(out)
}

/// Reduction report for a discrete stratified Morse function.
pub fn simplify(k: &Complex, f: &ScalarField, s: &Stratification) -> Result<SimplifyReport> {
    let v = union_gradient(k, f, s)?;
    let crit = critical_cells(&v, &k.all());
    let mut critical_counts = vec![0; k.dim().map_or(0, |d| d + 1)];
    for c in crit.iter() {
        critical_counts[k.dim_of(c)] += 1;
    }
    while critical_counts.last() == Some(&0) {
        critical_counts.pop();
    }
    let mut critical_values: Vec<f64> = crit.iter().map(|c| f.value(c)).collect();
    critical_values.sort_by(f64::total_cmp);
    critical_values.dedup();
    let g = separating_function(k, s, &v)?;
    let collapses = collapse_sequence(k, &v, &g).unwrap_or_default();
    let morse = morse_chain_complex(k, &v, &k.all())?;
    Ok(SimplifyReport {
        critical_counts,
        critical: crit.to_vec(),
        critical_values,
        pairs: v.to_pairs(),
        collapses,
        morse_betti: morse.betti(),
        betti: betti(k, &k.all())?,
        euler_characteristic: k.euler_characteristic(&k.all()),
    })
}
