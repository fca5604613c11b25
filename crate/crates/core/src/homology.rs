//! Simplicial homology over the two-element field. Used as an independent
//! check on every homotopy-type claim made from Morse data.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::complex::{Complex, SimplexId, SimplexSet};
use crate::error::{Error, Result};

/// Sparse matrix over GF(2), stored as sorted row indices per column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryMatrix {
    rows: usize,
    columns: Vec<Vec<usize>>,
}

impl BinaryMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            columns: vec![Vec::new(); cols],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.columns.len()
    }

    pub fn set_column(&mut self, j: usize, mut rows: Vec<usize>) {
        rows.sort_unstable();
        // entries appearing an even number of times cancel
        let mut out: Vec<usize> = Vec::with_capacity(rows.len());
        for r in rows {
            if out.last() == Some(&r) {
                out.pop();
            } else {
                out.push(r);
            }
        }
        debug_assert!(out.iter().all(|&r| r < self.rows));
        self.columns[j] = out;
    }

    pub fn column(&self, j: usize) -> &[usize] {
        &self.columns[j]
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.columns[j].binary_search(&i).is_ok()
    }

    /// Rank by left-to-right column reduction on lowest nonzero entries.
    pub fn rank(&self) -> usize {
        let mut pivot_of: HashMap<usize, Vec<usize>> = HashMap::new();
        let mut rank = 0;
        for col in &self.columns {
            let mut c = col.clone();
            while let Some(&low) = c.last() {
                match pivot_of.get(&low) {
                    Some(other) => c = symmetric_difference(&c, other),
                    None => break,
                }
            }
            if let Some(&low) = c.last() {
                pivot_of.insert(low, c);
                rank += 1;
            }
        }
        rank
    }
}

fn symmetric_difference(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        if a[i] < b[j] {
            out.push(a[i]);
            i += 1;
        } else if a[i] > b[j] {
            out.push(b[j]);
            j += 1;
        } else {
            i += 1;
            j += 1;
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// Betti numbers by dimension, with trailing zeros dropped so that vectors of
/// different nominal length compare equal when the homology agrees.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BettiVector(Vec<usize>);

impl BettiVector {
    pub fn new(mut raw: Vec<usize>) -> Self {
        while raw.last() == Some(&0) {
            raw.pop();
        }
        Self(raw)
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn get(&self, p: usize) -> usize {
        self.0.get(p).copied().unwrap_or(0)
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.0
            .iter()
            .enumerate()
            .map(|(p, &b)| if p % 2 == 0 { b as i64 } else { -(b as i64) })
            .sum()
    }
}

fn require_complex(k: &Complex, d: &SimplexSet) -> Result<()> {
    for s in d.iter() {
        for &f in k.faces(s) {
            if !d.contains(f) {
                return Err(Error::NotAComplex { simplex: s, face: f });
            }
        }
    }
    Ok(())
}

fn cells_by_dim(k: &Complex, d: &SimplexSet) -> Vec<Vec<SimplexId>> {
    let mut cells: Vec<Vec<SimplexId>> = Vec::new();
    for s in d.iter() {
        let p = k.dim_of(s);
        if cells.len() <= p {
            cells.resize(p + 1, Vec::new());
        }
        cells[p].push(s);
    }
    cells
}

/// Mod-2 boundary `∂_p` of the subcomplex `d`: rows index `(p-1)`-simplices
/// and columns `p`-simplices, both in increasing id order.
pub fn boundary_matrix(k: &Complex, d: &SimplexSet, p: usize) -> Result<BinaryMatrix> {
    require_complex(k, d)?;
    let cells = cells_by_dim(k, d);
    Ok(boundary_from_cells(k, &cells, p))
}

fn boundary_from_cells(k: &Complex, cells: &[Vec<SimplexId>], p: usize) -> BinaryMatrix {
    let empty = Vec::new();
    let cols = cells.get(p).unwrap_or(&empty);
    if p == 0 {
        return BinaryMatrix::zeros(0, cols.len());
    }
    let rows = cells.get(p - 1).unwrap_or(&empty);
    let row_of: HashMap<SimplexId, usize> = rows.iter().enumerate().map(|(i, &s)| (s, i)).collect();
    let mut m = BinaryMatrix::zeros(rows.len(), cols.len());
    for (j, &s) in cols.iter().enumerate() {
        m.set_column(j, k.faces(s).iter().map(|f| row_of[f]).collect());
    }
    m
}

/// Betti numbers of the downward-closed set `d`.
pub fn betti(k: &Complex, d: &SimplexSet) -> Result<BettiVector> {
    require_complex(k, d)?;
    let cells = cells_by_dim(k, d);
    let ranks: Vec<usize> = (0..cells.len())
        .map(|p| boundary_from_cells(k, &cells, p).rank())
        .collect();
    let raw = (0..cells.len())
        .map(|p| cells[p].len() - ranks[p] - ranks.get(p + 1).copied().unwrap_or(0))
        .collect();
    Ok(BettiVector::new(raw))
}
