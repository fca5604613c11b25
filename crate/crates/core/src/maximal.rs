//! Brute-force search for strictly coarser stratifications on which a
//! function is still a discrete stratified Morse function.

use crate::complex::{Complex, ScalarField, SimplexSet};
use crate::error::{Error, Result};
use crate::morse::check_dmf_mask;
use crate::strat::{check_dsmf, validate_stratification, Stratification};

/// Default size limit for the exhaustive search.
pub const DEFAULT_BOUND: usize = 16;

/// Whether no stratification in `Σ(K, f)` lies strictly above `s`.
pub fn is_maximal(k: &Complex, f: &ScalarField, s: &Stratification, bound: usize) -> Result<bool> {
    Ok(find_coarser(k, f, s, bound)?.is_none())
}

/// A stratification strictly above `s` in `Σ(K, f)`, if one exists.
///
/// `s ≤ s'` when every piece of `s` lies in a stratum of `s'`, so candidates
/// are the set partitions of the pieces of `s`. A candidate is strictly above
/// when one of its pieces meets two strata of `s`. Groups on which `f` is not
/// a discrete Morse function are pruned early, which is sound because that
/// property passes to subsets.
pub fn find_coarser(
    k: &Complex,
    f: &ScalarField,
    s: &Stratification,
    bound: usize,
) -> Result<Option<Stratification>> {
    if k.len() > bound {
        return Err(Error::ComplexTooLarge {
            size: k.len(),
            bound,
        });
    }
    let check = check_dsmf(k, f, s)?;
    if !check.is_ok() {
        return Err(Error::NotADsmf {
            offenders: check.offenders,
        });
    }
    let mut atoms = Vec::new();
    let mut owner = Vec::new();
    for i in 0..s.len() {
        for p in k.pieces(s.stratum(i)) {
            atoms.push(p);
            owner.push(i);
        }
    }
    let mut search = Search {
        k,
        f,
        atoms: &atoms,
        owner: &owner,
        groups: Vec::new(),
        masks: Vec::new(),
    };
    Ok(search.run(0))
}

struct Search<'a> {
    k: &'a Complex,
    f: &'a ScalarField,
    atoms: &'a [SimplexSet],
    owner: &'a [usize],
    groups: Vec<Vec<usize>>,
    masks: Vec<Vec<bool>>,
}

impl Search<'_> {
    fn run(&mut self, i: usize) -> Option<Stratification> {
        if i == self.atoms.len() {
            return self.evaluate();
        }
        for g in 0..=self.groups.len() {
            if g == self.groups.len() {
                self.groups.push(Vec::new());
                self.masks.push(vec![false; self.k.len()]);
            }
            self.groups[g].push(i);
            for a in self.atoms[i].iter() {
                self.masks[g][a] = true;
            }
            if check_dmf_mask(self.k, self.f, &self.masks[g]).is_ok() {
                if let Some(found) = self.run(i + 1) {
                    return Some(found);
                }
            }
            self.groups[g].pop();
            for a in self.atoms[i].iter() {
                self.masks[g][a] = false;
            }
            if self.groups[g].is_empty() {
                self.groups.pop();
                self.masks.pop();
            }
        }
        None
    }

    fn evaluate(&self) -> Option<Stratification> {
        let unions: Vec<SimplexSet> = self.masks.iter().map(|m| SimplexSet::from_mask(m)).collect();
        let strictly_coarser = unions.iter().zip(&self.groups).any(|(u, group)| {
            self.k.pieces(u).iter().any(|piece| {
                let mut strata = group
                    .iter()
                    .filter(|&&atom| self.atoms[atom].is_subset(piece))
                    .map(|&atom| self.owner[atom]);
                let first = strata.next();
                strata.any(|o| Some(o) != first)
            })
        });
        if !strictly_coarser {
            return None;
        }
        let candidate = Stratification::new(
            self.k,
            unions.into_iter().enumerate().map(|(j, u)| (format!("merged:{j}"), u)),
        )
        .ok()?;
        validate_stratification(self.k, &candidate)
            .is_ok()
            .then_some(candidate)
    }
}
