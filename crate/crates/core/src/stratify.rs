//! The violator-removal algorithm turning an arbitrary function into a
//! discrete stratified Morse function.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::complex::{Complex, ScalarField, SimplexId, SimplexSet};
use crate::morse::offends;
use crate::registry::{DimValue, RemovalOrder};
use crate::strat::Stratification;

/// One iteration of the removal loop.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceStep {
    pub removed: SimplexId,
    /// Violators that stopped being violators because of this removal.
    pub resolved: Vec<SimplexId>,
}

/// Record of one run of [`construct_stratification`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgorithmTrace {
    pub order: String,
    /// Initial violators in processing order.
    pub violators: Vec<SimplexId>,
    pub steps: Vec<TraceStep>,
    pub strata: BTreeMap<String, Vec<SimplexId>>,
    /// Gradient of the function restricted to each stratum.
    pub gradients: BTreeMap<String, Vec<[SimplexId; 2]>>,
}

impl AlgorithmTrace {
    pub fn removals(&self) -> Vec<SimplexId> {
        self.steps.iter().map(|s| s.removed).collect()
    }

    /// Violators still present after the first `step` removals.
    pub fn surviving(&self, step: usize) -> Vec<SimplexId> {
        let gone: BTreeSet<SimplexId> = self.steps[..step.min(self.steps.len())]
            .iter()
            .flat_map(|s| std::iter::once(s.removed).chain(s.resolved.iter().copied()))
            .collect();
        self.violators
            .iter()
            .copied()
            .filter(|v| !gone.contains(v))
            .collect()
    }
}

/// Incrementally maintained `|U|` and `|L|` counts inside the surviving set.
struct Counts<'a> {
    k: &'a Complex,
    f: &'a ScalarField,
    alive: Vec<bool>,
    upper: Vec<u32>,
    lower: Vec<u32>,
}

impl<'a> Counts<'a> {
    fn new(k: &'a Complex, f: &'a ScalarField) -> Self {
        let n = k.len();
        let mut upper = vec![0u32; n];
        let mut lower = vec![0u32; n];
        for a in 0..n {
            let fa = f.value(a);
            upper[a] = k.cofaces(a).iter().filter(|&&b| f.value(b) <= fa).count() as u32;
            lower[a] = k.faces(a).iter().filter(|&&g| f.value(g) >= fa).count() as u32;
        }
        Self {
            k,
            f,
            alive: vec![true; n],
            upper,
            lower,
        }
    }

    fn is_violator(&self, a: SimplexId) -> bool {
        self.alive[a] && offends(self.upper[a] as usize, self.lower[a] as usize)
    }

    /// Removes `a` and returns the neighbours that were violators before the
    /// removal and whose counts changed.
    fn remove(&mut self, a: SimplexId) -> Vec<SimplexId> {
        self.alive[a] = false;
        let fa = self.f.value(a);
        let mut touched = Vec::new();
        for &g in self.k.faces(a) {
            if self.alive[g] && fa <= self.f.value(g) {
                if self.is_violator(g) {
                    touched.push(g);
                }
                self.upper[g] -= 1;
            }
        }
        for &b in self.k.cofaces(a) {
            if self.alive[b] && fa >= self.f.value(b) {
                if self.is_violator(b) {
                    touched.push(b);
                }
                self.lower[b] -= 1;
            }
        }
        touched
    }
}

/// Runs the algorithm with the default removal order.
pub fn construct_stratification(k: &Complex, f: &ScalarField) -> (Stratification, AlgorithmTrace) {
    construct_stratification_with(k, f, &DimValue)
}

pub fn construct_stratification_with(
    k: &Complex,
    f: &ScalarField,
    order: &dyn RemovalOrder,
) -> (Stratification, AlgorithmTrace) {
    let mut counts = Counts::new(k, f);
    let mut violators: Vec<SimplexId> = (0..k.len()).filter(|&a| counts.is_violator(a)).collect();
    order.sort(k, f, &mut violators);

    let mut steps = Vec::new();
    for &v in &violators {
        if !counts.is_violator(v) {
            continue;
        }
        let touched = counts.remove(v);
        let mut resolved: Vec<SimplexId> = touched
            .into_iter()
            .filter(|&t| !counts.is_violator(t))
            .collect();
        resolved.sort_unstable();
        resolved.dedup();
        steps.push(TraceStep {
            removed: v,
            resolved,
        });
    }

    let removed: Vec<SimplexId> = steps.iter().map(|s| s.removed).collect();
    let strata = final_strata(k, &counts.alive, &removed);
    let s = Stratification::new(k, strata).expect("algorithm strata use valid ids");
    let gradients = stratum_gradients(k, f, &s);
    let trace = AlgorithmTrace {
        order: order.name().to_string(),
        violators,
        steps,
        strata: s.to_map(),
        gradients,
    };
    (s, trace)
}

/// Strata from the final surviving set `C`: one per removed violator, the
/// interior `C \ closure(R)`, and the frontier `C ∩ closure(R)` refined until
/// every block meets the closures of the other strata uniformly.
fn final_strata(k: &Complex, alive: &[bool], removed: &[SimplexId]) -> Vec<(String, SimplexSet)> {
    let n = k.len();
    if removed.is_empty() {
        return vec![("K".to_string(), k.all())];
    }
    let in_closure_of_removed = k.closure(&SimplexSet::from_ids(removed.iter().copied())).mask(n);

    // block[a]: provisional stratum index
    const FRONTIER: usize = 0;
    const INTERIOR: usize = 1;
    let mut block = vec![usize::MAX; n];
    let mut next = 2;
    for &r in removed {
        block[r] = next;
        next += 1;
    }
    let mut frontier: Vec<SimplexId> = Vec::new();
    for a in 0..n {
        if alive[a] {
            if in_closure_of_removed[a] {
                block[a] = FRONTIER;
                frontier.push(a);
            } else {
                block[a] = INTERIOR;
            }
        }
    }

    // Partition refinement of the frontier by the set of blocks whose closure
    // contains each simplex.
    let stars: Vec<Vec<SimplexId>> = frontier.iter().map(|&a| k.open_star(a)).collect();
    let mut frontier_blocks = 1;
    loop {
        let mut groups: HashMap<(usize, Vec<usize>), usize> = HashMap::new();
        let mut relabel = Vec::with_capacity(frontier.len());
        for (i, &a) in frontier.iter().enumerate() {
            let sig: BTreeSet<usize> = stars[i].iter().map(|&b| block[b]).collect();
            let key = (block[a], sig.into_iter().collect::<Vec<_>>());
            let fresh = groups.len();
            relabel.push(*groups.entry(key).or_insert(fresh));
        }
        let count = groups.len();
        if count == frontier_blocks {
            break;
        }
        frontier_blocks = count;
        // Frontier blocks get indices past all other blocks.
        for (i, &a) in frontier.iter().enumerate() {
            block[a] = next + relabel[i];
        }
        next += count;
    }

    let mut out = Vec::new();
    for &r in removed {
        out.push((format!("removed:{r}"), SimplexSet::from_ids([r])));
    }
    let mut frontier_sets: BTreeMap<usize, Vec<SimplexId>> = BTreeMap::new();
    for &a in &frontier {
        frontier_sets.entry(block[a]).or_default().push(a);
    }
    let mut frontier_sets: Vec<Vec<SimplexId>> = frontier_sets.into_values().collect();
    frontier_sets.sort();
    if frontier_sets.len() == 1 {
        out.push(("frontier".to_string(), SimplexSet::from_ids(frontier_sets.remove(0))));
    } else {
        for (i, set) in frontier_sets.into_iter().enumerate() {
            out.push((format!("frontier:{i}"), SimplexSet::from_ids(set)));
        }
    }
    let interior: SimplexSet = (0..n).filter(|&a| block[a] == INTERIOR).collect();
    if !interior.is_empty() {
        out.push(("interior".to_string(), interior));
    }
    out
}

fn stratum_gradients(
    k: &Complex,
    f: &ScalarField,
    s: &Stratification,
) -> BTreeMap<String, Vec<[SimplexId; 2]>> {
    let mut out: BTreeMap<String, Vec<[SimplexId; 2]>> =
        s.names().iter().map(|n| (n.clone(), Vec::new())).collect();
    for a in 0..k.len() {
        let fa = f.value(a);
        let up: Vec<SimplexId> = k
            .cofaces(a)
            .iter()
            .copied()
            .filter(|&b| s.same_stratum(a, b) && f.value(b) <= fa)
            .collect();
        if let [b] = up.as_slice() {
            let i = s.stratum_of(a).expect("algorithm strata cover");
            out.get_mut(s.name(i)).expect("named").push([a, *b]);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::build_complex;
    use crate::strat::{check_dsmf, validate_stratification};

    #[test]
    fn morse_input_gives_trivial_stratification() {
        let (k, f) = build_complex([(vec![1], 0.0), (vec![2], 1.0), (vec![1, 2], 1.0)]).unwrap();
        let (s, trace) = construct_stratification(&k, &f);
        assert_eq!(s, Stratification::trivial(&k));
        assert!(trace.violators.is_empty());
        assert_eq!(trace.gradients["K"], vec![[1, 2]]);
    }

    #[test]
    fn path_with_split_frontier_is_refined() {
        // a–e1–b–e2–c with f(a)=5, f(b)=6, f(e1)=1, f(e2)=7, f(c)=2
        let (k, f) = build_complex([
            (vec![0], 5.0),
            (vec![1], 6.0),
            (vec![2], 2.0),
            (vec![0, 1], 1.0),
            (vec![1, 2], 7.0),
        ])
        .unwrap();
        let (s, trace) = construct_stratification(&k, &f);
        assert_eq!(trace.removals(), vec![3]);
        assert!(validate_stratification(&k, &s).is_ok());
        assert!(check_dsmf(&k, &f, &s).unwrap().is_ok());
        assert_eq!(s.get("frontier:0"), Some(&SimplexSet::from_ids([0])));
        assert_eq!(s.get("frontier:1"), Some(&SimplexSet::from_ids([1])));
    }

    #[test]
    fn surviving_replays_the_trace() {
        // vertex with two lower edges: one removal resolves both edges
        let (k, f) = build_complex([
            (vec![0], 5.0),
            (vec![1], 0.0),
            (vec![2], 0.5),
            (vec![0, 1], -1.0),
            (vec![0, 2], -2.0),
        ])
        .unwrap();
        let (_, trace) = construct_stratification(&k, &f);
        assert_eq!(trace.violators, vec![0, 4, 3]);
        assert_eq!(trace.steps, vec![TraceStep { removed: 0, resolved: vec![3, 4] }]);
        assert_eq!(trace.surviving(0), vec![0, 4, 3]);
        assert!(trace.surviving(1).is_empty());
    }
}
