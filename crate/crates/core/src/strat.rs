//! Stratifications of a complex into locally closed strata satisfying the
//! frontier condition, and Morse theory relative to them.

use std::collections::{BTreeMap, BTreeSet, BinaryHeap, HashMap};
use std::cmp::Reverse;

use serde::{Deserialize, Serialize};

use crate::complex::{Complex, ScalarField, SimplexId, SimplexSet};
use crate::error::{Error, Result};
use crate::morse::{lower_in, offends, upper_in, MorseCheck, VectorField};

/// A family of named strata. Construction only checks ids; use
/// [`validate_stratification`] for the structural conditions. Equality
/// ignores the order in which strata are listed.
#[derive(Debug, Clone)]
pub struct Stratification {
    names: Vec<String>,
    strata: Vec<SimplexSet>,
    assignment: Vec<Option<usize>>,
}

impl PartialEq for Stratification {
    fn eq(&self, other: &Self) -> bool {
        self.assignment.len() == other.assignment.len() && self.to_map() == other.to_map()
    }
}

impl Eq for Stratification {}

impl Stratification {
    pub fn new<I, N>(k: &Complex, strata: I) -> Result<Self>
    where
        I: IntoIterator<Item = (N, SimplexSet)>,
        N: Into<String>,
    {
        let mut names = Vec::new();
        let mut sets = Vec::new();
        let mut seen = BTreeSet::new();
        for (name, set) in strata {
            let name = name.into();
            if !seen.insert(name.clone()) {
                return Err(Error::InvalidStratification(format!(
                    "stratum name '{name}' used twice"
                )));
            }
            for s in set.iter() {
                k.check_id(s)?;
            }
            names.push(name);
            sets.push(set);
        }
        let mut assignment = vec![None; k.len()];
        for (i, set) in sets.iter().enumerate() {
            for s in set.iter() {
                assignment[s].get_or_insert(i);
            }
        }
        Ok(Self {
            names,
            strata: sets,
            assignment,
        })
    }

    /// The one-stratum stratification `{K}`.
    pub fn trivial(k: &Complex) -> Self {
        Self::new(k, [("K", k.all())]).expect("ids are valid")
    }

    /// Builds strata from a per-simplex stratum name.
    pub fn from_assignment<S: AsRef<str>>(k: &Complex, names: &[S]) -> Result<Self> {
        if names.len() != k.len() {
            return Err(Error::InvalidStratification(format!(
                "assignment has {} entries for {} simplices",
                names.len(),
                k.len()
            )));
        }
        let mut groups: BTreeMap<&str, SimplexSet> = BTreeMap::new();
        for (s, n) in names.iter().enumerate() {
            groups.entry(n.as_ref()).or_default().insert(s);
        }
        Self::new(k, groups)
    }

    /// Strata from a JSON-style map, ordered by name.
    pub fn from_map(k: &Complex, map: &BTreeMap<String, Vec<SimplexId>>) -> Result<Self> {
        Self::new(
            k,
            map.iter()
                .map(|(n, ids)| (n.clone(), SimplexSet::from_ids(ids.iter().copied()))),
        )
    }

    pub fn to_map(&self) -> BTreeMap<String, Vec<SimplexId>> {
        self.iter().map(|(n, s)| (n.to_string(), s.to_vec())).collect()
    }

    pub fn len(&self) -> usize {
        self.strata.len()
    }

    pub fn is_empty(&self) -> bool {
        self.strata.is_empty()
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn stratum(&self, i: usize) -> &SimplexSet {
        &self.strata[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn get(&self, name: &str) -> Option<&SimplexSet> {
        self.index_of(name).map(|i| &self.strata[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &SimplexSet)> {
        self.names.iter().map(String::as_str).zip(self.strata.iter())
    }

    /// Index of the (first) stratum containing `s`.
    pub fn stratum_of(&self, s: SimplexId) -> Option<usize> {
        self.assignment.get(s).copied().flatten()
    }

    pub fn same_stratum(&self, a: SimplexId, b: SimplexId) -> bool {
        matches!((self.stratum_of(a), self.stratum_of(b)), (Some(x), Some(y)) if x == y)
    }

    /// Strata as a set of sets, ignoring names.
    pub fn blocks(&self) -> BTreeSet<SimplexSet> {
        self.strata.iter().cloned().collect()
    }

    /// Number of strata pieces (connected components of strata).
    pub fn piece_count(&self, k: &Complex) -> usize {
        self.strata.iter().map(|s| k.pieces(s).len()).sum()
    }

    /// Replaces every disconnected stratum by its pieces. The result is again
    /// a stratification when the input is one.
    pub fn split_into_pieces(&self, k: &Complex) -> Self {
        let mut out = Vec::new();
        for (name, set) in self.iter() {
            let pieces = k.pieces(set);
            if pieces.len() == 1 {
                out.push((name.to_string(), set.clone()));
            } else {
                for (i, p) in pieces.into_iter().enumerate() {
                    out.push((format!("{name}#{i}"), p));
                }
            }
        }
        Self::new(k, out).expect("pieces of valid strata")
    }
}

/// A single failure of the stratification conditions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    Uncovered { simplex: SimplexId },
    Overlap { simplex: SimplexId, strata: [String; 2] },
    EmptyStratum { stratum: String },
    /// `lower < middle < upper` with the ends in the stratum and the middle not.
    NotLocallyClosed { stratum: String, lower: SimplexId, middle: SimplexId, upper: SimplexId },
    /// `inside` lies in both strata's overlap, `outside` shows the stratum is
    /// not contained in the other's closure.
    Frontier { stratum: String, closure_of: String, inside: SimplexId, outside: SimplexId },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StratificationCheck {
    pub violations: Vec<Violation>,
}

impl StratificationCheck {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// For every simplex, the strata whose closure contains it.
fn closure_signatures(k: &Complex, s: &Stratification) -> Vec<BTreeSet<usize>> {
    (0..k.len())
        .map(|a| {
            k.open_star(a)
                .into_iter()
                .filter_map(|b| s.stratum_of(b))
                .collect()
        })
        .collect()
}

pub fn validate_stratification(k: &Complex, s: &Stratification) -> StratificationCheck {
    let mut violations = Vec::new();
    let mut owners: Vec<Vec<usize>> = vec![Vec::new(); k.len()];
    for (i, (_, set)) in s.iter().enumerate() {
        for a in set.iter() {
            owners[a].push(i);
        }
    }
    for (a, owners) in owners.iter().enumerate() {
        match owners.as_slice() {
            [] => violations.push(Violation::Uncovered { simplex: a }),
            [_] => {}
            [x, y, ..] => violations.push(Violation::Overlap {
                simplex: a,
                strata: [s.name(*x).to_string(), s.name(*y).to_string()],
            }),
        }
    }
    for (name, set) in s.iter() {
        if set.is_empty() {
            violations.push(Violation::EmptyStratum {
                stratum: name.to_string(),
            });
        }
        if let Some((lower, middle, upper)) = k.locally_closed_witness(set) {
            violations.push(Violation::NotLocallyClosed {
                stratum: name.to_string(),
                lower,
                middle,
                upper,
            });
        }
    }
    if violations.is_empty() {
        violations.extend(frontier_violations(k, s));
    }
    StratificationCheck { violations }
}

fn frontier_violations(k: &Complex, s: &Stratification) -> Vec<Violation> {
    let sig = closure_signatures(k, s);
    let mut out = Vec::new();
    for i in 0..s.len() {
        let set = s.stratum(i);
        let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
        for a in set.iter() {
            for &j in &sig[a] {
                *counts.entry(j).or_default() += 1;
            }
        }
        for (&j, &c) in &counts {
            if j != i && c < set.len() {
                let inside = set.iter().find(|&a| sig[a].contains(&j)).expect("count > 0");
                let outside = set.iter().find(|&a| !sig[a].contains(&j)).expect("count < len");
                out.push(Violation::Frontier {
                    stratum: s.name(i).to_string(),
                    closure_of: s.name(j).to_string(),
                    inside,
                    outside,
                });
            }
        }
    }
    out
}

fn require_valid(k: &Complex, s: &Stratification) -> Result<()> {
    let check = validate_stratification(k, s);
    match check.violations.first() {
        None => Ok(()),
        Some(v) => Err(Error::InvalidStratification(format!("{v:?}"))),
    }
}

/// The induced order `S_i < S_j ⇔ S_i ⊆ closure(S_j)` and a linear extension.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StrataOrder {
    /// Strict relations `(i, j)` meaning stratum `i` lies below stratum `j`.
    pub less: BTreeSet<(usize, usize)>,
    /// Stratum indices, every stratum after all strata below it; ties are
    /// broken by name.
    pub linear: Vec<usize>,
}

impl StrataOrder {
    pub fn is_below(&self, i: usize, j: usize) -> bool {
        self.less.contains(&(i, j))
    }

    pub fn comparable(&self, i: usize, j: usize) -> bool {
        i == j || self.is_below(i, j) || self.is_below(j, i)
    }

    pub fn minimal(&self, n: usize) -> Vec<usize> {
        (0..n).filter(|&j| !self.less.iter().any(|&(_, b)| b == j)).collect()
    }
}

pub fn strata_order(k: &Complex, s: &Stratification) -> Result<StrataOrder> {
    require_valid(k, s)?;
    Ok(order_of_valid(k, s))
}

pub(crate) fn order_of_valid(k: &Complex, s: &Stratification) -> StrataOrder {
    let mut less = BTreeSet::new();
    for a in 0..k.len() {
        let own = s.stratum_of(a).expect("valid stratification covers");
        for b in k.open_star(a) {
            let other = s.stratum_of(b).expect("valid stratification covers");
            if other != own {
                less.insert((own, other));
            }
        }
    }
    let linear = linear_extension(s, &less).expect("order of a valid stratification is acyclic");
    StrataOrder { less, linear }
}

fn linear_extension(s: &Stratification, less: &BTreeSet<(usize, usize)>) -> Option<Vec<usize>> {
    let n = s.len();
    let mut indeg = vec![0usize; n];
    let mut succ: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &(a, b) in less {
        indeg[b] += 1;
        succ[a].push(b);
    }
    let mut ready: BinaryHeap<Reverse<(&str, usize)>> = (0..n)
        .filter(|&i| indeg[i] == 0)
        .map(|i| Reverse((s.name(i), i)))
        .collect();
    let mut out = Vec::with_capacity(n);
    while let Some(Reverse((_, i))) = ready.pop() {
        out.push(i);
        for &j in &succ[i] {
            indeg[j] -= 1;
            if indeg[j] == 0 {
                ready.push(Reverse((s.name(j), j)));
            }
        }
    }
    (out.len() == n).then_some(out)
}

/// Whether every minimal stratum is downward closed.
pub fn minimal_stratum_is_subcomplex(k: &Complex, s: &Stratification) -> Result<bool> {
    let order = strata_order(k, s)?;
    Ok(order
        .minimal(s.len())
        .into_iter()
        .all(|i| k.is_downward_closed(s.stratum(i))))
}

/// `U_s(α)`: cofaces in the same stratum with value at most `f(α)`.
pub fn upper_strat(k: &Complex, f: &ScalarField, s: &Stratification, a: SimplexId) -> Vec<SimplexId> {
    upper_in(k, f, a, |b| s.same_stratum(a, b))
}

/// `L_s(α)`: faces in the same stratum with value at least `f(α)`.
pub fn lower_strat(k: &Complex, f: &ScalarField, s: &Stratification, a: SimplexId) -> Vec<SimplexId> {
    lower_in(k, f, a, |b| s.same_stratum(a, b))
}

pub(crate) fn dsmf_offenders(k: &Complex, f: &ScalarField, s: &Stratification) -> Vec<SimplexId> {
    (0..k.len())
        .filter(|&a| offends(upper_strat(k, f, s, a).len(), lower_strat(k, f, s, a).len()))
        .collect()
}

/// Checks that `f` restricts to a discrete Morse function on every stratum.
pub fn check_dsmf(k: &Complex, f: &ScalarField, s: &Stratification) -> Result<MorseCheck> {
    require_valid(k, s)?;
    Ok(MorseCheck {
        offenders: dsmf_offenders(k, f, s),
    })
}

fn require_dsmf(k: &Complex, f: &ScalarField, s: &Stratification) -> Result<()> {
    let check = check_dsmf(k, f, s)?;
    if check.is_ok() {
        Ok(())
    } else {
        Err(Error::NotADsmf {
            offenders: check.offenders,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum StratifiedStatus {
    GloballyCritical,
    LocallyCritical,
    GloballyNoncritical { partner: SimplexId },
    LocallyNoncritical { partner: SimplexId },
}

impl StratifiedStatus {
    pub fn is_critical(&self) -> bool {
        matches!(self, Self::GloballyCritical | Self::LocallyCritical)
    }

    pub fn partner(&self) -> Option<SimplexId> {
        match *self {
            Self::GloballyNoncritical { partner } | Self::LocallyNoncritical { partner } => {
                Some(partner)
            }
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StratifiedClassification {
    pub status: BTreeMap<SimplexId, StratifiedStatus>,
}

impl StratifiedClassification {
    pub fn critical(&self) -> Vec<SimplexId> {
        self.status
            .iter()
            .filter(|(_, st)| st.is_critical())
            .map(|(&a, _)| a)
            .collect()
    }

    pub fn get(&self, a: SimplexId) -> Option<StratifiedStatus> {
        self.status.get(&a).copied()
    }
}

/// Four-way classification. The partner of a noncritical simplex is its
/// same-stratum partner, which exists because `f` is a DSMF.
pub fn classify_stratified(
    k: &Complex,
    f: &ScalarField,
    s: &Stratification,
) -> Result<StratifiedClassification> {
    require_dsmf(k, f, s)?;
    let status = (0..k.len())
        .map(|a| {
            let all = upper_in(k, f, a, |_| true).len() + lower_in(k, f, a, |_| true).len();
            let us = upper_strat(k, f, s, a);
            let ls = lower_strat(k, f, s, a);
            let st = match (all, us.first().or(ls.first())) {
                (0, _) => StratifiedStatus::GloballyCritical,
                (_, None) => StratifiedStatus::LocallyCritical,
                (1, Some(&partner)) => StratifiedStatus::GloballyNoncritical { partner },
                (_, Some(&partner)) => StratifiedStatus::LocallyNoncritical { partner },
            };
            (a, st)
        })
        .collect();
    Ok(StratifiedClassification { status })
}

/// Every violator of `f` is locally critical or touches the boundary of the
/// stratification: a face of it lies in the frontier of its own stratum, or
/// it lies in the frontier of the stratum of one of its cofaces.
pub fn violator_boundary_property(k: &Complex, f: &ScalarField, s: &Stratification) -> Result<bool> {
    let classes = classify_stratified(k, f, s)?;
    let mut frontiers: HashMap<usize, SimplexSet> = HashMap::new();
    let mut frontier_of = |i: usize| -> SimplexSet {
        frontiers
            .entry(i)
            .or_insert_with(|| k.frontier(s.stratum(i)))
            .clone()
    };
    for a in 0..k.len() {
        let u = upper_in(k, f, a, |_| true).len();
        let l = lower_in(k, f, a, |_| true).len();
        if !offends(u, l) {
            continue;
        }
        if classes.get(a) == Some(StratifiedStatus::LocallyCritical) {
            continue;
        }
        let own = s.stratum_of(a).expect("valid");
        let own_frontier = frontier_of(own);
        let face_on_boundary = k.faces(a).iter().any(|&g| own_frontier.contains(g));
        let on_coface_boundary = k.cofaces(a).iter().any(|&t| {
            let j = s.stratum_of(t).expect("valid");
            frontier_of(j).contains(a)
        });
        if !face_on_boundary && !on_coface_boundary {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Union of the gradients of `f` restricted to each stratum.
pub fn union_gradient(k: &Complex, f: &ScalarField, s: &Stratification) -> Result<VectorField> {
    require_dsmf(k, f, s)?;
    let mut v = VectorField::new();
    for a in 0..k.len() {
        if let Some(&b) = upper_strat(k, f, s, a).first() {
            v.insert(k, a, b)?;
        }
    }
    Ok(v)
}

/// Whether every pair of `v` lies inside a single stratum.
pub fn respects_strata(v: &VectorField, s: &Stratification) -> bool {
    v.pairs().all(|(a, b)| s.same_stratum(a, b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::build_complex;

    fn path() -> Complex {
        // a=1, b=2, c=3
        Complex::from_maximal_simplices([vec![1, 2], vec![2, 3]]).unwrap()
    }

    fn set(k: &Complex, vs: &[&[i64]]) -> SimplexSet {
        vs.iter().map(|v| k.find(v).unwrap()).collect()
    }

    #[test]
    fn trivial_is_valid_with_one_element_order() {
        let k = path();
        let s = Stratification::trivial(&k);
        assert!(validate_stratification(&k, &s).is_ok());
        let o = strata_order(&k, &s).unwrap();
        assert_eq!(o.linear, vec![0]);
        assert!(minimal_stratum_is_subcomplex(&k, &s).unwrap());
    }

    #[test]
    fn frontier_condition_failure_on_path() {
        let k = path();
        let s = Stratification::new(
            &k,
            [
                ("ab", set(&k, &[&[1, 2]])),
                ("a", set(&k, &[&[1]])),
                ("rest", set(&k, &[&[2], &[3], &[2, 3]])),
            ],
        )
        .unwrap();
        let check = validate_stratification(&k, &s);
        let b = k.find(&[2]).unwrap();
        assert!(check.violations.iter().any(|v| matches!(
            v,
            Violation::Frontier { stratum, closure_of, inside, .. }
                if stratum == "rest" && closure_of == "ab" && *inside == b
        )));
        assert!(matches!(strata_order(&k, &s), Err(Error::InvalidStratification(_))));
    }

    #[test]
    fn cover_overlap_and_local_closedness_are_reported() {
        let k = path();
        let a = k.find(&[1]).unwrap();
        let s = Stratification::new(&k, [("x", SimplexSet::from_ids([a])), ("y", SimplexSet::from_ids([a]))])
            .unwrap();
        let v = validate_stratification(&k, &s).violations;
        assert!(v.iter().any(|x| matches!(x, Violation::Overlap { .. })));
        assert!(v.iter().any(|x| matches!(x, Violation::Uncovered { .. })));

        let t = Complex::from_maximal_simplices([vec![1, 2, 3]]).unwrap();
        let odd = set(&t, &[&[1], &[1, 2, 3]]);
        let rest = t.all().difference(&odd);
        let s = Stratification::new(&t, [("odd", odd), ("rest", rest)]).unwrap();
        let v = validate_stratification(&t, &s).violations;
        assert!(v.iter().any(|x| matches!(x, Violation::NotLocallyClosed { .. })));
    }

    #[test]
    fn disjoint_components_are_incomparable() {
        let k = Complex::from_vertex_lists([vec![1], vec![2]]).unwrap();
        let s = Stratification::from_assignment(&k, &["p", "q"]).unwrap();
        let o = strata_order(&k, &s).unwrap();
        assert!(!o.comparable(0, 1));
        assert_eq!(o.linear, vec![0, 1]);
    }

    #[test]
    fn segment_with_split_endpoint() {
        let (k, f) = build_complex([(vec![1], 0.0), (vec![2], 1.0), (vec![1, 2], 1.0)]).unwrap();
        let s = Stratification::from_assignment(&k, &["a", "top", "top"]).unwrap();
        let o = strata_order(&k, &s).unwrap();
        assert!(o.is_below(0, 1));
        assert!(check_dsmf(&k, &f, &s).unwrap().is_ok());
        let c = classify_stratified(&k, &f, &s).unwrap();
        assert_eq!(c.get(0), Some(StratifiedStatus::GloballyCritical));
        assert_eq!(c.get(1), Some(StratifiedStatus::GloballyNoncritical { partner: 2 }));
        assert_eq!(union_gradient(&k, &f, &s).unwrap().to_pairs(), vec![[1, 2]]);
    }

    #[test]
    fn map_round_trip_and_pieces() {
        let k = Complex::from_vertex_lists([vec![1], vec![2]]).unwrap();
        let s = Stratification::trivial(&k);
        assert_eq!(Stratification::from_map(&k, &s.to_map()).unwrap(), s);
        assert_eq!(s.piece_count(&k), 2);
        let split = s.split_into_pieces(&k);
        assert_eq!(split.len(), 2);
        assert!(validate_stratification(&k, &split).is_ok());
    }
}
