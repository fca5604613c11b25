//! Classical discrete Morse machinery, evaluated either on a whole complex or
//! on an arbitrary subset of its simplices (a stratum): the sets `U` and `L`,
//! validity checks, violator classification, gradients and V-paths.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::complex::{Complex, ScalarField, SimplexId, SimplexSet};
use crate::error::{Error, Result};
use crate::homology::{BettiVector, BinaryMatrix};

/// Immediate cofaces β of `alpha` with `f(β) ≤ f(α)` and `inside(β)`.
pub fn upper_in(
    k: &Complex,
    f: &ScalarField,
    alpha: SimplexId,
    inside: impl Fn(SimplexId) -> bool,
) -> Vec<SimplexId> {
    let fa = f.value(alpha);
    k.cofaces(alpha)
        .iter()
        .copied()
        .filter(|&b| inside(b) && f.value(b) <= fa)
        .collect()
}

/// Immediate faces γ of `alpha` with `f(γ) ≥ f(α)` and `inside(γ)`.
pub fn lower_in(
    k: &Complex,
    f: &ScalarField,
    alpha: SimplexId,
    inside: impl Fn(SimplexId) -> bool,
) -> Vec<SimplexId> {
    let fa = f.value(alpha);
    k.faces(alpha)
        .iter()
        .copied()
        .filter(|&g| inside(g) && f.value(g) >= fa)
        .collect()
}

/// `U(α)` restricted to the domain `d`.
pub fn upper_set(k: &Complex, f: &ScalarField, alpha: SimplexId, d: &SimplexSet) -> SimplexSet {
    upper_in(k, f, alpha, |s| d.contains(s)).into_iter().collect()
}

/// `L(α)` restricted to the domain `d`.
pub fn lower_set(k: &Complex, f: &ScalarField, alpha: SimplexId, d: &SimplexSet) -> SimplexSet {
    lower_in(k, f, alpha, |s| d.contains(s)).into_iter().collect()
}

/// Whether α fails one of the three conditions given its `U` and `L` counts.
pub(crate) fn offends(upper: usize, lower: usize) -> bool {
    upper >= 2 || lower >= 2 || (upper >= 1 && lower >= 1)
}

/// Result of checking the discrete Morse conditions on a domain.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MorseCheck {
    pub offenders: Vec<SimplexId>,
}

impl MorseCheck {
    pub fn is_ok(&self) -> bool {
        self.offenders.is_empty()
    }
}

/// Checks `|U| ≤ 1`, `|L| ≤ 1` and the exclusivity of `U` and `L` for every
/// member of `d`, with `U` and `L` evaluated inside `d`.
pub fn check_dmf(k: &Complex, f: &ScalarField, d: &SimplexSet) -> MorseCheck {
    let mask = d.mask(k.len());
    check_dmf_mask(k, f, &mask)
}

pub(crate) fn check_dmf_mask(k: &Complex, f: &ScalarField, mask: &[bool]) -> MorseCheck {
    let offenders = (0..k.len())
        .filter(|&a| mask[a])
        .filter(|&a| {
            let u = upper_in(k, f, a, |s| mask[s]).len();
            let l = lower_in(k, f, a, |s| mask[s]).len();
            offends(u, l)
        })
        .collect();
    MorseCheck { offenders }
}

/// Which violator conditions a simplex meets. Conditions can co-occur, so
/// this is a flag set rather than a single type.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ViolatorKind {
    /// Type I: `|U| ≥ 2`.
    pub many_upper: bool,
    /// Type II: `|L| ≥ 2`.
    pub many_lower: bool,
    /// Type III: `|U| = |L| = 1`.
    pub mixed: bool,
}

impl ViolatorKind {
    pub fn from_counts(upper: usize, lower: usize) -> Self {
        Self {
            many_upper: upper >= 2,
            many_lower: lower >= 2,
            mixed: upper == 1 && lower == 1,
        }
    }

    pub fn any(&self) -> bool {
        self.many_upper || self.many_lower || self.mixed
    }
}

impl fmt::Display for ViolatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if self.many_upper {
            parts.push("I");
        }
        if self.many_lower {
            parts.push("II");
        }
        if self.mixed {
            parts.push("III");
        }
        write!(f, "{}", parts.join("+"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Status {
    Critical,
    Regular { partner: SimplexId },
    Violator { kind: ViolatorKind },
}

impl Status {
    /// Short label: C, R, I, II or III.
    pub fn label(&self) -> String {
        match self {
            Status::Critical => "C".into(),
            Status::Regular { .. } => "R".into(),
            Status::Violator { kind } => kind.to_string(),
        }
    }
}

/// Status of every simplex of a domain with respect to `f`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub status: BTreeMap<SimplexId, Status>,
}

impl Classification {
    pub fn violators(&self) -> Vec<SimplexId> {
        self.status
            .iter()
            .filter(|(_, s)| matches!(s, Status::Violator { .. }))
            .map(|(&i, _)| i)
            .collect()
    }

    pub fn critical(&self) -> Vec<SimplexId> {
        self.status
            .iter()
            .filter(|(_, s)| matches!(s, Status::Critical))
            .map(|(&i, _)| i)
            .collect()
    }

    pub fn get(&self, id: SimplexId) -> Option<Status> {
        self.status.get(&id).copied()
    }
}

fn status_of(u: &[SimplexId], l: &[SimplexId]) -> Status {
    let kind = ViolatorKind::from_counts(u.len(), l.len());
    if kind.any() {
        Status::Violator { kind }
    } else if let Some(&p) = u.first().or(l.first()) {
        Status::Regular { partner: p }
    } else {
        Status::Critical
    }
}

/// Classifies every simplex of `k` as critical, regular, or a violator.
pub fn classify(k: &Complex, f: &ScalarField) -> Classification {
    classify_in(k, f, &k.all())
}

/// Classification with `U` and `L` evaluated inside the domain `d`.
pub fn classify_in(k: &Complex, f: &ScalarField, d: &SimplexSet) -> Classification {
    let mask = d.mask(k.len());
    let status = d
        .iter()
        .map(|a| {
            let u = upper_in(k, f, a, |s| mask[s]);
            let l = lower_in(k, f, a, |s| mask[s]);
            (a, status_of(&u, &l))
        })
        .collect();
    Classification { status }
}

/// A discrete vector field: a matching of simplices with codimension-1
/// cofaces. The matching property is enforced on insertion.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct VectorField {
    up: BTreeMap<SimplexId, SimplexId>,
    down: BTreeMap<SimplexId, SimplexId>,
}

impl VectorField {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs<I>(k: &Complex, pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (SimplexId, SimplexId)>,
    {
        let mut v = Self::new();
        for (a, b) in pairs {
            v.insert(k, a, b)?;
        }
        Ok(v)
    }

    /// Adds the pair `lower < upper`.
    pub fn insert(&mut self, k: &Complex, lower: SimplexId, upper: SimplexId) -> Result<()> {
        k.check_id(lower)?;
        k.check_id(upper)?;
        if !k.faces(upper).contains(&lower) {
            return Err(Error::NotAFacePair { lower, upper });
        }
        for s in [lower, upper] {
            if self.is_paired(s) {
                return Err(Error::NotAMatching(s));
            }
        }
        self.up.insert(lower, upper);
        self.down.insert(upper, lower);
        Ok(())
    }

    pub(crate) fn remove_pair(&mut self, lower: SimplexId) {
        if let Some(u) = self.up.remove(&lower) {
            self.down.remove(&u);
        }
    }

    /// Merges another field; fails if the union is not a matching.
    pub fn extend_from(&mut self, k: &Complex, other: &VectorField) -> Result<()> {
        for (a, b) in other.pairs() {
            self.insert(k, a, b)?;
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.up.len()
    }

    pub fn is_empty(&self) -> bool {
        self.up.is_empty()
    }

    /// Pairs `(lower, upper)` in increasing order of `lower`.
    pub fn pairs(&self) -> impl Iterator<Item = (SimplexId, SimplexId)> + '_ {
        self.up.iter().map(|(&a, &b)| (a, b))
    }

    /// The coface `s` is paired with, when `s` is the lower member.
    pub fn up(&self, s: SimplexId) -> Option<SimplexId> {
        self.up.get(&s).copied()
    }

    /// The face `s` is paired with, when `s` is the upper member.
    pub fn down(&self, s: SimplexId) -> Option<SimplexId> {
        self.down.get(&s).copied()
    }

    pub fn partner(&self, s: SimplexId) -> Option<SimplexId> {
        self.up(s).or_else(|| self.down(s))
    }

    pub fn is_paired(&self, s: SimplexId) -> bool {
        self.up.contains_key(&s) || self.down.contains_key(&s)
    }

    pub fn to_pairs(&self) -> Vec<[SimplexId; 2]> {
        self.pairs().map(|(a, b)| [a, b]).collect()
    }
}

impl Serialize for VectorField {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_pairs().serialize(s)
    }
}

/// Gradient of `f` on the domain `d`: σ is paired with τ when τ ∈ U(σ).
/// Requires `f` to be a discrete Morse function on `d`.
pub fn gradient_of(k: &Complex, f: &ScalarField, d: &SimplexSet) -> Result<VectorField> {
    let mask = d.mask(k.len());
    gradient_of_mask(k, f, &mask)
}

pub(crate) fn gradient_of_mask(k: &Complex, f: &ScalarField, mask: &[bool]) -> Result<VectorField> {
    let check = check_dmf_mask(k, f, mask);
    if !check.is_ok() {
        return Err(Error::NotAMorseFunction {
            offenders: check.offenders,
        });
    }
    let mut v = VectorField::new();
    for a in (0..k.len()).filter(|&a| mask[a]) {
        if let Some(&b) = upper_in(k, f, a, |s| mask[s]).first() {
            v.insert(k, a, b)?;
        }
    }
    Ok(v)
}

/// Successors of `s` in the Hasse diagram directed downward, with the arrow
/// of each gradient pair reversed so it points up.
pub(crate) fn flow_successors<'a>(
    k: &'a Complex,
    v: &'a VectorField,
    s: SimplexId,
) -> impl Iterator<Item = SimplexId> + 'a {
    let skip = v.down(s);
    k.faces(s)
        .iter()
        .copied()
        .filter(move |&f| Some(f) != skip)
        .chain(v.up(s))
}

/// Outcome of a search for closed V-paths.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Acyclicity {
    pub acyclic: bool,
    /// A closed V-path `α₀ < β₀ > α₁ < … > α₀` when one exists.
    pub witness: Option<Vec<SimplexId>>,
}

/// Detects nontrivial closed V-paths as directed cycles of the modified Hasse
/// diagram.
pub fn is_acyclic(k: &Complex, v: &VectorField) -> Acyclicity {
    const WHITE: u8 = 0;
    const GREY: u8 = 1;
    const BLACK: u8 = 2;
    let n = k.len();
    let mut color = vec![WHITE; n];
    let mut parent = vec![usize::MAX; n];
    // Only paired simplices can lie on a cycle; start from the lower members.
    for (start, _) in v.pairs() {
        if color[start] != WHITE {
            continue;
        }
        let mut stack: Vec<(SimplexId, Vec<SimplexId>)> = Vec::new();
        color[start] = GREY;
        stack.push((start, flow_successors(k, v, start).collect()));
        while let Some((node, succ)) = stack.last_mut() {
            let node = *node;
            match succ.pop() {
                Some(next) => {
                    if color[next] == WHITE {
                        color[next] = GREY;
                        parent[next] = node;
                        let s: Vec<_> = flow_successors(k, v, next).collect();
                        stack.push((next, s));
                    } else if color[next] == GREY {
                        let mut cycle = vec![next];
                        let mut cur = node;
                        while cur != next {
                            cycle.push(cur);
                            cur = parent[cur];
                        }
                        cycle.reverse();
                        // rotate so the path starts at a lower pair member
                        if let Some(pos) = cycle.iter().position(|&c| v.up(c).is_some()) {
                            cycle.rotate_left(pos);
                        }
                        let first = cycle[0];
                        cycle.push(first);
                        return Acyclicity {
                            acyclic: false,
                            witness: Some(cycle),
                        };
                    }
                }
                None => {
                    color[node] = BLACK;
                    stack.pop();
                }
            }
        }
    }
    Acyclicity {
        acyclic: true,
        witness: None,
    }
}

/// Members of `d` not in any pair of `v`.
pub fn critical_cells(v: &VectorField, d: &SimplexSet) -> SimplexSet {
    d.iter().filter(|&s| !v.is_paired(s)).collect()
}

/// The Morse chain complex over the two-element field: one generator per
/// critical cell, boundary coefficients counting V-paths modulo 2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MorseComplex {
    /// Critical cells grouped by dimension.
    pub cells: Vec<Vec<SimplexId>>,
    /// `boundaries[p]` maps dimension `p` cells to dimension `p-1` cells;
    /// `boundaries[0]` is empty.
    pub boundaries: Vec<BinaryMatrix>,
}

impl MorseComplex {
    pub fn betti(&self) -> BettiVector {
        let ranks: Vec<usize> = self.boundaries.iter().map(BinaryMatrix::rank).collect();
        let raw = (0..self.cells.len())
            .map(|p| {
                let next = ranks.get(p + 1).copied().unwrap_or(0);
                self.cells[p].len() - ranks[p] - next
            })
            .collect();
        BettiVector::new(raw)
    }

    pub fn counts(&self) -> Vec<usize> {
        self.cells.iter().map(Vec::len).collect()
    }
}

/// Builds the Morse chain complex of an acyclic field `v` on the domain `d`.
pub fn morse_chain_complex(k: &Complex, v: &VectorField, d: &SimplexSet) -> Result<MorseComplex> {
    let acyc = is_acyclic(k, v);
    if let Some(witness) = acyc.witness {
        return Err(Error::CyclicField { witness });
    }
    let crit = critical_cells(v, d);
    let top = crit.iter().map(|c| k.dim_of(c)).max();
    let Some(top) = top else {
        return Ok(MorseComplex {
            cells: Vec::new(),
            boundaries: Vec::new(),
        });
    };
    let mut cells = vec![Vec::new(); top + 1];
    for c in crit.iter() {
        cells[k.dim_of(c)].push(c);
    }
    let mut column_of = vec![usize::MAX; k.len()];
    for layer in &cells {
        for (i, &c) in layer.iter().enumerate() {
            column_of[c] = i;
        }
    }
    let mask = d.mask(k.len());
    // flow[a]: critical cells of dim(a) reached from a by gradient paths, mod 2
    let mut flow: Vec<Option<Vec<usize>>> = vec![None; k.len()];
    let mut boundaries = vec![BinaryMatrix::zeros(0, cells[0].len())];
    for p in 1..=top {
        let mut m = BinaryMatrix::zeros(cells[p - 1].len(), cells[p].len());
        for (j, &beta) in cells[p].iter().enumerate() {
            let mut col = Vec::new();
            for &a in k.faces(beta) {
                if mask[a] {
                    let fa = flow_of(k, v, &mask, &column_of, &mut flow, a);
                    col = xor_sorted(&col, &fa);
                }
            }
            m.set_column(j, col);
        }
        boundaries.push(m);
    }
    Ok(MorseComplex { cells, boundaries })
}

fn flow_of(
    k: &Complex,
    v: &VectorField,
    mask: &[bool],
    column_of: &[usize],
    memo: &mut [Option<Vec<usize>>],
    start: SimplexId,
) -> Vec<usize> {
    // Iterative post-order over the dependency DAG.
    let mut stack = vec![(start, false)];
    while let Some((a, expanded)) = stack.pop() {
        if memo[a].is_some() {
            continue;
        }
        let partner = v.up(a);
        if !expanded {
            match partner {
                Some(t) => {
                    stack.push((a, true));
                    for &b in k.faces(t) {
                        if b != a && mask[b] && memo[b].is_none() {
                            stack.push((b, false));
                        }
                    }
                }
                None => {
                    memo[a] = Some(if v.down(a).is_none() {
                        vec![column_of[a]]
                    } else {
                        Vec::new()
                    });
                }
            }
        } else {
            let t = partner.expect("expanded only when paired up");
            let mut acc = Vec::new();
            for &b in k.faces(t) {
                if b != a && mask[b] {
                    acc = xor_sorted(&acc, memo[b].as_ref().expect("dependency computed"));
                }
            }
            memo[a] = Some(acc);
        }
    }
    memo[start].clone().unwrap_or_default()
}

fn xor_sorted(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// Collapses the sublevel complex `K_b` onto `K_a` by removing gradient pairs
/// of `f` as free pairs. Returns the removed pairs in order, or `None` when
/// the collapse gets stuck (which happens only if `(a, b]` holds a critical
/// value).
pub fn collapse_between(
    k: &Complex,
    f: &ScalarField,
    a: f64,
    b: f64,
) -> Result<Option<Vec<(SimplexId, SimplexId)>>> {
    let grad = gradient_of(k, f, &k.all())?;
    Ok(collapse_with(k, f, &grad, a, b))
}

/// Free-pair removal from `K_b` down to `K_a` using the pairs of `grad`.
/// Among the currently free pairs, the one with the largest values goes
/// first.
pub(crate) fn collapse_with(
    k: &Complex,
    f: &ScalarField,
    grad: &VectorField,
    a: f64,
    b: f64,
) -> Option<Vec<(SimplexId, SimplexId)>> {
    use std::cmp::Ordering;
    use std::collections::BinaryHeap;

    struct Key(f64, f64, SimplexId, SimplexId);
    impl PartialEq for Key {
        fn eq(&self, o: &Self) -> bool {
            self.cmp(o) == Ordering::Equal
        }
    }
    impl Eq for Key {}
    impl PartialOrd for Key {
        fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
            Some(self.cmp(o))
        }
    }
    impl Ord for Key {
        fn cmp(&self, o: &Self) -> Ordering {
            self.0
                .total_cmp(&o.0)
                .then(self.1.total_cmp(&o.1))
                .then(self.3.cmp(&o.3))
                .then(self.2.cmp(&o.2))
        }
    }

    let target = k.sublevel_complex(f, a);
    let mut current = k.sublevel_complex(f, b).mask(k.len());
    let in_play = |s: SimplexId, cur: &[bool]| cur[s] && !target.contains(s);
    let free = |s: SimplexId, t: SimplexId, cur: &[bool]| {
        k.cofaces(t).iter().all(|&c| !cur[c]) && k.cofaces(s).iter().all(|&c| c == t || !cur[c])
    };
    let mut remaining = grad
        .pairs()
        .filter(|&(s, t)| in_play(s, &current) && in_play(t, &current))
        .count();
    let mut heap: BinaryHeap<Key> = grad
        .pairs()
        .filter(|&(s, t)| in_play(s, &current) && in_play(t, &current) && free(s, t, &current))
        .map(|(s, t)| Key(f.value(t), f.value(s), s, t))
        .collect();
    let mut removed = Vec::new();
    while let Some(Key(_, _, s, t)) = heap.pop() {
        if !current[s] || !current[t] || !free(s, t, &current) {
            continue;
        }
        current[s] = false;
        current[t] = false;
        removed.push((s, t));
        remaining -= 1;
        for &x in k.faces(s).iter().chain(k.faces(t)) {
            let pair = match (grad.up(x), grad.down(x)) {
                (Some(u), _) => Some((x, u)),
                (_, Some(d)) => Some((d, x)),
                _ => None,
            };
            if let Some((p, q)) = pair {
                if in_play(p, &current) && in_play(q, &current) && free(p, q, &current) {
                    heap.push(Key(f.value(q), f.value(p), p, q));
                }
            }
        }
    }
    let done = remaining == 0 && SimplexSet::from_mask(&current) == target;
    done.then_some(removed)
}
