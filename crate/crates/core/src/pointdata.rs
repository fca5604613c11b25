//! Extending data sampled on vertices to discrete Morse functions: the
//! lower-link recursion with path cancellation, its stratum-wise variant and
//! the passage to a single global function.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::complex::{Complex, ScalarField, SimplexId, SimplexSet};
use crate::error::{Error, Result};
use crate::morse::VectorField;
use crate::separating::{separating_function, SeparatingFunction};
use crate::strat::{strata_order, Stratification};

/// Real values on vertices, keyed by vertex label.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct VertexField {
    vertices: BTreeMap<i64, f64>,
}

impl VertexField {
    pub fn from_pairs<I: IntoIterator<Item = (i64, f64)>>(pairs: I) -> Self {
        Self {
            vertices: pairs.into_iter().collect(),
        }
    }

    pub fn get(&self, v: i64) -> Result<f64> {
        self.vertices
            .get(&v)
            .copied()
            .ok_or(Error::MissingVertexValue(v))
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.vertices.iter().map(|(&v, &x)| (v, x))
    }

    pub fn check_injective(&self) -> Result<()> {
        let mut by_value: Vec<(f64, i64)> = self.iter().map(|(v, x)| (x, v)).collect();
        by_value.sort_by(|a, b| a.0.total_cmp(&b.0));
        for w in by_value.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::NonInjectiveVertexField {
                    first: w[0].1,
                    second: w[1].1,
                    value: w[0].0,
                });
            }
        }
        Ok(())
    }

    /// Values of the vertices of `k`, in increasing order of value.
    fn sorted_vertices(&self, k: &Complex) -> Result<Vec<(f64, SimplexId)>> {
        let mut out = k
            .vertex_ids()
            .map(|id| Ok((self.get(k.simplex(id).vertices[0])?, id)))
            .collect::<Result<Vec<_>>>()?;
        out.sort_by(|a, b| a.0.total_cmp(&b.0));
        Ok(out)
    }

    /// Smallest difference between the values of two vertices of `k`.
    fn gap(&self, k: &Complex) -> Result<f64> {
        let sorted = self.sorted_vertices(k)?;
        Ok(sorted
            .windows(2)
            .map(|w| w[1].0 - w[0].0)
            .fold(f64::INFINITY, f64::min))
    }

    fn max_on(&self, k: &Complex, s: SimplexId) -> Result<(f64, i64)> {
        let mut best: Option<(f64, i64)> = None;
        for &v in &k.simplex(s).vertices {
            let x = self.get(v)?;
            if best.is_none_or(|(b, _)| x > b) {
                best = Some((x, v));
            }
        }
        Ok(best.expect("simplices are non-empty"))
    }
}

/// `maxf(σ)`: the largest vertex value of σ.
pub fn maxf_extension(k: &Complex, f0: &VertexField) -> Result<ScalarField> {
    f0.check_injective()?;
    let values = (0..k.len())
        .map(|s| f0.max_on(k, s).map(|(x, _)| x))
        .collect::<Result<Vec<_>>>()?;
    Ok(ScalarField::new(values))
}

/// Mean of the vertex values of σ, the piecewise-linear reading of the data.
pub fn mean_extension(k: &Complex, f0: &VertexField) -> Result<ScalarField> {
    f0.check_injective()?;
    let values = (0..k.len())
        .map(|s| {
            let vs = &k.simplex(s).vertices;
            let sum = vs.iter().map(|&v| f0.get(v)).sum::<Result<f64>>()?;
            Ok(sum / vs.len() as f64)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ScalarField::new(values))
}

/// Output of [`extend_dmf`].
#[derive(Debug, Clone, PartialEq)]
pub struct DmfExtension {
    pub field: VectorField,
    pub values: ScalarField,
    pub epsilon: f64,
}

/// Builds an acyclic gradient from vertex data by recursion on lower links,
/// together with a discrete Morse function `f̃` inducing it that agrees with
/// `f0` on vertices and stays within `epsilon` of `maxf`.
pub fn extend_dmf(k: &Complex, f0: &VertexField, epsilon: f64) -> Result<DmfExtension> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "epsilon must be positive, got {epsilon}"
        )));
    }
    f0.check_injective()?;
    let ranks = VertexRanks::new(f0);
    let field = lower_link_gradient(k, f0, &ranks)?;
    let delta = (epsilon / 2.0).min(f0.gap(k)? / 3.0);
    let values = compatible_values(k, f0, &field, delta)?;
    Ok(DmfExtension {
        field,
        values,
        epsilon,
    })
}

/// Rank of every vertex label by value; keys for deterministic scans.
struct VertexRanks(HashMap<i64, usize>);

impl VertexRanks {
    fn new(f0: &VertexField) -> Self {
        let mut sorted: Vec<(f64, i64)> = f0.iter().map(|(v, x)| (x, v)).collect();
        sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
        Self(sorted.into_iter().enumerate().map(|(r, (_, v))| (v, r)).collect())
    }

    /// Vertex ranks of σ in decreasing order; compared lexicographically.
    fn key(&self, k: &Complex, s: SimplexId) -> Vec<usize> {
        let mut key: Vec<usize> = k.simplex(s).vertices.iter().map(|v| self.0[v]).collect();
        key.sort_unstable_by(|a, b| b.cmp(a));
        key
    }
}

fn lower_link_gradient(k: &Complex, f0: &VertexField, ranks: &VertexRanks) -> Result<VectorField> {
    let mut field = VectorField::new();
    for (_, vid) in f0.sorted_vertices(k)? {
        let label = k.simplex(vid).vertices[0];
        let link = k.lower_link_unchecked(label, f0)?;
        if link.is_empty() {
            continue;
        }
        let mut link_field = lower_link_gradient(&link, f0, ranks)?;
        cancel_unique_paths(&link, &mut link_field, ranks);
        let cone = |s: SimplexId| -> SimplexId {
            let mut vs = link.simplex(s).vertices.clone();
            vs.push(label);
            k.find(&vs).expect("cone over a lower link simplex is in the complex")
        };
        let w = link
            .vertex_ids()
            .filter(|&u| !link_field.is_paired(u))
            .min_by_key(|&u| ranks.0[&link.simplex(u).vertices[0]])
            .expect("an acyclic field leaves a critical vertex");
        field.insert(k, vid, cone(w))?;
        for (a, b) in link_field.pairs() {
            field.insert(k, cone(a), cone(b))?;
        }
    }
    Ok(field)
}

/// Repeatedly cancels a critical pair `(α, β)` joined by exactly one gradient
/// path from the boundary of β to α, by reversing that path.
fn cancel_unique_paths(k: &Complex, v: &mut VectorField, ranks: &VertexRanks) {
    let top = match k.dim() {
        Some(d) => d,
        None => return,
    };
    'restart: loop {
        let mut crit: Vec<Vec<SimplexId>> = vec![Vec::new(); top + 1];
        for s in 0..k.len() {
            if !v.is_paired(s) {
                crit[k.dim_of(s)].push(s);
            }
        }
        for layer in &mut crit {
            layer.sort_by_key(|&s| ranks.key(k, s));
        }
        for p in 0..top {
            for &alpha in &crit[p] {
                for &beta in &crit[p + 1] {
                    if let Some(path) = unique_path(k, v, beta, alpha) {
                        reverse_path(k, v, beta, &path);
                        continue 'restart;
                    }
                }
            }
        }
        return;
    }
}

/// The p-cells `a₀, …, a_m = α` of the single gradient path from a face of β
/// to α, or `None` when the number of such paths is not one.
fn unique_path(
    k: &Complex,
    v: &VectorField,
    beta: SimplexId,
    alpha: SimplexId,
) -> Option<Vec<SimplexId>> {
    let mut memo: HashMap<SimplexId, u8> = HashMap::new();
    let total = k
        .faces(beta)
        .iter()
        .map(|&a| paths_to(k, v, a, alpha, &mut memo))
        .fold(0u8, |acc, c| acc.saturating_add(c).min(2));
    if total != 1 {
        return None;
    }
    let mut path = Vec::new();
    let mut x = *k.faces(beta).iter().find(|&&a| memo[&a] == 1)?;
    loop {
        path.push(x);
        if x == alpha {
            return Some(path);
        }
        let b = v.up(x)?;
        x = *k.faces(b).iter().find(|&&y| y != x && memo.get(&y) == Some(&1))?;
    }
}

/// Number of gradient paths from `x` to `alpha`, saturated at 2.
fn paths_to(
    k: &Complex,
    v: &VectorField,
    x: SimplexId,
    alpha: SimplexId,
    memo: &mut HashMap<SimplexId, u8>,
) -> u8 {
    if let Some(&c) = memo.get(&x) {
        return c;
    }
    let c = if x == alpha {
        1
    } else if let Some(b) = v.up(x) {
        let mut c = 0u8;
        for &y in k.faces(b) {
            if y != x {
                c = c.saturating_add(paths_to(k, v, y, alpha, memo)).min(2);
            }
        }
        c
    } else {
        0
    };
    memo.insert(x, c);
    c
}

fn reverse_path(k: &Complex, v: &mut VectorField, beta: SimplexId, path: &[SimplexId]) {
    let uppers: Vec<SimplexId> = path[..path.len() - 1]
        .iter()
        .map(|&a| v.up(a).expect("interior path cells are paired"))
        .collect();
    for &a in &path[..path.len() - 1] {
        v.remove_pair(a);
    }
    v.insert(k, path[0], beta).expect("first cell is a free face of beta");
    for (i, &b) in uppers.iter().enumerate() {
        v.insert(k, path[i + 1], b).expect("reversed path is a matching");
    }
}

/// A function whose gradient is exactly `field`: within the lower star of
/// each vertex the values follow a topological order of the Hasse diagram
/// with paired arrows reversed, squeezed into `(f0(v) - delta, f0(v) + delta)`
/// with `f0(v)` itself on the vertex.
fn compatible_values(
    k: &Complex,
    f0: &VertexField,
    field: &VectorField,
    delta: f64,
) -> Result<ScalarField> {
    let mut owner: Vec<(f64, i64)> = Vec::with_capacity(k.len());
    for s in 0..k.len() {
        owner.push(f0.max_on(k, s)?);
    }
    let mut stars: BTreeMap<i64, Vec<SimplexId>> = BTreeMap::new();
    for (s, &(_, v)) in owner.iter().enumerate() {
        stars.entry(v).or_default().push(s);
    }
    let mut values = vec![0.0; k.len()];
    for (v, members) in stars {
        let base = f0.get(v)?;
        let vid = k.find(&[v]).ok_or(Error::MissingVertexValue(v))?;
        let order = modified_hasse_order(k, field, &members, |s| owner[s].1 == v);
        let rank_v = order.iter().position(|&s| s == vid).expect("vertex in its own star") as f64;
        let scale = delta / (members.len() as f64 + 1.0);
        for (r, &s) in order.iter().enumerate() {
            values[s] = if s == vid {
                base
            } else {
                base + scale * (r as f64 - rank_v)
            };
        }
    }
    Ok(ScalarField::new(values))
}

/// Topological order of `members` in the Hasse diagram directed upward, with
/// paired edges directed downward. Ties go to the lowest `(dim, id)`.
pub(crate) fn modified_hasse_order(
    k: &Complex,
    field: &VectorField,
    members: &[SimplexId],
    inside: impl Fn(SimplexId) -> bool,
) -> Vec<SimplexId> {
    use std::cmp::Reverse;
    use std::collections::BinaryHeap;
    let mut indeg: HashMap<SimplexId, usize> = members.iter().map(|&s| (s, 0)).collect();
    let mut succ: HashMap<SimplexId, Vec<SimplexId>> = HashMap::new();
    for &t in members {
        for &s in k.faces(t) {
            if !inside(s) {
                continue;
            }
            let (from, to) = if field.up(s) == Some(t) { (t, s) } else { (s, t) };
            succ.entry(from).or_default().push(to);
            *indeg.get_mut(&to).expect("member") += 1;
        }
    }
    let mut ready: BinaryHeap<Reverse<(usize, SimplexId)>> = members
        .iter()
        .filter(|s| indeg[s] == 0)
        .map(|&s| Reverse((k.dim_of(s), s)))
        .collect();
    let mut out = Vec::with_capacity(members.len());
    while let Some(Reverse((_, s))) = ready.pop() {
        out.push(s);
        for &t in succ.get(&s).map(Vec::as_slice).unwrap_or(&[]) {
            let d = indeg.get_mut(&t).expect("member");
            *d -= 1;
            if *d == 0 {
                ready.push(Reverse((k.dim_of(t), t)));
            }
        }
    }
    assert_eq!(out.len(), members.len(), "field restricted to members is acyclic");
    out
}

/// Output of [`extend_stratified`].
#[derive(Debug, Clone, PartialEq)]
pub struct StratifiedExtension {
    pub values: ScalarField,
    /// Gradient within each stratum, by stratum name.
    pub fields: BTreeMap<String, VectorField>,
    pub union: VectorField,
}

/// Runs the lower-link recursion separately on each stratum, restricted to
/// the simplices whose closure stays inside the stratum; everything else is
/// left critical.
pub fn extend_stratified(
    k: &Complex,
    s: &Stratification,
    f0: &VertexField,
) -> Result<StratifiedExtension> {
    let order = strata_order(k, s)?;
    f0.check_injective()?;
    let ranks = VertexRanks::new(f0);
    let gap = f0.gap(k)?;
    let delta = if gap.is_finite() { gap / 3.0 } else { 1.0 / 3.0 };
    let mut values = vec![f64::NAN; k.len()];
    let mut fields = BTreeMap::new();
    let mut union = VectorField::new();
    for &i in &order.linear {
        let stratum = s.stratum(i);
        let closed: SimplexSet = stratum
            .iter()
            .filter(|&a| k.closed_faces(a).into_iter().all(|b| stratum.contains(b)))
            .collect();
        let (sub, back) = k.subcomplex(&closed)?;
        let sub_field = lower_link_gradient(&sub, f0, &ranks)?;
        let sub_values = compatible_values(&sub, f0, &sub_field, delta)?;
        let mut local = VectorField::new();
        for (a, b) in sub_field.pairs() {
            local.insert(k, back[a], back[b])?;
        }
        for (j, &a) in back.iter().enumerate() {
            values[a] = sub_values.value(j);
        }
        let mut rest: Vec<SimplexId> = stratum.iter().filter(|&a| !closed.contains(a)).collect();
        rest.sort_by_key(|&a| (k.dim_of(a), a));
        for a in rest {
            let mut floor = f0.max_on(k, a)?.0;
            for b in k.closed_faces(a) {
                if b != a && stratum.contains(b) {
                    floor = floor.max(values[b]);
                }
            }
            values[a] = above(floor, delta);
        }
        union.extend_from(k, &local)?;
        fields.insert(s.name(i).to_string(), local);
    }
    Ok(StratifiedExtension {
        values: ScalarField::new(values),
        fields,
        union,
    })
}

fn above(x: f64, step: f64) -> f64 {
    let y = x + step;
    if y > x {
        y
    } else {
        x.next_up()
    }
}

/// A discrete Morse function on all of `K` whose gradient is the union of the
/// stratum-wise fields of [`extend_stratified`].
pub fn extend_global(
    k: &Complex,
    s: &Stratification,
    f0: &VertexField,
) -> Result<SeparatingFunction> {
    let ext = extend_stratified(k, s, f0)?;
    separating_function(k, s, &ext.union)
}
