//! Finite simplicial complexes as sets of open simplices, together with the
//! subset calculus (closure, open star, interior, frontier, pieces) that the
//! stratified machinery is built on.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pointdata::VertexField;

/// Dense index of a simplex inside its host [`Complex`].
pub type SimplexId = usize;

/// An open simplex, identified by its sorted vertex list.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Simplex {
    pub id: SimplexId,
    pub vertices: Vec<i64>,
}

impl Simplex {
    pub fn dim(&self) -> usize {
        self.vertices.len() - 1
    }
}

impl fmt::Display for Simplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, v) in self.vertices.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "]")
    }
}

/// A finite simplicial complex with explicit codimension-1 incidence (the
/// Hasse diagram). Immutable once built.
#[derive(Debug, Clone)]
pub struct Complex {
    simplices: Vec<Simplex>,
    faces: Vec<Vec<SimplexId>>,
    cofaces: Vec<Vec<SimplexId>>,
    index: HashMap<Vec<i64>, SimplexId>,
}

fn canonical(vertices: &[i64]) -> Result<Vec<i64>> {
    if vertices.is_empty() {
        return Err(Error::EmptySimplex);
    }
    let mut sorted = vertices.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::RepeatedVertex(vertices.to_vec()));
    }
    Ok(sorted)
}

impl Complex {
    /// Builds a complex from vertex lists. Ids follow input order. Every face
    /// of every listed simplex must itself be listed; nothing is completed
    /// automatically.
    pub fn from_vertex_lists<I, V>(lists: I) -> Result<Self>
    where
        I: IntoIterator<Item = V>,
        V: AsRef<[i64]>,
    {
        let mut simplices = Vec::new();
        let mut index = HashMap::new();
        for list in lists {
            let vertices = canonical(list.as_ref())?;
            if index.contains_key(&vertices) {
                return Err(Error::DuplicateSimplex(vertices));
            }
            let id = simplices.len();
            index.insert(vertices.clone(), id);
            simplices.push(Simplex { id, vertices });
        }
        let n = simplices.len();
        let mut faces = vec![Vec::new(); n];
        let mut cofaces = vec![Vec::new(); n];
        for s in &simplices {
            if s.vertices.len() < 2 {
                continue;
            }
            for skip in 0..s.vertices.len() {
                let face: Vec<i64> = s
                    .vertices
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i != skip)
                    .map(|(_, &v)| v)
                    .collect();
                match index.get(&face) {
                    Some(&fid) => {
                        faces[s.id].push(fid);
                        cofaces[fid].push(s.id);
                    }
                    None => {
                        return Err(Error::MissingFace {
                            simplex: s.vertices.clone(),
                            face,
                        })
                    }
                }
            }
            faces[s.id].sort_unstable();
        }
        for c in &mut cofaces {
            c.sort_unstable();
        }
        Ok(Self {
            simplices,
            faces,
            cofaces,
            index,
        })
    }

    /// The full closure of the given maximal simplices, with ids assigned by
    /// increasing dimension then lexicographic vertex order.
    pub fn from_maximal_simplices<I, V>(maximal: I) -> Result<Self>
    where
        I: IntoIterator<Item = V>,
        V: AsRef<[i64]>,
    {
        let mut all = BTreeSet::new();
        for m in maximal {
            let m = canonical(m.as_ref())?;
            let k = m.len();
            for mask in 1u64..(1u64 << k) {
                let face: Vec<i64> = (0..k).filter(|i| mask >> i & 1 == 1).map(|i| m[i]).collect();
                all.insert((face.len(), face));
            }
        }
        Self::from_vertex_lists(all.into_iter().map(|(_, v)| v))
    }

    pub fn len(&self) -> usize {
        self.simplices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }

    pub fn simplex(&self, id: SimplexId) -> &Simplex {
        &self.simplices[id]
    }

    pub fn simplices(&self) -> &[Simplex] {
        &self.simplices
    }

    pub fn dim_of(&self, id: SimplexId) -> usize {
        self.simplices[id].dim()
    }

    /// Dimension of the complex; `None` when empty.
    pub fn dim(&self) -> Option<usize> {
        self.simplices.iter().map(Simplex::dim).max()
    }

    /// Codimension-1 faces.
    pub fn faces(&self, id: SimplexId) -> &[SimplexId] {
        &self.faces[id]
    }

    /// Codimension-1 cofaces.
    pub fn cofaces(&self, id: SimplexId) -> &[SimplexId] {
        &self.cofaces[id]
    }

    pub fn find(&self, vertices: &[i64]) -> Option<SimplexId> {
        let v = canonical(vertices).ok()?;
        self.index.get(&v).copied()
    }

    pub fn vertex_ids(&self) -> impl Iterator<Item = SimplexId> + '_ {
        self.simplices.iter().filter(|s| s.dim() == 0).map(|s| s.id)
    }

    /// Maximum number of codimension-1 faces plus cofaces of any simplex.
    pub fn max_degree(&self) -> usize {
        (0..self.len())
            .map(|i| self.faces[i].len() + self.cofaces[i].len())
            .max()
            .unwrap_or(0)
    }

    pub fn all(&self) -> SimplexSet {
        SimplexSet::from_ids(0..self.len())
    }

    pub fn check_id(&self, id: SimplexId) -> Result<()> {
        if id < self.len() {
            Ok(())
        } else {
            Err(Error::UnknownSimplex(id))
        }
    }

    /// True when `a` is a (not necessarily proper) face of `b`.
    pub fn is_face(&self, a: SimplexId, b: SimplexId) -> bool {
        let (va, vb) = (&self.simplices[a].vertices, &self.simplices[b].vertices);
        va.len() <= vb.len() && va.iter().all(|v| vb.binary_search(v).is_ok())
    }

    /// All faces of `id` of every codimension, `id` included.
    pub fn closed_faces(&self, id: SimplexId) -> Vec<SimplexId> {
        let mut seen = BTreeSet::new();
        let mut stack = vec![id];
        while let Some(s) = stack.pop() {
            if seen.insert(s) {
                stack.extend_from_slice(&self.faces[s]);
            }
        }
        seen.into_iter().collect()
    }

    /// Open star: `id` together with all of its cofaces of every codimension.
    pub fn open_star(&self, id: SimplexId) -> Vec<SimplexId> {
        let mut seen = BTreeSet::new();
        let mut stack = vec![id];
        while let Some(s) = stack.pop() {
            if seen.insert(s) {
                stack.extend_from_slice(&self.cofaces[s]);
            }
        }
        seen.into_iter().collect()
    }

    /// The subset closed under faces generated by `set`.
    pub fn closure(&self, set: &SimplexSet) -> SimplexSet {
        let mut mark = vec![false; self.len()];
        let mut stack: Vec<SimplexId> = set.iter().collect();
        while let Some(s) = stack.pop() {
            if !mark[s] {
                mark[s] = true;
                stack.extend_from_slice(&self.faces[s]);
            }
        }
        SimplexSet::from_mask(&mark)
    }

    /// Members of `set` whose open star lies inside `set`; equals the
    /// topological interior of the union of the open simplices.
    pub fn interior(&self, set: &SimplexSet) -> SimplexSet {
        let mut inside = vec![false; self.len()];
        for s in set.iter() {
            inside[s] = true;
        }
        // A member fails exactly when it is a face of something outside.
        let mut bad = vec![false; self.len()];
        let mut stack: Vec<SimplexId> = (0..self.len()).filter(|&i| !inside[i]).collect();
        while let Some(s) = stack.pop() {
            for &f in &self.faces[s] {
                if !bad[f] {
                    bad[f] = true;
                    stack.push(f);
                }
            }
        }
        SimplexSet::from_ids(set.iter().filter(|&s| !bad[s]))
    }

    /// `closure(set) \ interior(set)`.
    pub fn frontier(&self, set: &SimplexSet) -> SimplexSet {
        let interior = self.interior(set);
        self.closure(set).difference(&interior)
    }

    /// Connected components of the union of the open simplices in `set`:
    /// two members are joined when one is a face of the other.
    pub fn pieces(&self, set: &SimplexSet) -> Vec<SimplexSet> {
        let mut inside = vec![false; self.len()];
        for s in set.iter() {
            inside[s] = true;
        }
        let mut uf = UnionFind::new(self.len());
        for s in set.iter() {
            for f in self.closed_faces(s) {
                if inside[f] {
                    uf.union(s, f);
                }
            }
        }
        let mut groups: Vec<(SimplexId, Vec<SimplexId>)> = Vec::new();
        let mut root_slot: HashMap<usize, usize> = HashMap::new();
        for s in set.iter() {
            let r = uf.find(s);
            let slot = *root_slot.entry(r).or_insert_with(|| {
                groups.push((s, Vec::new()));
                groups.len() - 1
            });
            groups[slot].1.push(s);
        }
        groups
            .into_iter()
            .map(|(_, members)| SimplexSet::from_ids(members))
            .collect()
    }

    /// Sandwich criterion for local closedness: `a < b < c` with `a, c` in the
    /// set forces `b` into the set. Returns the first offending triple.
    pub fn locally_closed_witness(
        &self,
        set: &SimplexSet,
    ) -> Option<(SimplexId, SimplexId, SimplexId)> {
        let mut inside = vec![false; self.len()];
        for s in set.iter() {
            inside[s] = true;
        }
        // It suffices to look for an outside b with a face and a coface path
        // into the set: b outside, some face of b in the closure-side and some
        // coface of b in the set.
        let closure = self.closure(set);
        for b in closure.iter().filter(|&b| !inside[b]) {
            let below = self.closed_faces(b).into_iter().find(|&a| a != b && inside[a]);
            let Some(a) = below else { continue };
            let above = self.open_star(b).into_iter().find(|&c| c != b && inside[c]);
            if let Some(c) = above {
                return Some((a, b, c));
            }
        }
        None
    }

    pub fn is_locally_closed(&self, set: &SimplexSet) -> bool {
        self.locally_closed_witness(set).is_none()
    }

    /// True when every face of every member is a member.
    pub fn is_downward_closed(&self, set: &SimplexSet) -> bool {
        set.iter()
            .all(|s| self.faces[s].iter().all(|f| set.contains(*f)))
    }

    /// `closure({σ : f(σ) ≤ c})`.
    pub fn sublevel_complex(&self, f: &ScalarField, c: f64) -> SimplexSet {
        let below = SimplexSet::from_ids((0..self.len()).filter(|&i| f.value(i) <= c));
        self.closure(&below)
    }

    pub fn euler_characteristic(&self, set: &SimplexSet) -> i64 {
        set.iter()
            .map(|s| if self.dim_of(s).is_multiple_of(2) { 1 } else { -1 })
            .sum()
    }

    /// Lower link of the vertex `v`: simplices σ with `v ∉ σ`, `σ ∪ {v} ∈ K`
    /// and every vertex of σ valued strictly below `v`. Returned as its own
    /// complex over the same vertex labels.
    pub fn lower_link(&self, v: i64, field: &VertexField) -> Result<Complex> {
        field.check_injective()?;
        self.lower_link_unchecked(v, field)
    }

    pub(crate) fn lower_link_unchecked(&self, v: i64, field: &VertexField) -> Result<Complex> {
        let vid = self.find(&[v]).ok_or(Error::MissingVertexValue(v))?;
        let fv = field.get(v)?;
        let mut lists = Vec::new();
        for s in self.open_star(vid) {
            if s == vid {
                continue;
            }
            let rest: Vec<i64> = self.simplices[s]
                .vertices
                .iter()
                .copied()
                .filter(|&w| w != v)
                .collect();
            let mut lower = true;
            for &w in &rest {
                if field.get(w)? >= fv {
                    lower = false;
                    break;
                }
            }
            if lower {
                lists.push((rest.len(), rest));
            }
        }
        lists.sort();
        Complex::from_vertex_lists(lists.into_iter().map(|(_, l)| l))
    }

    /// Complex induced on a downward-closed subset, with a map from new ids
    /// back to ids of `self`.
    pub fn subcomplex(&self, set: &SimplexSet) -> Result<(Complex, Vec<SimplexId>)> {
        for s in set.iter() {
            for &f in &self.faces[s] {
                if !set.contains(f) {
                    return Err(Error::NotAComplex { simplex: s, face: f });
                }
            }
        }
        let mut ids: Vec<SimplexId> = set.iter().collect();
        ids.sort_by_key(|&s| (self.dim_of(s), s));
        let sub = Complex::from_vertex_lists(ids.iter().map(|&s| self.simplices[s].vertices.clone()))?;
        Ok((sub, ids))
    }
}

/// A set of simplex ids inside a host complex.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SimplexSet(BTreeSet<SimplexId>);

impl SimplexSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_ids<I: IntoIterator<Item = SimplexId>>(ids: I) -> Self {
        Self(ids.into_iter().collect())
    }

    pub fn from_mask(mask: &[bool]) -> Self {
        Self(
            mask.iter()
                .enumerate()
                .filter(|(_, &m)| m)
                .map(|(i, _)| i)
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, id: SimplexId) -> bool {
        self.0.contains(&id)
    }

    pub fn insert(&mut self, id: SimplexId) -> bool {
        self.0.insert(id)
    }

    pub fn remove(&mut self, id: SimplexId) -> bool {
        self.0.remove(&id)
    }

    pub fn iter(&self) -> impl Iterator<Item = SimplexId> + '_ {
        self.0.iter().copied()
    }

    pub fn union(&self, other: &Self) -> Self {
        Self(self.0.union(&other.0).copied().collect())
    }

    pub fn intersection(&self, other: &Self) -> Self {
        Self(self.0.intersection(&other.0).copied().collect())
    }

    pub fn difference(&self, other: &Self) -> Self {
        Self(self.0.difference(&other.0).copied().collect())
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn is_disjoint(&self, other: &Self) -> bool {
        self.0.is_disjoint(&other.0)
    }

    pub fn to_vec(&self) -> Vec<SimplexId> {
        self.0.iter().copied().collect()
    }

    pub fn first(&self) -> Option<SimplexId> {
        self.0.first().copied()
    }

    pub fn mask(&self, len: usize) -> Vec<bool> {
        let mut m = vec![false; len];
        for i in self.iter() {
            m[i] = true;
        }
        m
    }
}

impl FromIterator<SimplexId> for SimplexSet {
    fn from_iter<T: IntoIterator<Item = SimplexId>>(iter: T) -> Self {
        Self(iter.into_iter().collect())
    }
}

impl<'a> IntoIterator for &'a SimplexSet {
    type Item = &'a SimplexId;
    type IntoIter = std::collections::btree_set::Iter<'a, SimplexId>;
    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

/// A real value on every simplex of a host complex.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ScalarField(Vec<f64>);

impl ScalarField {
    pub fn new(values: Vec<f64>) -> Self {
        Self(values)
    }

    pub fn value(&self, id: SimplexId) -> f64 {
        self.0[id]
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Strictly increasing in dimension: `f(σ) = dim σ`. A discrete Morse
    /// function with every simplex critical.
    pub fn by_dimension(k: &Complex) -> Self {
        Self((0..k.len()).map(|i| k.dim_of(i) as f64).collect())
    }
}

/// Builds a complex and its scalar field from `(vertex list, value)` pairs.
pub fn build_complex<I, V>(descriptions: I) -> Result<(Complex, ScalarField)>
where
    I: IntoIterator<Item = (V, f64)>,
    V: AsRef<[i64]>,
{
    let (lists, values): (Vec<Vec<i64>>, Vec<f64>) = descriptions
        .into_iter()
        .map(|(v, x)| (v.as_ref().to_vec(), x))
        .unzip();
    let k = Complex::from_vertex_lists(lists)?;
    Ok((k, ScalarField::new(values)))
}

pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub(crate) fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}
