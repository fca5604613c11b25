//! Seeded generators for property suites and benchmarks.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::complex::{Complex, ScalarField, SimplexId};
use crate::morse::{is_acyclic, VectorField};
use crate::pointdata::VertexField;
use crate::strat::Stratification;
use crate::stratify::construct_stratification;

pub type CaseRng = ChaCha8Rng;

/// Deterministic generator for case `index` of a suite seeded with `seed`.
pub fn case_rng(seed: u64, index: u64) -> CaseRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// A random complex with at most `max_simplices` simplices and dimension at
/// most `max_dim`, built from random maximal simplices on a few vertices.
pub fn random_complex<R: Rng>(rng: &mut R, max_simplices: usize, max_dim: usize) -> Complex {
    assert!(max_simplices >= 1);
    let n_vertices = rng.gen_range(1..=max_simplices.clamp(1, 6));
    let vertices: Vec<i64> = (0..n_vertices as i64).collect();
    let mut maximal: Vec<Vec<i64>> = vertices.iter().map(|&v| vec![v]).collect();
    let mut current = Complex::from_maximal_simplices(&maximal).expect("vertices");
    for _ in 0..rng.gen_range(0..8) {
        let size = rng.gen_range(2..=(max_dim + 1).min(n_vertices).max(2));
        if size > n_vertices {
            break;
        }
        let mut simplex: Vec<i64> = vertices.choose_multiple(rng, size).copied().collect();
        simplex.sort_unstable();
        maximal.push(simplex);
        let next = Complex::from_maximal_simplices(&maximal).expect("valid simplices");
        if next.len() > max_simplices {
            maximal.pop();
        } else {
            current = next;
        }
    }
    current
}

/// Integer values drawn from a small range, so ties are common.
pub fn random_field<R: Rng>(rng: &mut R, k: &Complex) -> ScalarField {
    let top = (k.len() as i64).max(2);
    ScalarField::new((0..k.len()).map(|_| rng.gen_range(0..top) as f64).collect())
}

/// A random acyclic matching on the Hasse diagram.
pub fn random_acyclic_matching<R: Rng>(rng: &mut R, k: &Complex) -> VectorField {
    let mut edges: Vec<(SimplexId, SimplexId)> = (0..k.len())
        .flat_map(|t| k.faces(t).iter().map(move |&s| (s, t)))
        .collect();
    edges.shuffle(rng);
    let mut v = VectorField::new();
    for (s, t) in edges {
        if v.is_paired(s) || v.is_paired(t) || rng.gen_bool(0.3) {
            continue;
        }
        let mut trial = v.clone();
        trial.insert(k, s, t).expect("codimension one");
        if is_acyclic(k, &trial).witness.is_none() {
            v = trial;
        }
    }
    v
}

/// A discrete Morse function whose gradient is `v`: a random topological
/// order of the Hasse diagram with the arrows of `v` reversed, where paired
/// cells sometimes share a value.
pub fn dmf_for<R: Rng>(rng: &mut R, k: &Complex, v: &VectorField) -> ScalarField {
    let n = k.len();
    let mut indeg = vec![0usize; n];
    let mut succ: Vec<Vec<SimplexId>> = vec![Vec::new(); n];
    for t in 0..n {
        for &s in k.faces(t) {
            let (from, to) = if v.up(s) == Some(t) { (t, s) } else { (s, t) };
            succ[from].push(to);
            indeg[to] += 1;
        }
    }
    let mut ready: Vec<SimplexId> = (0..n).filter(|&a| indeg[a] == 0).collect();
    let mut values = vec![0.0; n];
    let mut level = 0.0;
    while !ready.is_empty() {
        let a = ready.swap_remove(rng.gen_range(0..ready.len()));
        // a paired face may take the value of the coface just placed
        let tie = v.down(a).is_none() && v.up(a).is_some_and(|t| values[t] == level) && rng.gen_bool(0.5);
        if !tie {
            level += 1.0;
        }
        values[a] = level;
        for &b in &succ[a] {
            indeg[b] -= 1;
            if indeg[b] == 0 {
                ready.push(b);
            }
        }
    }
    ScalarField::new(values)
}

/// A random discrete Morse function on `k`.
pub fn random_dmf<R: Rng>(rng: &mut R, k: &Complex) -> ScalarField {
    let v = random_acyclic_matching(rng, k);
    dmf_for(rng, k, &v)
}

/// A random function together with the stratification the algorithm builds
/// for it.
pub fn random_dsmf<R: Rng>(rng: &mut R, k: &Complex) -> (ScalarField, Stratification) {
    let f = random_field(rng, k);
    let (s, _) = construct_stratification(k, &f);
    (f, s)
}

/// Injective values on the vertices of `k`.
pub fn random_vertex_field<R: Rng>(rng: &mut R, k: &Complex) -> VertexField {
    let labels: Vec<i64> = k.vertex_ids().map(|v| k.simplex(v).vertices[0]).collect();
    let mut ranks: Vec<usize> = (0..labels.len()).collect();
    ranks.shuffle(rng);
    VertexField::from_pairs(
        labels
            .into_iter()
            .zip(ranks)
            .map(|(l, r)| (l, r as f64 + rng.gen_range(0.0..0.5))),
    )
}

/// Triangulated torus on an `m × n` vertex grid: `mn` vertices, `3mn` edges
/// and `2mn` triangles, every vertex of degree 6.
pub fn torus_grid(m: usize, n: usize) -> Complex {
    assert!(m >= 3 && n >= 3, "torus grid needs at least 3 × 3 vertices");
    let id = |i: usize, j: usize| ((i % m) * n + (j % n)) as i64;
    let mut triangles = Vec::with_capacity(2 * m * n);
    for i in 0..m {
        for j in 0..n {
            triangles.push(vec![id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
            triangles.push(vec![id(i, j), id(i, j + 1), id(i + 1, j + 1)]);
        }
    }
    Complex::from_maximal_simplices(triangles).expect("grid triangles")
}
