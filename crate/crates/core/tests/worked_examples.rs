use std::collections::BTreeSet;

use dsmt::fixtures::{load, Fixture};
use dsmt::homology::{betti, boundary_matrix};
use dsmt::morse::{classify, lower_set, upper_set};
use dsmt::registry::Explicit;
use dsmt::simplify::simplify;
use dsmt::strat::{
    check_dsmf, classify_stratified, union_gradient, validate_stratification, Violation,
};
use dsmt::stratify::{construct_stratification, construct_stratification_with};
use dsmt::{build_complex, SimplexId, SimplexSet, Stratification};

fn vals(fx: &Fixture, ids: impl IntoIterator<Item = SimplexId>) -> BTreeSet<i64> {
    ids.into_iter().map(|a| fx.value_of(a) as i64).collect()
}

fn ids(fx: &Fixture, xs: &[i64]) -> SimplexSet {
    xs.iter().map(|&x| fx.by_value(x as f64)).collect()
}

fn pair_values(fx: &Fixture, pairs: &[[SimplexId; 2]]) -> BTreeSet<(i64, i64)> {
    pairs
        .iter()
        .map(|&[a, b]| (fx.value_of(a) as i64, fx.value_of(b) as i64))
        .collect()
}

#[test]
fn upside_down_pentagon() {
    let fx = load("pentagon-down").unwrap();
    let (k, f) = (&fx.complex, &fx.values);
    assert_eq!(vals(&fx, classify(k, f).violators()), [1, 2, 10].into());

    let (s, trace) = construct_stratification(k, f);
    assert_eq!(vals(&fx, trace.removals()), [10].into());
    assert_eq!(s.len(), 2);
    assert!(check_dsmf(k, f, &s).unwrap().is_ok());

    let v = union_gradient(k, f, &s).unwrap();
    assert_eq!(
        pair_values(&fx, &v.to_pairs()),
        [(3, 1), (4, 2), (7, 5), (8, 6)].into()
    );
    let report = simplify(k, f, &s).unwrap();
    assert_eq!(report.critical_values, vec![9.0, 10.0]);
    assert_eq!(report.critical_counts, vec![1, 1]);
    assert_eq!(report.collapses.len(), 4);
    assert_eq!(report.betti.as_slice(), &[1, 1]);
    assert_eq!(report.morse_betti, report.betti);
}

#[test]
fn upside_down_pentagon_sublevel_and_boundary() {
    let fx = load("pentagon-down").unwrap();
    let k = &fx.complex;
    let sub = k.sublevel_complex(&fx.values, 2.0);
    assert_eq!(vals(&fx, sub.iter()), [1, 2, 3, 4, 10].into());
    let d1 = boundary_matrix(k, &k.all(), 1).unwrap();
    assert_eq!((d1.rows(), d1.cols()), (5, 5));
    assert!((0..5).all(|j| d1.column(j).len() == 2));
    assert_eq!(d1.rank(), 4);
    assert_eq!(betti(k, &sub).unwrap().as_slice(), &[1]);
}

const EXPECTED_CELLS: [(i64, &[i64], &[i64], &str); 14] = [
    (1, &[], &[], "C"),
    (2, &[], &[3], "R"),
    (3, &[2], &[], "R"),
    (4, &[], &[10], "R"),
    (5, &[], &[7], "R"),
    (6, &[], &[8, 11], "II"),
    (7, &[5], &[10], "III"),
    (8, &[6], &[14], "III"),
    (9, &[], &[12], "R"),
    (10, &[4, 7], &[], "I"),
    (11, &[6], &[14], "III"),
    (12, &[9], &[14], "III"),
    (13, &[], &[], "C"),
    (14, &[8, 11, 12], &[], "I"),
];

#[test]
fn tetrahedron_sets_and_types_per_simplex() {
    let fx = load("tetrahedron").unwrap();
    let (k, f) = (&fx.complex, &fx.values);
    let all = k.all();
    let cls = classify(k, f);
    for (x, u, l, kind) in EXPECTED_CELLS {
        let a = fx.by_value(x as f64);
        assert_eq!(vals(&fx, upper_set(k, f, a, &all).iter()), u.iter().copied().collect(), "U({x})");
        assert_eq!(vals(&fx, lower_set(k, f, a, &all).iter()), l.iter().copied().collect(), "L({x})");
        assert_eq!(cls.get(a).unwrap().label(), kind, "type of {x}");
    }
}

#[test]
fn tetrahedron_algorithm_run() {
    let fx = load("tetrahedron").unwrap();
    let (k, f) = (&fx.complex, &fx.values);
    let (s, trace) = construct_stratification(k, f);
    let removed: Vec<i64> = trace.removals().iter().map(|&a| fx.value_of(a) as i64).collect();
    assert_eq!(removed, vec![10, 14, 6]);
    let expected: BTreeSet<SimplexSet> = [
        ids(&fx, &[10]),
        ids(&fx, &[14]),
        ids(&fx, &[6]),
        ids(&fx, &[1, 2, 3, 8, 11]),
        ids(&fx, &[4, 5, 7, 9, 12, 13]),
    ]
    .into();
    assert_eq!(s.blocks(), expected);
    let v = union_gradient(k, f, &s).unwrap();
    assert_eq!(pair_values(&fx, &v.to_pairs()), [(3, 2), (12, 9), (7, 5)].into());
    // resolved violators per step
    let resolved: Vec<BTreeSet<i64>> = trace.steps.iter().map(|st| vals(&fx, st.resolved.iter().copied())).collect();
    assert_eq!(resolved, vec![[7].into(), [8, 11, 12].into(), BTreeSet::new()]);
}

#[test]
fn tetrahedron_alternative_order() {
    let fx = load("tetrahedron").unwrap();
    let (k, f) = (&fx.complex, &fx.values);
    let order = Explicit::new(
        [14.0, 7.0, 6.0].iter().map(|&x| fx.by_value(x)).collect(),
    );
    let (s, trace) = construct_stratification_with(k, f, &order);
    let removed: Vec<i64> = trace.removals().iter().map(|&a| fx.value_of(a) as i64).collect();
    assert_eq!(removed, vec![14, 7, 6]);
    assert!(validate_stratification(k, &s).is_ok());
    assert!(check_dsmf(k, f, &s).unwrap().is_ok());
    // vertex 10 bounds the removed edge 7, so it cannot join the interior
    assert_eq!(s.get("interior"), Some(&ids(&fx, &[4, 5, 9, 12, 13])));
    assert_eq!(s.stratum(s.stratum_of(fx.by_value(10.0)).unwrap()), &ids(&fx, &[10]));
    let with_ten = Stratification::new(
        k,
        [
            ("a", ids(&fx, &[14])),
            ("b", ids(&fx, &[7])),
            ("c", ids(&fx, &[6])),
            ("d", ids(&fx, &[1, 2, 3, 8, 11])),
            ("e", ids(&fx, &[4, 5, 9, 10, 12, 13])),
        ],
    )
    .unwrap();
    let check = validate_stratification(k, &with_ten);
    assert!(check
        .violations
        .iter()
        .any(|v| matches!(v, Violation::NotLocallyClosed { .. })));
    assert!(validate_stratification(k, &s).is_ok());
    assert!(check_dsmf(k, f, &s).unwrap().is_ok());
}

/// Hollow tetrahedra on vertex values 1, 3, 10, 14 whose incidences reproduce
/// the expected cells and the stated strata all give the same gradient, and the
/// bundled fixture is one of them.
#[test]
fn tetrahedron_incidences_are_determined_up_to_irrelevant_swaps() {
    let verts = [1i64, 3, 10, 14];
    let edges = [2i64, 4, 7, 8, 11, 12];
    let tris = [5i64, 6, 9, 13];
    let vertex_pairs: Vec<[i64; 2]> = (0..4)
        .flat_map(|i| (i + 1..4).map(move |j| [verts[i], verts[j]]))
        .collect();
    let stated: BTreeSet<BTreeSet<i64>> = [
        vec![10],
        vec![14],
        vec![6],
        vec![1, 2, 3, 8, 11],
        vec![4, 5, 7, 9, 12, 13],
    ]
    .into_iter()
    .map(|b| b.into_iter().collect())
    .collect();
    let bundled = load("tetrahedron").unwrap();
    let fixture_shape: BTreeSet<Vec<i64>> =
        bundled.complex.simplices().iter().map(|x| x.vertices.clone()).collect();
    let mut outcomes = BTreeSet::new();
    let (mut cell_solutions, mut solutions, mut found_fixture) = (0, 0, false);
    for ep in permutations(6) {
        for tp in permutations(4) {
            let mut desc: Vec<(Vec<i64>, f64)> = verts.iter().map(|&v| (vec![v], v as f64)).collect();
            for (i, &e) in edges.iter().enumerate() {
                desc.push((vertex_pairs[ep[i]].to_vec(), e as f64));
            }
            for (i, &t) in tris.iter().enumerate() {
                let omit = verts[tp[i]];
                desc.push((verts.iter().copied().filter(|&v| v != omit).collect(), t as f64));
            }
            let (k, f) = build_complex(desc).unwrap();
            let fx = Fixture {
                name: "candidate",
                complex: k,
                values: f,
                reconstructed: true,
                source: "",
            };
            let (k, f) = (&fx.complex, &fx.values);
            let all = k.all();
            let cls = classify(k, f);
            let matches = EXPECTED_CELLS.iter().all(|&(x, u, l, kind)| {
                let a = fx.by_value(x as f64);
                vals(&fx, upper_set(k, f, a, &all).iter()) == u.iter().copied().collect()
                    && vals(&fx, lower_set(k, f, a, &all).iter()) == l.iter().copied().collect()
                    && cls.get(a).unwrap().label() == kind
            });
            if !matches {
                continue;
            }
            cell_solutions += 1;
            let (s, trace) = construct_stratification(k, f);
            let strata: BTreeSet<BTreeSet<i64>> = s.blocks().iter().map(|b| vals(&fx, b.iter())).collect();
            if strata != stated {
                continue;
            }
            solutions += 1;
            let pairs = pair_values(&fx, &union_gradient(k, f, &s).unwrap().to_pairs());
            outcomes.insert((vals(&fx, trace.removals()), pairs));
            let shape: BTreeSet<Vec<i64>> = k.simplices().iter().map(|x| x.vertices.clone()).collect();
            found_fixture |= shape == fixture_shape;
        }
    }
    // the cells alone leave three different strata outcomes open
    assert_eq!(cell_solutions, 6);
    assert!(solutions >= 1 && found_fixture);
    assert_eq!(outcomes.len(), 1, "{outcomes:?}");
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

#[test]
fn pentagon_has_six_critical_values_and_six_pieces() {
    let fx = load("pentagon").unwrap();
    let (k, f) = (&fx.complex, &fx.values);
    let (s, trace) = construct_stratification(k, f);
    assert_eq!(vals(&fx, trace.removals()), [0, 9].into());
    assert_eq!(s.piece_count(k), 6);
    let report = simplify(k, f, &s).unwrap();
    assert_eq!(report.critical_values, vec![0.0, 1.0, 3.0, 7.0, 8.0, 9.0]);
    let crit = classify_stratified(k, f, &s).unwrap();
    assert!(crit.critical().contains(&fx.by_value(1.0)));
    assert!(crit.critical().contains(&fx.by_value(3.0)));
}

#[test]
fn split_octagon_removes_two_of_five_violators() {
    let fx = load("split-octagon").unwrap();
    let (k, f) = (&fx.complex, &fx.values);
    assert_eq!(vals(&fx, classify(k, f).violators()), [0, 10, 24, 30, 31].into());
    let (s, trace) = construct_stratification(k, f);
    let removed: Vec<i64> = trace.removals().iter().map(|&a| fx.value_of(a) as i64).collect();
    assert_eq!(removed, vec![30, 31]);
    assert!(check_dsmf(k, f, &s).unwrap().is_ok());
    let report = simplify(k, f, &s).unwrap();
    assert_eq!(report.collapses.len(), report.pairs.len());
    assert_eq!(report.morse_betti, report.betti);
}

#[test]
fn split_square_is_entirely_critical() {
    let fx = load("split-square").unwrap();
    let (k, f) = (&fx.complex, &fx.values);
    let cls = classify(k, f);
    assert_eq!(vals(&fx, cls.violators()), [9, 10, 11].into());
    for x in [9.0, 10.0, 11.0] {
        assert_eq!(cls.get(fx.by_value(x)).unwrap().label(), "I");
    }
    let (s, trace) = construct_stratification(k, f);
    let removed: Vec<i64> = trace.removals().iter().map(|&a| fx.value_of(a) as i64).collect();
    assert_eq!(removed, vec![9, 10, 11]);
    let four = fx.by_value(4.0);
    assert_eq!(vals(&fx, lower_set(k, f, four, &k.all()).iter()), [11].into());
    let report = simplify(k, f, &s).unwrap();
    assert_eq!(report.critical.len(), k.len());
    assert!(report.pairs.is_empty() && report.collapses.is_empty());
}

#[test]
fn circle_removes_a_vertex_and_an_edge() {
    let fx = load("circle").unwrap();
    let (k, f) = (&fx.complex, &fx.values);
    assert_eq!(vals(&fx, classify(k, f).violators()), [0, 5].into());
    let (s, trace) = construct_stratification(k, f);
    assert_eq!(vals(&fx, trace.removals()), [0, 5].into());
    assert_eq!(s.len(), 4);
    assert!(validate_stratification(k, &s).is_ok());
}
