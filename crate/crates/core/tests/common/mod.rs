#![allow(dead_code)]

use dsmt::random::{case_rng, random_dmf};
use dsmt::{Complex, ScalarField, SimplexSet};
use proptest::prelude::*;

/// Complexes with at most `max` simplices: random maximal simplices on six
/// vertices, skipping any that would push the size over the limit.
pub fn complex(max: usize) -> impl Strategy<Value = Complex> {
    prop::collection::vec(prop::collection::btree_set(0i64..6, 1..=4), 1..7).prop_map(move |sets| {
        let mut kept: Vec<Vec<i64>> = Vec::new();
        let mut k = None;
        for s in sets {
            kept.push(s.into_iter().collect());
            let next = Complex::from_maximal_simplices(&kept).unwrap();
            if next.len() > max {
                kept.pop();
            } else {
                k = Some(next);
            }
        }
        k.unwrap_or_else(|| Complex::from_maximal_simplices([[0i64]]).unwrap())
    })
}

/// A complex and integer values with plenty of ties.
pub fn with_field(max: usize) -> impl Strategy<Value = (Complex, ScalarField)> {
    complex(max).prop_flat_map(|k| {
        let n = k.len();
        prop::collection::vec(0..(n as i32).max(2), n)
            .prop_map(move |v| (k.clone(), ScalarField::new(v.into_iter().map(f64::from).collect())))
    })
}

/// A complex and a discrete Morse function on it.
pub fn with_dmf(max: usize) -> impl Strategy<Value = (Complex, ScalarField)> {
    (complex(max), any::<u64>()).prop_map(|(k, seed)| {
        let f = random_dmf(&mut case_rng(seed, 0), &k);
        (k, f)
    })
}

/// A complex and an arbitrary subset of its simplices.
pub fn with_subset(max: usize) -> impl Strategy<Value = (Complex, SimplexSet)> {
    complex(max).prop_flat_map(|k| {
        let n = k.len();
        prop::collection::vec(any::<bool>(), n).prop_map(move |m| (k.clone(), SimplexSet::from_mask(&m)))
    })
}
