//! Acceptance checks, one PASS/FAIL line per criterion.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use dsmt::fixtures::{self, Fixture};
use dsmt::maximal::{find_coarser, DEFAULT_BOUND};
use dsmt::morse::{classify, lower_set, upper_set};
use dsmt::random::{case_rng, random_complex, random_field, torus_grid};
use dsmt::simplify::simplify;
use dsmt::strat::union_gradient;
use dsmt::stratify::construct_stratification;
use dsmt::verify::{run_suite, Suite, SuiteResult};
use dsmt::{ScalarField, SimplexId};

const DEFAULT_SEED: u64 = 20_200_910;
const PD_TIME_LIMIT: Duration = Duration::from_secs(1);
const ALGORITHM_SUITE_LIMIT: Duration = Duration::from_secs(60);
const TORUS_TIME_LIMIT: Duration = Duration::from_secs(5);
const TORUS_SIDES: [usize; 4] = [46, 65, 92, 129];
const TORUS_RUNS: usize = 3;
const SLOPE_RANGE: (f64, f64) = (0.8, 1.3);
const RANDOM_MAXIMALITY_CASES: usize = 50;
const RANDOM_MAXIMALITY_SIZE: usize = 12;
/// Criteria known to fail; they are still run and reported.
const KNOWN_FAILURES: &[&str] = &["AC7"];

type Outcome = Result<String, String>;
type Criterion = (&'static str, Box<dyn Fn() -> Outcome>);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn values(fx: &Fixture, ids: impl IntoIterator<Item = SimplexId>) -> BTreeSet<i64> {
    ids.into_iter().map(|a| fx.value_of(a) as i64).collect()
}

fn ordered_values(fx: &Fixture, ids: &[SimplexId]) -> Vec<i64> {
    ids.iter().map(|&a| fx.value_of(a) as i64).collect()
}

fn pair_values(fx: &Fixture, pairs: &[[SimplexId; 2]]) -> BTreeSet<(i64, i64)> {
    pairs
        .iter()
        .map(|&[a, b]| (fx.value_of(a) as i64, fx.value_of(b) as i64))
        .collect()
}

fn set(xs: &[i64]) -> BTreeSet<i64> {
    xs.iter().copied().collect()
}

fn ac1() -> Outcome {
    let start = Instant::now();
    let fx = fixtures::load("pentagon-down").map_err(|e| e.to_string())?;
    let (k, f) = (&fx.complex, &fx.values);
    let violators = values(&fx, classify(k, f).violators());
    ensure(violators == set(&[10, 1, 2]), || format!("violators {violators:?}"))?;
    let (s, trace) = construct_stratification(k, f);
    let removed = ordered_values(&fx, &trace.removals());
    ensure(removed == vec![10], || format!("removals {removed:?}"))?;
    let v = union_gradient(k, f, &s).map_err(|e| e.to_string())?;
    let pairs = pair_values(&fx, &v.to_pairs());
    ensure(pairs == [(3, 1), (4, 2), (7, 5), (8, 6)].into(), || format!("pairs {pairs:?}"))?;
    let r = simplify(k, f, &s).map_err(|e| e.to_string())?;
    ensure(r.critical_values == vec![9.0, 10.0], || format!("critical values {:?}", r.critical_values))?;
    ensure(r.critical_counts == vec![1, 1], || format!("critical counts {:?}", r.critical_counts))?;
    ensure(r.collapses.len() == 4, || format!("{} collapses", r.collapses.len()))?;
    ensure(r.betti.as_slice() == [1, 1], || format!("betti {:?}", r.betti))?;
    let elapsed = start.elapsed();
    ensure(elapsed < PD_TIME_LIMIT, || format!("took {elapsed:?}"))?;
    Ok(format!("exact match in {elapsed:?}"))
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

fn ac2() -> Outcome {
    let fx = fixtures::load("tetrahedron").map_err(|e| e.to_string())?;
    let (k, f) = (&fx.complex, &fx.values);
    let all = k.all();
    let cls = classify(k, f);
    for (x, u, l, kind) in EXPECTED_CELLS {
        let a = fx.by_value(x as f64);
        let got_u = values(&fx, upper_set(k, f, a, &all).iter());
        let got_l = values(&fx, lower_set(k, f, a, &all).iter());
        let got_kind = cls.get(a).map(|s| s.label()).unwrap_or_default();
        ensure(got_u == set(u) && got_l == set(l) && got_kind == kind, || {
            format!("simplex {x}: U={got_u:?} L={got_l:?} type={got_kind}")
        })?;
    }
    let (s, trace) = construct_stratification(k, f);
    let removed = ordered_values(&fx, &trace.removals());
    ensure(removed == vec![10, 14, 6], || format!("removals {removed:?}"))?;
    let strata: BTreeSet<BTreeSet<i64>> = s.blocks().iter().map(|b| values(&fx, b.iter())).collect();
    let expected: BTreeSet<BTreeSet<i64>> = [
        set(&[10]),
        set(&[14]),
        set(&[6]),
        set(&[1, 2, 3, 8, 11]),
        set(&[4, 5, 7, 9, 12, 13]),
    ]
    .into();
    ensure(strata == expected, || format!("strata {strata:?}"))?;
    let v = union_gradient(k, f, &s).map_err(|e| e.to_string())?;
    let pairs = pair_values(&fx, &v.to_pairs());
    ensure(pairs == [(3, 2), (12, 9), (7, 5)].into(), || format!("pairs {pairs:?}"))?;
    Ok("U and L sets, types, trace, strata and pairs match".into())
}

fn ac3() -> Outcome {
    let fx = fixtures::load("pentagon").map_err(|e| e.to_string())?;
    let (k, f) = (&fx.complex, &fx.values);
    let (s, _) = construct_stratification(k, f);
    let r = simplify(k, f, &s).map_err(|e| e.to_string())?;
    let crit: Vec<i64> = r.critical_values.iter().map(|&x| x as i64).collect();
    ensure(crit == vec![0, 1, 3, 7, 8, 9], || format!("critical values {crit:?}"))?;
    let pieces = s.piece_count(k);
    ensure(pieces == 6, || format!("{pieces} strata pieces"))?;
    Ok("critical values {0,1,3,7,8,9}, six pieces".into())
}

fn ac4() -> Outcome {
    let fx = fixtures::load("split-square").map_err(|e| e.to_string())?;
    let (k, f) = (&fx.complex, &fx.values);
    let (s, _) = construct_stratification(k, f);
    let r = simplify(k, f, &s).map_err(|e| e.to_string())?;
    ensure(r.critical.len() == k.len(), || format!("{} of {} critical", r.critical.len(), k.len()))?;
    ensure(r.collapses.is_empty(), || format!("{} collapses", r.collapses.len()))?;
    Ok(format!("all {} simplices critical, no collapses", k.len()))
}

fn suite_outcome(r: &SuiteResult, limit: Option<Duration>) -> Outcome {
    if let Some(first) = r.failures.first() {
        return Err(format!(
            "{}/{} failed (seed {}); first: case {}: {}",
            r.failures.len(),
            r.cases,
            r.seed,
            first.index,
            first.message
        ));
    }
    if let Some(limit) = limit {
        ensure(r.elapsed < limit, || format!("took {:?}", r.elapsed))?;
    }
    Ok(format!("{}/{} cases in {:?} (seed {})", r.passed(), r.cases, r.elapsed, r.seed))
}

fn ac7(seed: u64) -> Outcome {
    let mut failures = Vec::new();
    let mut checked = 0;
    for fx in fixtures::all() {
        if fx.complex.len() > DEFAULT_BOUND {
            continue;
        }
        checked += 1;
        let (s, _) = construct_stratification(&fx.complex, &fx.values);
        match find_coarser(&fx.complex, &fx.values, &s, DEFAULT_BOUND) {
            Ok(None) => {}
            Ok(Some(c)) => failures.push(format!("{} (coarser: {:?})", fx.name, c.to_map())),
            Err(e) => failures.push(format!("{}: {e}", fx.name)),
        }
    }
    let mut random_failures = 0;
    for i in 0..RANDOM_MAXIMALITY_CASES as u64 {
        let mut rng = case_rng(seed ^ 0x4d41_5849, i);
        let k = random_complex(&mut rng, RANDOM_MAXIMALITY_SIZE, 2);
        let f: ScalarField = random_field(&mut rng, &k);
        let (s, _) = construct_stratification(&k, &f);
        if !matches!(find_coarser(&k, &f, &s, DEFAULT_BOUND), Ok(None)) {
            random_failures += 1;
        }
    }
    let summary = format!(
        "{} of {checked} fixtures and {random_failures} of {RANDOM_MAXIMALITY_CASES} random cases admit a strictly coarser stratification",
        failures.len()
    );
    if failures.is_empty() && random_failures == 0 {
        Ok(summary)
    } else {
        Err(format!("{summary}; fixtures: {}", failures.join("; ")))
    }
}

fn time_stratify(side: usize, seed: u64) -> (usize, Duration) {
    let k = torus_grid(side, side);
    let mut rng = case_rng(seed, side as u64);
    let f = random_field(&mut rng, &k);
    let best = (0..TORUS_RUNS)
        .map(|_| {
            let start = Instant::now();
            let out = construct_stratification(&k, &f);
            let t = start.elapsed();
            std::hint::black_box(out);
            t
        })
        .min()
        .expect("at least one run");
    (k.len(), best)
}

fn ac10(seed: u64) -> Outcome {
    let samples: Vec<(usize, Duration)> = TORUS_SIDES.iter().map(|&s| time_stratify(s, seed)).collect();
    let (n, t) = *samples.last().expect("sizes");
    ensure(n >= 99_000, || format!("largest grid has only {n} simplices"))?;
    let xs: Vec<f64> = samples.iter().map(|(n, _)| (*n as f64).ln()).collect();
    let ys: Vec<f64> = samples.iter().map(|(_, t)| t.as_secs_f64().max(1e-9).ln()).collect();
    let mx = xs.iter().sum::<f64>() / xs.len() as f64;
    let my = ys.iter().sum::<f64>() / ys.len() as f64;
    let slope = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>()
        / xs.iter().map(|x| (x - mx).powi(2)).sum::<f64>();
    let detail = format!(
        "{n} simplices in {t:?}; log-log slope {slope:.2} over {:?}",
        samples.iter().map(|(n, _)| *n).collect::<Vec<_>>()
    );
    ensure(t < TORUS_TIME_LIMIT, || format!("too slow: {detail}"))?;
    ensure(slope >= SLOPE_RANGE.0 && slope <= SLOPE_RANGE.1, || format!("slope out of range: {detail}"))?;
    Ok(detail)
}

fn main() -> ExitCode {
    let seed = std::env::var("DSMT_SEED")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(DEFAULT_SEED);
    let checks: Vec<Criterion> = vec![
        ("AC1", Box::new(ac1)),
        ("AC2", Box::new(ac2)),
        ("AC3", Box::new(ac3)),
        ("AC4", Box::new(ac4)),
        ("AC5", Box::new(move || suite_outcome(&run_suite(Suite::DmfTrivial, seed, 100), None))),
        (
            "AC6",
            Box::new(move || suite_outcome(&run_suite(Suite::Algorithm, seed, 500), Some(ALGORITHM_SUITE_LIMIT))),
        ),
        ("AC7", Box::new(move || ac7(seed))),
        ("AC8", Box::new(move || suite_outcome(&run_suite(Suite::Separating, seed, 200), None))),
        ("AC9", Box::new(move || suite_outcome(&run_suite(Suite::PointData, seed, 200), None))),
        ("AC10", Box::new(move || ac10(seed))),
    ];
    let mut unexpected = 0;
    for (name, check) in checks {
        let outcome = check();
        let known = KNOWN_FAILURES.contains(&name);
        match &outcome {
            Ok(detail) => println!("{name} PASS {detail}"),
            Err(detail) => println!("{name} FAIL {detail}{}", if known { " [known failure]" } else { "" }),
        }
        if outcome.is_err() != known {
            if outcome.is_ok() {
                println!("{name} was expected to fail and passed");
            }
            unexpected += 1;
        }
    }
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
