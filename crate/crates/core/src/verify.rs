//! Property batteries over random cases, shared by the self-test command and
//! the acceptance suite.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;

use crate::complex::{Complex, ScalarField};
use crate::homology::betti;
use crate::maximal::find_coarser;
use crate::morse::{check_dmf, critical_cells, gradient_of, is_acyclic, morse_chain_complex};
use crate::pointdata::{extend_dmf, extend_global, extend_stratified, maxf_extension, VertexField};
use crate::random::{case_rng, random_complex, random_dmf, random_field, random_vertex_field, CaseRng};
use crate::separating::separating_function;
use crate::simplify::simplify;
use crate::strat::{
    check_dsmf, minimal_stratum_is_subcomplex, respects_strata, union_gradient,
    validate_stratification, violator_boundary_property, Stratification,
};
use crate::stratify::construct_stratification;

pub type Check = std::result::Result<(), String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        let holds: bool = $cond;
        if !holds {
            return Err(format!($($msg)+));
        }
    };
}

fn ok<T>(r: crate::Result<T>, what: &str) -> std::result::Result<T, String> {
    r.map_err(|e| format!("{what}: {e}"))
}

/// A discrete Morse function must come back with the trivial stratification.
pub fn dmf_gives_trivial(k: &Complex, f: &ScalarField) -> Check {
    ensure!(check_dmf(k, f, &k.all()).is_ok(), "input is not a discrete Morse function");
    let (s, _) = construct_stratification(k, f);
    ensure!(s == Stratification::trivial(k), "got {} strata instead of one", s.len());
    Ok(())
}

/// Everything the algorithm output should satisfy.
pub fn algorithm_output(k: &Complex, f: &ScalarField) -> Check {
    let (s, _) = construct_stratification(k, f);
    let check = validate_stratification(k, &s);
    ensure!(check.is_ok(), "invalid stratification: {:?}", check.violations);
    let dsmf = ok(check_dsmf(k, f, &s), "check_dsmf")?;
    ensure!(dsmf.is_ok(), "not a DSMF, offenders {:?}", dsmf.offenders);
    ensure!(ok(violator_boundary_property(k, f, &s), "violators")?, "violator boundary property fails");
    ensure!(ok(minimal_stratum_is_subcomplex(k, &s), "order")?, "a minimal stratum is not a subcomplex");
    let v = ok(union_gradient(k, f, &s), "union_gradient")?;
    ensure!(respects_strata(&v, &s), "union gradient crosses strata");
    ensure!(is_acyclic(k, &v).witness.is_none(), "union gradient has a closed path");
    let report = ok(simplify(k, f, &s), "simplify")?;
    ensure!(
        report.critical_euler() == report.euler_characteristic,
        "critical alternating sum {} but Euler characteristic {}",
        report.critical_euler(),
        report.euler_characteristic
    );
    ensure!(
        report.morse_betti == report.betti,
        "Morse complex Betti {:?} but Betti {:?}",
        report.morse_betti,
        report.betti
    );
    ensure!(
        report.collapses.len() == report.pairs.len(),
        "collapsed {} of {} pairs",
        report.collapses.len(),
        report.pairs.len()
    );
    Ok(())
}

/// Gradient round trip and sublevel thresholds of the separating function.
pub fn separating(k: &Complex, f: &ScalarField, s: &Stratification) -> Check {
    let v = ok(union_gradient(k, f, s), "union_gradient")?;
    let g = ok(separating_function(k, s, &v), "separating_function")?;
    ensure!(check_dmf(k, &g.values, &k.all()).is_ok(), "g is not a discrete Morse function");
    let back = ok(gradient_of(k, &g.values, &k.all()), "gradient_of")?;
    ensure!(back == v, "gradient of g differs from the union gradient");
    ensure!(
        g.thresholds.windows(2).all(|w| w[0] < w[1]),
        "thresholds not increasing: {:?}",
        g.thresholds
    );
    for (i, &a) in g.thresholds.iter().enumerate() {
        let expected: crate::SimplexSet = g.order[..=i]
            .iter()
            .flat_map(|&j| s.stratum(j).iter())
            .collect();
        let actual: crate::SimplexSet = (0..k.len()).filter(|&b| g.values.value(b) <= a).collect();
        ensure!(actual == expected, "preimage below threshold {i} is not the union of the first strata");
    }
    Ok(())
}

/// Extension of vertex data: unstratified and through the algorithm's
/// stratification of `maxf`.
pub fn point_data(k: &Complex, f0: &VertexField) -> Check {
    let maxf = ok(maxf_extension(k, f0), "maxf")?;
    let spread = {
        let vals: Vec<f64> = f0.iter().map(|(_, x)| x).collect();
        let hi = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lo = vals.iter().copied().fold(f64::INFINITY, f64::min);
        (hi - lo).max(1.0)
    };
    let eps = 1e-3 * spread;
    let ext = ok(extend_dmf(k, f0, eps), "extend_dmf")?;
    ensure!(is_acyclic(k, &ext.field).witness.is_none(), "extension field has a closed path");
    let morse = ok(morse_chain_complex(k, &ext.field, &k.all()), "morse complex")?;
    let b = ok(betti(k, &k.all()), "betti")?;
    ensure!(morse.betti() == b, "Morse Betti {:?} but Betti {:?}", morse.betti(), b);
    for a in 0..k.len() {
        let d = (ext.values.value(a) - maxf.value(a)).abs();
        ensure!(d < eps, "simplex {a} is {d} away from maxf (epsilon {eps})");
    }
    ensure!(check_dmf(k, &ext.values, &k.all()).is_ok(), "extension values are not a DMF");
    let back = ok(gradient_of(k, &ext.values, &k.all()), "gradient_of")?;
    ensure!(back == ext.field, "extension values do not induce the extension field");
    ensure!(
        critical_cells(&ext.field, &k.all()).iter().all(|c| k.dim_of(c) <= 2),
        "critical cell above dimension 2"
    );

    let (s, _) = construct_stratification(k, &maxf);
    let strat = ok(extend_stratified(k, &s, f0), "extend_stratified")?;
    let dsmf = ok(check_dsmf(k, &strat.values, &s), "check_dsmf")?;
    ensure!(dsmf.is_ok(), "stratified extension is not a DSMF: {:?}", dsmf.offenders);
    let g = ok(extend_global(k, &s, f0), "extend_global")?;
    ensure!(check_dmf(k, &g.values, &k.all()).is_ok(), "global extension is not a DMF");
    let back = ok(gradient_of(k, &g.values, &k.all()), "gradient_of")?;
    ensure!(back == strat.union, "global extension does not realise the union field");
    Ok(())
}

/// Whether the algorithm output is maximal; `Err` carries the coarser one.
pub fn maximality(k: &Complex, f: &ScalarField, bound: usize) -> Check {
    let (s, _) = construct_stratification(k, f);
    match ok(find_coarser(k, f, &s, bound), "find_coarser")? {
        None => Ok(()),
        Some(c) => Err(format!("{:?} is strictly coarser than {:?}", c.to_map(), s.to_map())),
    }
}

/// The random families used by the suites.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    DmfTrivial,
    Algorithm,
    Separating,
    PointData,
    Maximality,
}

impl Suite {
    pub const ALL: [Suite; 5] = [
        Suite::DmfTrivial,
        Suite::Algorithm,
        Suite::Separating,
        Suite::PointData,
        Suite::Maximality,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::DmfTrivial => "dmf-trivial",
            Suite::Algorithm => "algorithm",
            Suite::Separating => "separating",
            Suite::PointData => "point-data",
            Suite::Maximality => "maximality",
        }
    }

    /// Case count used by default.
    pub fn default_cases(self) -> usize {
        match self {
            Suite::DmfTrivial => 100,
            Suite::Algorithm => 500,
            Suite::Separating => 200,
            Suite::PointData => 200,
            Suite::Maximality => 50,
        }
    }

    /// Generates case `index` and runs its checks.
    pub fn run_case(self, seed: u64, index: u64) -> Check {
        let mut rng: CaseRng = case_rng(seed ^ self as u64, index);
        match self {
            Suite::DmfTrivial => {
                let k = random_complex(&mut rng, 20, 3);
                let f = random_dmf(&mut rng, &k);
                dmf_gives_trivial(&k, &f)
            }
            Suite::Algorithm => {
                let k = random_complex(&mut rng, 20, 3);
                let f = random_field(&mut rng, &k);
                algorithm_output(&k, &f)
            }
            Suite::Separating => {
                let k = random_complex(&mut rng, 20, 3);
                let f = random_field(&mut rng, &k);
                let (s, _) = construct_stratification(&k, &f);
                separating(&k, &f, &s)
            }
            Suite::PointData => {
                let k = random_complex(&mut rng, 20, 2);
                let f0 = random_vertex_field(&mut rng, &k);
                point_data(&k, &f0)
            }
            Suite::Maximality => {
                let k = random_complex(&mut rng, 12, 2);
                let f = random_field(&mut rng, &k);
                maximality(&k, &f, crate::maximal::DEFAULT_BOUND)
            }
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CaseFailure {
    pub index: u64,
    pub message: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteResult {
    pub suite: Suite,
    pub seed: u64,
    pub cases: usize,
    pub failures: Vec<CaseFailure>,
    #[serde(serialize_with = "seconds")]
    pub elapsed: Duration,
}

fn seconds<S: serde::Serializer>(d: &Duration, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_f64(d.as_secs_f64())
}

impl SuiteResult {
    pub fn passed(&self) -> usize {
        self.cases - self.failures.len()
    }

    pub fn is_ok(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Runs `cases` cases in parallel; a panic counts as a failure of its case.
pub fn run_suite(suite: Suite, seed: u64, cases: usize) -> SuiteResult {
    let start = Instant::now();
    let mut failures: Vec<CaseFailure> = (0..cases as u64)
        .into_par_iter()
        .filter_map(|index| {
            let outcome = catch_unwind(AssertUnwindSafe(|| suite.run_case(seed, index)))
                .unwrap_or_else(|p| Err(format!("panic: {}", panic_message(&p))));
            outcome.err().map(|message| CaseFailure { index, message })
        })
        .collect();
    failures.sort_by_key(|f| f.index);
    SuiteResult {
        suite,
        seed,
        cases,
        failures,
        elapsed: start.elapsed(),
    }
}

fn panic_message(p: &Box<dyn std::any::Any + Send>) -> String {
    p.downcast_ref::<&str>()
        .map(|s| s.to_string())
        .or_else(|| p.downcast_ref::<String>().cloned())
        .unwrap_or_else(|| "unknown".into())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_runs_of_the_passing_suites() {
        for suite in [Suite::DmfTrivial, Suite::Algorithm, Suite::Separating, Suite::PointData] {
            let r = run_suite(suite, 42, 40);
            assert!(r.is_ok(), "{}: {:?}", suite.name(), r.failures);
        }
    }

    #[test]
    fn panics_become_failures() {
        let r = catch_unwind(|| -> Check { panic!("boom") }).unwrap_or_else(|p| Err(panic_message(&p)));
        assert_eq!(r, Err("boom".into()));
    }
}
