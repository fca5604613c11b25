use std::fmt::Write as _;
use std::fs;
use std::io::Read as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use dsmt::complex::{Complex, ScalarField, SimplexId};
use dsmt::io::{self, Loaded};
use dsmt::maximal::{find_coarser, DEFAULT_BOUND};
use dsmt::morse::{check_dmf, classify, lower_set, upper_set, Status};
use dsmt::pointdata::{extend_dmf, extend_global, extend_stratified};
use dsmt::registry::{Explicit, Registry, RemovalOrder};
use dsmt::simplify::simplify;
use dsmt::strat::{
    check_dsmf, classify_stratified, strata_order, union_gradient, validate_stratification,
    StratifiedStatus, Stratification,
};
use dsmt::stratify::{construct_stratification_with, AlgorithmTrace};
use dsmt::verify::{run_suite, Suite};
use dsmt::{homology, Error};

#[derive(Parser, Debug)]
#[command(name = "dsmt", version, about = "Discrete stratified Morse theory on simplicial complexes")]
struct Cli {
    /// Print JSON instead of the human-readable summary.
    #[arg(long, global = true)]
    json: bool,
    /// Also write the JSON output to this file.
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Input {
    /// Complex file, `-` for stdin, or `fixture:<name>` for a bundled example.
    file: String,
    /// Stratification file; overrides strata stored in the complex file.
    #[arg(long)]
    strata: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct OrderFlags {
    /// Order in which violators are removed.
    #[arg(long, default_value = "dim-value")]
    order: String,
    /// Comma-separated simplex ids removed first; implies `--order explicit`.
    #[arg(long, value_delimiter = ',')]
    priority: Vec<SimplexId>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check the discrete Morse conditions, per stratum when strata are given.
    Validate(Input),
    /// List violators with their U and L sets.
    Violators(Input),
    /// Build a stratification on which the function is a DSMF.
    Stratify {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        order: OrderFlags,
    },
    /// Union of the per-stratum gradients.
    Gradient {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        order: OrderFlags,
    },
    /// Critical cells, collapse sequence and homology.
    Simplify {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        order: OrderFlags,
    },
    /// Extend vertex values to a (stratified) discrete Morse function.
    Extend {
        #[command(flatten)]
        input: Input,
        /// Vertex field file `{"vertices": {...}}`.
        #[arg(long)]
        vertices: PathBuf,
        /// Pre-extension kernel used to stratify when no strata are given.
        #[arg(long)]
        kernel: Option<String>,
        /// Distance allowed from maxf in the unstratified extension.
        #[arg(long, default_value_t = 1e-3)]
        epsilon: f64,
        /// Output a discrete Morse function on all of K.
        #[arg(long)]
        global: bool,
    },
    /// Everything at once, optionally with the maximality check.
    Report {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        order: OrderFlags,
        /// Run the exhaustive maximality search.
        #[arg(long)]
        maximality: bool,
        /// Size limit for the maximality search.
        #[arg(long, default_value_t = DEFAULT_BOUND)]
        bound: usize,
    },
    /// Hasse diagram in Graphviz format.
    ExportDot {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        order: OrderFlags,
    },
    /// Randomised property suites.
    Selftest {
        /// Suites to run; default is every suite except maximality.
        #[arg(long = "suite")]
        suites: Vec<String>,
        /// Cases per suite; default depends on the suite.
        #[arg(long)]
        cases: Option<usize>,
        /// Seed; falls back to DSMT_SEED, then 0.
        #[arg(long)]
        seed: Option<u64>,
    },
}

/// A failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse(_)
            | Error::MissingValue(_)
            | Error::EmptySimplex
            | Error::RepeatedVertex(_)
            | Error::DuplicateSimplex(_)
            | Error::MissingFace { .. } => 2,
            Error::ComplexTooLarge { .. } => 3,
            _ => 1,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn read_text(path: &str) -> Result<String, Failure> {
    let result = if path == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map(|_| s)
    } else {
        fs::read_to_string(path)
    };
    result.map_err(|e| Failure {
        code: 2,
        message: format!("cannot read {path}: {e}"),
    })
}

fn load(input: &Input) -> Result<Loaded, Failure> {
    let text = match input.file.strip_prefix("fixture:") {
        Some(name) => dsmt::fixtures::load(name)?.source.to_string(),
        None => read_text(&input.file)?,
    };
    let mut loaded = io::parse_complex(&text)?;
    if let Some(path) = &input.strata {
        let text = read_text(&path.to_string_lossy())?;
        loaded.strata = Some(parse_strata(&text, &loaded.complex)?);
    }
    Ok(loaded)
}

/// Accepts a plain stratification file or the output of `stratify`.
fn parse_strata(text: &str, k: &Complex) -> Result<Stratification, Failure> {
    let value: Value = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let inner = value.get("stratification").cloned().unwrap_or(value);
    Ok(io::parse_stratification(&inner.to_string(), k)?)
}

/// The given strata, or the ones the algorithm builds.
fn strata_for(
    loaded: &Loaded,
    f: &ScalarField,
    flags: &OrderFlags,
) -> Result<(Stratification, Option<AlgorithmTrace>), Failure> {
    match &loaded.strata {
        Some(s) => Ok((s.clone(), None)),
        None => {
            let registry = Registry::default();
            let explicit = Explicit::new(flags.priority.clone());
            let order: &dyn RemovalOrder = if flags.priority.is_empty() {
                registry.removal_order(&flags.order)?
            } else {
                &explicit
            };
            let (s, trace) = construct_stratification_with(&loaded.complex, f, order);
            Ok((s, Some(trace)))
        }
    }
}

fn label(k: &Complex, f: Option<&ScalarField>, a: SimplexId) -> String {
    match f {
        Some(f) => format!("#{a} {} f={}", k.simplex(a), f.value(a)),
        None => format!("#{a} {}", k.simplex(a)),
    }
}

fn dim_name(p: usize, n: usize) -> String {
    let base = match p {
        0 => "vertex",
        1 => "edge",
        2 => "triangle",
        3 => "tetrahedron",
        _ => return format!("{n} {p}-simplices"),
    };
    if n == 1 {
        format!("1 {base}")
    } else if base == "vertex" {
        format!("{n} vertices")
    } else {
        format!("{n} {base}s")
    }
}

fn strata_text(k: &Complex, f: Option<&ScalarField>, s: &Stratification) -> String {
    let mut out = String::new();
    for (name, set) in s.iter() {
        let members: Vec<String> = set.iter().map(|a| label(k, f, a)).collect();
        let _ = writeln!(out, "  {name}: {}", members.join(", "));
    }
    out
}

/// Output of a command: the JSON form, the human form and the exit code.
struct Output {
    json: Value,
    text: String,
    code: u8,
}

impl Output {
    fn ok(json: Value, text: String) -> Self {
        Output { json, text, code: 0 }
    }
}

fn cmd_validate(input: &Input) -> Result<Output, Failure> {
    let loaded = load(input)?;
    let k = &loaded.complex;
    let f = loaded.field()?;
    match &loaded.strata {
        None => {
            let check = check_dmf(k, &f, &k.all());
            let valid = check.is_ok();
            let mut text = if valid {
                "valid discrete Morse function\n".to_string()
            } else {
                format!("not a discrete Morse function; {} offenders:\n", check.offenders.len())
            };
            for &a in &check.offenders {
                let _ = writeln!(text, "  {}", label(k, Some(&f), a));
            }
            Ok(Output {
                json: json!({"kind": "dmf", "valid": valid, "offenders": check.offenders}),
                text,
                code: if valid { 0 } else { 1 },
            })
        }
        Some(s) => {
            let structure = validate_stratification(k, s);
            let mut text = String::new();
            let mut offenders = Vec::new();
            if !structure.is_ok() {
                let _ = writeln!(text, "invalid stratification:");
                for v in &structure.violations {
                    let _ = writeln!(text, "  {v:?}");
                }
            } else {
                offenders = check_dsmf(k, &f, s)?.offenders;
                if offenders.is_empty() {
                    text.push_str("valid discrete stratified Morse function\n");
                } else {
                    let _ = writeln!(
                        text,
                        "not a discrete stratified Morse function; {} offenders:",
                        offenders.len()
                    );
                    for &a in &offenders {
                        let _ = writeln!(text, "  {}", label(k, Some(&f), a));
                    }
                }
            }
            let valid = structure.is_ok() && offenders.is_empty();
            Ok(Output {
                json: json!({
                    "kind": "dsmf",
                    "valid": valid,
                    "violations": structure.violations,
                    "offenders": offenders,
                }),
                text,
                code: if valid { 0 } else { 1 },
            })
        }
    }
}

fn cmd_violators(input: &Input) -> Result<Output, Failure> {
    let loaded = load(input)?;
    let k = &loaded.complex;
    let f = loaded.field()?;
    let all = k.all();
    let classes = classify(k, &f);
    let mut rows = Vec::new();
    let mut text = String::new();
    for a in classes.violators() {
        let Some(Status::Violator { kind }) = classes.get(a) else { continue };
        let u = upper_set(k, &f, a, &all).to_vec();
        let l = lower_set(k, &f, a, &all).to_vec();
        let _ = writeln!(text, "{:<28} type {kind:<6} U={u:?} L={l:?}", label(k, Some(&f), a));
        rows.push(json!({"id": a, "kind": kind.to_string(), "upper": u, "lower": l}));
    }
    if rows.is_empty() {
        text.push_str("no violators\n");
    }
    Ok(Output::ok(json!({ "violators": rows }), text))
}

fn cmd_stratify(input: &Input, flags: &OrderFlags) -> Result<Output, Failure> {
    let mut loaded = load(input)?;
    loaded.strata = None;
    let k = &loaded.complex;
    let f = loaded.field()?;
    let (s, trace) = strata_for(&loaded, &f, flags)?;
    let trace = trace.expect("built by the algorithm");
    let mut text = format!(
        "{} strata ({} pieces), removed {:?} using order {}\n",
        s.len(),
        s.piece_count(k),
        trace.removals(),
        trace.order
    );
    text.push_str(&strata_text(k, Some(&f), &s));
    Ok(Output::ok(json!({"stratification": s.to_map(), "trace": trace}), text))
}

fn cmd_gradient(input: &Input, flags: &OrderFlags) -> Result<Output, Failure> {
    let loaded = load(input)?;
    let k = &loaded.complex;
    let f = loaded.field()?;
    let (s, _) = strata_for(&loaded, &f, flags)?;
    let v = union_gradient(k, &f, &s)?;
    let mut text = format!("{} pairs\n", v.len());
    for (a, b) in v.pairs() {
        let _ = writeln!(text, "  {} -> {}", label(k, Some(&f), a), label(k, Some(&f), b));
    }
    Ok(Output::ok(serde_json::to_value(v.to_pairs()).expect("pairs"), text))
}

fn simplify_text(r: &dsmt::simplify::SimplifyReport) -> String {
    let counts: Vec<String> = r
        .critical_counts
        .iter()
        .enumerate()
        .filter(|(_, &n)| n > 0)
        .map(|(p, &n)| dim_name(p, n))
        .collect();
    format!(
        "critical cells: {}\ncritical values: {:?}\ngradient pairs: {}, collapsed: {}\nBetti numbers: {:?} (Morse complex {:?})\nEuler characteristic: {}\n",
        if counts.is_empty() { "none".to_string() } else { counts.join(", ") },
        r.critical_values,
        r.pairs.len(),
        r.collapses.len(),
        r.betti.as_slice(),
        r.morse_betti.as_slice(),
        r.euler_characteristic
    )
}

fn cmd_simplify(input: &Input, flags: &OrderFlags) -> Result<Output, Failure> {
    let loaded = load(input)?;
    let k = &loaded.complex;
    let f = loaded.field()?;
    let (s, _) = strata_for(&loaded, &f, flags)?;
    let r = simplify(k, &f, &s)?;
    let text = simplify_text(&r);
    Ok(Output::ok(serde_json::to_value(&r).expect("report"), text))
}

fn cmd_extend(
    input: &Input,
    vertices: &Path,
    kernel: Option<&str>,
    epsilon: f64,
    global: bool,
) -> Result<Output, Failure> {
    let loaded = load(input)?;
    let k = &loaded.complex;
    let f0 = io::parse_vertex_field(&read_text(&vertices.to_string_lossy())?)?;
    let strata = match (&loaded.strata, kernel) {
        (Some(s), _) => Some(s.clone()),
        (None, Some(name)) => {
            let registry = Registry::default();
            let pre = registry.pre_extension(name)?.extend(k, &f0)?;
            let (s, _) = construct_stratification_with(k, &pre, &dsmt::registry::DimValue);
            Some(s)
        }
        (None, None) => None,
    };
    let (values, pairs, note) = match (&strata, global) {
        (None, false) => {
            let ext = extend_dmf(k, &f0, epsilon)?;
            (ext.values, ext.field.to_pairs(), format!("discrete Morse function within {epsilon} of maxf"))
        }
        (None, true) => {
            let s = Stratification::trivial(k);
            let g = extend_global(k, &s, &f0)?;
            let pairs = dsmt::morse::gradient_of(k, &g.values, &k.all())?.to_pairs();
            (g.values, pairs, "discrete Morse function on K".to_string())
        }
        (Some(s), false) => {
            let ext = extend_stratified(k, s, &f0)?;
            (ext.values, ext.union.to_pairs(), "discrete stratified Morse function".to_string())
        }
        (Some(s), true) => {
            let g = extend_global(k, s, &f0)?;
            let pairs = dsmt::morse::gradient_of(k, &g.values, &k.all())?.to_pairs();
            (g.values, pairs, "discrete Morse function on K respecting the strata".to_string())
        }
    };
    let meta = json!({ "gradient": pairs });
    let file = io::complex_file(k, Some(&values), strata.as_ref(), Some(meta));
    let mut text = format!("{note}; {} gradient pairs\n", pairs.len());
    for a in 0..k.len() {
        let _ = writeln!(text, "  {}", label(k, Some(&values), a));
    }
    Ok(Output::ok(serde_json::to_value(file).expect("file"), text))
}

fn cmd_report(input: &Input, flags: &OrderFlags, maximality: bool, bound: usize) -> Result<Output, Failure> {
    let loaded = load(input)?;
    let k = &loaded.complex;
    let f = loaded.field()?;
    let all = k.all();
    let betti = homology::betti(k, &all)?;
    let violators = classify(k, &f).violators();
    let (s, trace) = strata_for(&loaded, &f, flags)?;
    let structure = validate_stratification(k, &s);
    let mut text = format!(
        "{} simplices, dimension {}, Euler characteristic {}\nBetti numbers: {:?}\nviolators: {:?}\n{} strata ({} pieces):\n",
        k.len(),
        k.dim().map_or("-".to_string(), |d| d.to_string()),
        k.euler_characteristic(&all),
        betti.as_slice(),
        violators,
        s.len(),
        s.piece_count(k)
    );
    text.push_str(&strata_text(k, Some(&f), &s));
    let mut json = json!({
        "size": k.len(),
        "dimension": k.dim(),
        "euler_characteristic": k.euler_characteristic(&all),
        "betti": betti,
        "violators": violators,
        "stratification": s.to_map(),
        "trace": trace,
        "valid_stratification": structure.is_ok(),
    });
    if !structure.is_ok() {
        text.push_str("stratification is not valid\n");
        json["violations"] = serde_json::to_value(&structure.violations).expect("violations");
        return Ok(Output { json, text, code: 1 });
    }
    let order = strata_order(k, &s)?;
    let below: Vec<(String, String)> = order
        .less
        .iter()
        .map(|&(i, j)| (s.name(i).to_string(), s.name(j).to_string()))
        .collect();
    json["order"] = json!(below);
    let dsmf = check_dsmf(k, &f, &s)?;
    if !dsmf.is_ok() {
        let _ = writeln!(text, "not a discrete stratified Morse function; offenders {:?}", dsmf.offenders);
        json["offenders"] = json!(dsmf.offenders);
        return Ok(Output { json, text, code: 1 });
    }
    let classes = classify_stratified(k, &f, &s)?;
    let mut counts = [0usize; 4];
    for st in classes.status.values() {
        counts[match st {
            StratifiedStatus::GloballyCritical => 0,
            StratifiedStatus::LocallyCritical => 1,
            StratifiedStatus::GloballyNoncritical { .. } => 2,
            StratifiedStatus::LocallyNoncritical { .. } => 3,
        }] += 1;
    }
    let _ = writeln!(
        text,
        "globally critical {}, locally critical {}, globally noncritical {}, locally noncritical {}",
        counts[0], counts[1], counts[2], counts[3]
    );
    json["classification"] = serde_json::to_value(&classes).expect("classes");
    let r = simplify(k, &f, &s)?;
    text.push_str(&simplify_text(&r));
    json["simplify"] = serde_json::to_value(&r).expect("report");
    if maximality {
        let coarser = find_coarser(k, &f, &s, bound)?;
        match &coarser {
            None => text.push_str("maximal: yes\n"),
            Some(c) => {
                text.push_str("maximal: no, a strictly coarser stratification exists:\n");
                text.push_str(&strata_text(k, Some(&f), c));
            }
        }
        json["maximal"] = json!(coarser.is_none());
        json["coarser"] = json!(coarser.map(|c| c.to_map()));
    }
    Ok(Output::ok(json, text))
}

fn cmd_export_dot(input: &Input, flags: &OrderFlags) -> Result<Output, Failure> {
    let loaded = load(input)?;
    let k = &loaded.complex;
    let (f, s, v) = if loaded.has_values() {
        let f = loaded.field()?;
        let (s, _) = strata_for(&loaded, &f, flags)?;
        let v = union_gradient(k, &f, &s)?;
        (Some(f), Some(s), Some(v))
    } else {
        (None, loaded.strata.clone(), None)
    };
    let dot = io::to_dot(k, f.as_ref(), v.as_ref(), s.as_ref());
    Ok(Output::ok(Value::String(dot.clone()), dot))
}

fn cmd_selftest(names: &[String], cases: Option<usize>, seed: Option<u64>) -> Result<Output, Failure> {
    let seed = match seed {
        Some(s) => s,
        None => match std::env::var("DSMT_SEED") {
            Ok(v) => v.trim().parse().map_err(|_| Failure {
                code: 2,
                message: format!("DSMT_SEED must be an unsigned integer, got '{v}'"),
            })?,
            Err(_) => 0,
        },
    };
    let suites: Vec<Suite> = if names.is_empty() {
        Suite::ALL.into_iter().filter(|&s| s != Suite::Maximality).collect()
    } else {
        names
            .iter()
            .map(|n| {
                Suite::ALL.into_iter().find(|s| s.name() == n).ok_or_else(|| Failure {
                    code: 1,
                    message: format!(
                        "unknown suite '{n}', available: {}",
                        Suite::ALL.map(Suite::name).join(", ")
                    ),
                })
            })
            .collect::<Result<_, _>>()?
    };
    let mut text = String::new();
    let mut results = Vec::new();
    for suite in suites {
        let r = run_suite(suite, seed, cases.unwrap_or(suite.default_cases()));
        let _ = writeln!(
            text,
            "{:<12} {}/{} passed in {:.2?}",
            suite.name(),
            r.passed(),
            r.cases,
            r.elapsed
        );
        for fail in r.failures.iter().take(3) {
            let _ = writeln!(text, "    case {}: {}", fail.index, fail.message);
        }
        results.push(r);
    }
    let ok = results.iter().all(|r| r.is_ok());
    Ok(Output {
        json: json!({ "seed": seed, "suites": results }),
        text,
        code: if ok { 0 } else { 1 },
    })
}

fn run(cli: &Cli) -> Result<Output, Failure> {
    match &cli.command {
        Command::Validate(input) => cmd_validate(input),
        Command::Violators(input) => cmd_violators(input),
        Command::Stratify { input, order } => cmd_stratify(input, order),
        Command::Gradient { input, order } => cmd_gradient(input, order),
        Command::Simplify { input, order } => cmd_simplify(input, order),
        Command::Extend {
            input,
            vertices,
            kernel,
            epsilon,
            global,
        } => cmd_extend(input, vertices, kernel.as_deref(), *epsilon, *global),
        Command::Report {
            input,
            order,
            maximality,
            bound,
        } => cmd_report(input, order, *maximality, *bound),
        Command::ExportDot { input, order } => cmd_export_dot(input, order),
        Command::Selftest { suites, cases, seed } => cmd_selftest(suites, *cases, *seed),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            let json_text = match &out.json {
                Value::String(s) if matches!(cli.command, Command::ExportDot { .. }) => s.clone(),
                v => io::to_json(v),
            };
            if let Some(path) = &cli.output {
                if let Err(e) = fs::write(path, &json_text) {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    return ExitCode::from(2);
                }
            }
            if cli.json {
                print!("{json_text}");
            } else {
                print!("{}", out.text);
            }
            ExitCode::from(out.code)
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
