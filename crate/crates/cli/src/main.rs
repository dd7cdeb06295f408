//! Command-line front end for the icevertex library.
//!
//! Subcommands: `count` (exact counts, optionally weighted), `enumerate`
//! (configuration streams as JSON lines), `verify` (identity suites with
//! per-instance reporting), `sample` (seeded exact sampling), and `formula`
//! (closed-form evaluation).
//!
//! Exit codes: 0 success or all checks pass, 1 verification failure,
//! 2 resource cap exceeded, 3 usage or input error.
//!
//! All output is deterministic for fixed flags and seed. Timing is only
//! reported when `--timing` is given so that golden files can byte-compare.

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde_json::json;

use icevertex::formula::{eval_df_formula, eval_free_boundary_formula};
use icevertex::kernel::{verify_ybe, EnsembleSampler, FiberSampler, RNG_ALGORITHM};
use icevertex::lattice::{BoundarySpec, PathFamily6V, Quad20V, RectM6V};
use icevertex::ring::{prefactor, WeightMonomial};
use icevertex::triangle::{
    enumerate_barred_triangles, enumerate_gt, fiber_sum, ic_triangle, omega_fsa, psi1,
    psi1_inverse, Fence, GTPattern, ZigStep,
};
use icevertex::twenty::{count_20v, count_20v_explicit, enumerate_20v, CountMethod};
use icevertex::{six, Caps};

#[derive(Parser)]
#[command(name = "icevertex", version, about = "Exact tools for ice-rule vertex models")]
struct Cli {
    /// Write output to a file instead of stdout.
    #[arg(long, global = true, value_name = "FILE")]
    output: Option<PathBuf>,
    /// Override the enumeration cap (also env ICEVERTEX_MAX_CONFIGS).
    #[arg(long, global = true, value_name = "N")]
    max_configs: Option<u64>,
    /// Override the DP state cap (also env ICEVERTEX_MAX_STATES).
    #[arg(long, global = true, value_name = "N")]
    max_states: Option<u64>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Count configurations of a model exactly.
    Count {
        #[arg(value_enum)]
        model: Model,
        /// Strictly increasing boundary sequence, e.g. --k 1,2,3.
        #[arg(long, value_delimiter = ',', value_name = "K1,K2,..")]
        k: Option<Vec<u32>>,
        /// Bottom row for the gt model, e.g. --bottom 1,2.
        #[arg(long, value_delimiter = ',', value_name = "B1,B2,..")]
        bottom: Option<Vec<u32>>,
        /// Weighted count: sum of 2^ic (m6v) or of omega_FSA (gt).
        #[arg(long)]
        weighted: bool,
        /// Counting method for the 20v model.
        #[arg(long, value_enum)]
        method: Option<Method>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        /// Include elapsed milliseconds in the report (non-deterministic).
        #[arg(long)]
        timing: bool,
    },
    /// Stream configurations as JSON lines.
    Enumerate {
        #[arg(value_enum)]
        model: EnumModel,
        #[arg(long, value_delimiter = ',', value_name = "K1,K2,..")]
        k: Option<Vec<u32>>,
        #[arg(long, value_delimiter = ',', value_name = "B1,B2,..")]
        bottom: Option<Vec<u32>>,
        /// Keep only triple-free patterns (gt model).
        #[arg(long)]
        triple_free: bool,
        /// Stop after this many configurations.
        #[arg(long, value_name = "N")]
        limit: Option<usize>,
    },
    /// Run a verification suite and report per-instance results.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
        /// Largest boundary length n to sweep.
        #[arg(long, value_name = "N")]
        nmax: Option<u32>,
        /// Largest boundary entry (free-boundary suites read it as the m bound).
        #[arg(long, value_name = "K")]
        kmax: Option<u32>,
        /// Largest fence size (lemma510).
        #[arg(long, value_name = "S")]
        size: Option<u32>,
        /// Small preset ranges; the full `all` sweep fits in about a minute.
        #[arg(long)]
        quick: bool,
        /// Worker threads for independent instances (default sequential).
        #[arg(long, value_name = "N")]
        threads: Option<usize>,
        /// Re-check a single serialized configuration or pattern.
        #[arg(long, value_name = "FILE")]
        replay: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        /// Report elapsed time in the summary (non-deterministic).
        #[arg(long)]
        timing: bool,
    },
    /// Draw reproducible samples as JSON lines.
    Sample {
        /// Sample the fiber of one triple-free pattern: inline JSON or @file.
        #[arg(long, value_name = "JSON|@FILE")]
        pattern: Option<String>,
        /// Sample whole configurations of M_k for this boundary.
        #[arg(long, value_delimiter = ',', value_name = "K1,K2,..")]
        bottom: Option<Vec<u32>>,
        #[arg(long, default_value_t = 1, value_name = "N")]
        count: u64,
        #[arg(long, default_value_t = 0, value_name = "S")]
        seed: u64,
    },
    /// Evaluate a closed-form count as an exact decimal string.
    Formula {
        #[arg(value_enum)]
        which: Which,
        #[arg(long, value_name = "N")]
        n: u64,
        /// Free-boundary size bound (free only).
        #[arg(long, value_name = "M")]
        m: Option<u64>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Model {
    #[value(name = "20v")]
    V20,
    M6v,
    Gt,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EnumModel {
    #[value(name = "20v")]
    V20,
    M6v,
    Gt,
    Barred,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Dp,
    Explicit,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Which {
    Df,
    Free,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Suite {
    Ybe,
    Thm42,
    Prop54,
    Thm52,
    Lemma510,
    Thm11,
    Thm12,
    Equidist,
    All,
}

impl Suite {
    fn name(self) -> &'static str {
        match self {
            Suite::Ybe => "ybe",
            Suite::Thm42 => "thm42",
            Suite::Prop54 => "prop54",
            Suite::Thm52 => "thm52",
            Suite::Lemma510 => "lemma510",
            Suite::Thm11 => "thm11",
            Suite::Thm12 => "thm12",
            Suite::Equidist => "equidist",
            Suite::All => "all",
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version are successes; real parse errors are usage errors.
            if e.exit_code() == 0 {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let _ = e.print();
            return ExitCode::from(3);
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<icevertex::Error>()
                .is_some_and(|le| matches!(le, icevertex::Error::CapExceeded { .. }))
            {
                ExitCode::from(2)
            } else {
                ExitCode::from(3)
            }
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    let mut caps = Caps::default();
    if let Some(c) = cli.max_configs {
        caps.max_configs = c;
    }
    if let Some(c) = cli.max_states {
        caps.max_states = c;
    }
    let mut out: Box<dyn Write> = match &cli.output {
        Some(path) => Box::new(io::BufWriter::new(
            fs::File::create(path).with_context(|| format!("creating {}", path.display()))?,
        )),
        None => Box::new(io::BufWriter::new(io::stdout())),
    };
    let code = match cli.cmd {
        Cmd::Count { model, k, bottom, weighted, method, format, timing } => {
            cmd_count(&mut out, caps, model, k, bottom, weighted, method, format, timing)?
        }
        Cmd::Enumerate { model, k, bottom, triple_free, limit } => {
            cmd_enumerate(&mut out, caps, model, k, bottom, triple_free, limit)?
        }
        Cmd::Verify { suite, nmax, kmax, size, quick, threads, replay, format, timing } => {
            match replay {
                Some(path) => cmd_replay(&mut out, caps, suite, &path)?,
                None => {
                    let ranges = Ranges::resolve(quick, nmax, kmax, size);
                    cmd_verify(&mut out, caps, suite, ranges, threads.unwrap_or(1), format, timing)?
                }
            }
        }
        Cmd::Sample { pattern, bottom, count, seed } => {
            cmd_sample(&mut out, caps, pattern, bottom, count, seed)?
        }
        Cmd::Formula { which, n, m } => cmd_formula(&mut out, which, n, m)?,
    };
    out.flush()?;
    Ok(code)
}

fn spec_from(k: Option<Vec<u32>>, flag: &str) -> Result<BoundarySpec> {
    let k = k.with_context(|| format!("--{flag} is required for this model"))?;
    Ok(BoundarySpec::new(k)?)
}

fn klabel(k: &[u32]) -> String {
    let inner: Vec<String> = k.iter().map(u32::to_string).collect();
    format!("({})", inner.join(","))
}

fn count_noun(n: u64, noun: &str) -> String {
    if n == 1 {
        format!("1 {noun}")
    } else {
        format!("{n} {noun}s")
    }
}

// ---------------------------------------------------------------------------
// count

#[allow(clippy::too_many_arguments)]
fn cmd_count(
    out: &mut dyn Write,
    caps: Caps,
    model: Model,
    k: Option<Vec<u32>>,
    bottom: Option<Vec<u32>>,
    weighted: bool,
    method: Option<Method>,
    format: Format,
    timing: bool,
) -> Result<ExitCode> {
    if method.is_some() && model != Model::V20 {
        bail!("--method only applies to the 20v model");
    }
    let start = Instant::now();
    let mut report = match model {
        Model::V20 => {
            if weighted {
                bail!("20v counting is unweighted; drop --weighted");
            }
            if bottom.is_some() {
                bail!("the 20v model takes --k, not --bottom");
            }
            let q = Quad20V::new(spec_from(k, "k")?);
            let c = match method.unwrap_or(Method::Dp) {
                Method::Dp => count_20v(&q, &caps)?,
                Method::Explicit => count_20v_explicit(&q, &caps)?,
            };
            let m = match c.method {
                CountMethod::Dp => "dp",
                CountMethod::Explicit => "explicit",
            };
            json!({"model": "20v", "k": c.k, "count": c.count.to_string(), "method": m})
        }
        Model::M6v => {
            if bottom.is_some() {
                bail!("the m6v model takes --k, not --bottom");
            }
            let rect = RectM6V::new(spec_from(k, "k")?);
            let w = six::weighted_count_m6v(&rect, &caps)?;
            if weighted {
                json!({"model": "m6v", "k": w.k, "configs": w.configs,
                       "sum_2_ic": w.total.to_string(), "method": "enumerate"})
            } else {
                json!({"model": "m6v", "k": w.k, "count": w.configs.to_string(),
                       "method": "enumerate"})
            }
        }
        Model::Gt => {
            if k.is_some() {
                bail!("the gt model takes --bottom, not --k");
            }
            let bottom = bottom.context("--bottom is required for the gt model")?;
            let patterns = enumerate_gt(&bottom, &caps)?;
            let free: Vec<&GTPattern> =
                patterns.iter().filter(|t| t.is_triple_free()).collect();
            if weighted {
                let total: BigUint = free.iter().map(|t| omega_fsa(t)).sum();
                json!({"model": "gt", "bottom": bottom,
                       "sum_omega_fsa": total.to_string(), "method": "enumerate"})
            } else {
                json!({"model": "gt", "bottom": bottom,
                       "count": free.len().to_string(), "method": "enumerate"})
            }
        }
    };
    if timing {
        report["timing_ms"] = json!(start.elapsed().as_millis() as u64);
    }
    render_report(out, &report, format)?;
    Ok(ExitCode::SUCCESS)
}

fn render_report(out: &mut dyn Write, report: &serde_json::Value, format: Format) -> Result<()> {
    let obj = report.as_object().expect("report is an object");
    match format {
        Format::Json => writeln!(out, "{report}")?,
        Format::Csv => {
            let keys: Vec<&str> = obj.keys().map(String::as_str).collect();
            writeln!(out, "{}", keys.join(","))?;
            let row: Vec<String> = obj.values().map(csv_cell).collect();
            writeln!(out, "{}", row.join(","))?;
        }
        Format::Text => {
            for (key, value) in obj {
                writeln!(out, "{key} = {}", csv_cell(value))?;
            }
        }
    }
    Ok(())
}

fn csv_cell(v: &serde_json::Value) -> String {
    let plain = match v {
        serde_json::Value::String(s) => s.clone(),
        serde_json::Value::Array(items) => {
            let inner: Vec<String> = items.iter().map(csv_cell).collect();
            inner.join(",")
        }
        other => other.to_string(),
    };
    if plain.contains(',') || plain.contains('"') {
        format!("\"{}\"", plain.replace('"', "\"\""))
    } else {
        plain
    }
}

// ---------------------------------------------------------------------------
// enumerate

fn cmd_enumerate(
    out: &mut dyn Write,
    caps: Caps,
    model: EnumModel,
    k: Option<Vec<u32>>,
    bottom: Option<Vec<u32>>,
    triple_free: bool,
    limit: Option<usize>,
) -> Result<ExitCode> {
    if triple_free && model != EnumModel::Gt {
        bail!("--triple-free only applies to the gt model");
    }
    let mut truncated = false;
    match model {
        EnumModel::V20 => {
            let q = Quad20V::new(spec_from(k, "k")?);
            let e = enumerate_20v(&q, limit, &caps)?;
            truncated = e.truncated;
            for fam in &e.families {
                writeln!(out, "{}", serde_json::to_string(fam)?)?;
            }
        }
        EnumModel::M6v => {
            let rect = RectM6V::new(spec_from(k, "k")?);
            let e = six::enumerate_m6v(&rect, limit, &caps)?;
            truncated = e.truncated;
            for fam in &e.families {
                writeln!(out, "{}", serde_json::to_string(fam)?)?;
            }
        }
        EnumModel::Gt => {
            let bottom = bottom.context("--bottom is required for the gt model")?;
            let patterns = enumerate_gt(&bottom, &caps)?;
            let keep = patterns.iter().filter(|t| !triple_free || t.is_triple_free());
            for t in keep.take(limit.unwrap_or(usize::MAX)) {
                writeln!(out, "{}", serde_json::to_string(t)?)?;
            }
        }
        EnumModel::Barred => {
            let spec = spec_from(k, "k")?;
            let ts = enumerate_barred_triangles(&spec, &caps)?;
            for t in ts.iter().take(limit.unwrap_or(usize::MAX)) {
                writeln!(out, "{}", serde_json::to_string(t)?)?;
            }
        }
    }
    if truncated {
        eprintln!("note: enumeration truncated by --limit");
    }
    Ok(ExitCode::SUCCESS)
}

// ---------------------------------------------------------------------------
// verify

#[derive(Clone, Copy)]
struct Ranges {
    nmax: u32,
    kmax: u32,
    size: u32,
    equidist_nmax: u32,
}

impl Ranges {
    fn resolve(quick: bool, nmax: Option<u32>, kmax: Option<u32>, size: Option<u32>) -> Ranges {
        let base = if quick {
            Ranges { nmax: 3, kmax: 4, size: 8, equidist_nmax: 3 }
        } else {
            Ranges { nmax: 4, kmax: 6, size: 12, equidist_nmax: 4 }
        };
        Ranges {
            nmax: nmax.unwrap_or(base.nmax),
            kmax: kmax.unwrap_or(base.kmax),
            size: size.unwrap_or(base.size),
            equidist_nmax: nmax.unwrap_or(base.equidist_nmax),
        }
    }
}

struct Outcome {
    pass: bool,
    checked: u64,
    detail: String,
    counterexample: Option<serde_json::Value>,
}

impl Outcome {
    fn pass(checked: u64, detail: String) -> Outcome {
        Outcome { pass: true, checked, detail, counterexample: None }
    }
}

type Work = Box<dyn FnOnce() -> Result<Outcome> + Send>;

struct Instance {
    suite: &'static str,
    label: String,
    work: Work,
}

/// Strictly increasing sequences of length `n` drawn from `1..=max`, in
/// lexicographic order.
fn combos(max: u32, n: usize) -> Vec<Vec<u32>> {
    let mut acc = Vec::new();
    let mut cur = Vec::with_capacity(n);
    fn go(acc: &mut Vec<Vec<u32>>, cur: &mut Vec<u32>, lo: u32, max: u32, n: usize) {
        if cur.len() == n {
            acc.push(cur.clone());
            return;
        }
        for v in lo..=max {
            cur.push(v);
            go(acc, cur, v + 1, max, n);
            cur.pop();
        }
    }
    go(&mut acc, &mut cur, 1, max, n);
    acc
}

fn domains(nmax: u32, kmax: u32) -> Vec<Vec<u32>> {
    let mut all = Vec::new();
    for n in 1..=nmax.min(kmax) {
        all.extend(combos(kmax, n as usize));
    }
    all
}

fn cmd_verify(
    out: &mut dyn Write,
    caps: Caps,
    suite: Suite,
    ranges: Ranges,
    threads: usize,
    format: Format,
    timing: bool,
) -> Result<ExitCode> {
    if format == Format::Csv {
        bail!("verify reports as text or json");
    }
    let start = Instant::now();
    let suites: Vec<Suite> = match suite {
        Suite::All => vec![
            Suite::Ybe,
            Suite::Thm42,
            Suite::Prop54,
            Suite::Thm52,
            Suite::Lemma510,
            Suite::Thm11,
            Suite::Thm12,
            Suite::Equidist,
        ],
        s => vec![s],
    };
    let mut instances = Vec::new();
    for s in &suites {
        instances.extend(build_suite(*s, caps, ranges));
    }
    let run_one = |inst: Instance| -> Result<(&'static str, String, Outcome)> {
        let Instance { suite, label, work } = inst;
        let outcome = work()?;
        Ok((suite, label, outcome))
    };
    let results: Vec<(&str, String, Outcome)> = if threads <= 1 {
        instances.into_iter().map(run_one).collect::<Result<_>>()?
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .context("building thread pool")?;
        pool.install(|| instances.into_par_iter().map(run_one).collect::<Result<_>>())?
    };

    let mut failures = 0u64;
    let mut checked = 0u64;
    for (suite_name, label, o) in &results {
        checked += o.checked;
        if !o.pass {
            failures += 1;
        }
        match format {
            Format::Json => {
                let mut line = json!({
                    "suite": suite_name, "instance": label,
                    "pass": o.pass, "checked": o.checked, "detail": o.detail,
                });
                if let Some(ce) = &o.counterexample {
                    line["counterexample"] = ce.clone();
                }
                writeln!(out, "{line}")?;
            }
            _ => {
                let verdict = if o.pass { "pass" } else { "FAIL" };
                writeln!(out, "{verdict} {suite_name} {label}: {}", o.detail)?;
                if let Some(ce) = &o.counterexample {
                    writeln!(out, "  counterexample: {ce}")?;
                }
            }
        }
    }
    let elapsed = start.elapsed();
    match format {
        Format::Json => {
            let mut summary = json!({
                "summary": suite.name(), "instances": results.len() as u64,
                "checked": checked, "failures": failures,
            });
            if timing {
                summary["elapsed_ms"] = json!(elapsed.as_millis() as u64);
            }
            writeln!(out, "{summary}")?;
        }
        _ => {
            let clock = if timing {
                format!(" in {:.1} s", elapsed.as_secs_f64())
            } else {
                String::new()
            };
            if failures == 0 {
                writeln!(
                    out,
                    "verify {}: {} instances, {} objects checked, all pass{clock}",
                    suite.name(),
                    results.len(),
                    checked,
                )?;
            } else {
                writeln!(
                    out,
                    "verify {}: {} of {} instances FAILED{clock}",
                    suite.name(),
                    failures,
                    results.len(),
                )?;
            }
        }
    }
    Ok(if failures == 0 { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn build_suite(suite: Suite, caps: Caps, ranges: Ranges) -> Vec<Instance> {
    match suite {
        Suite::Ybe => vec![Instance {
            suite: "ybe",
            label: "boundaries".into(),
            work: Box::new(move || match verify_ybe() {
                Ok(r) => Ok(Outcome::pass(
                    r.boundaries as u64,
                    format!("{}/{} boundaries, {} balanced with weight 1", r.boundaries, r.boundaries, r.balanced),
                )),
                Err(icevertex::Error::InvalidConfig(msg)) => Ok(Outcome {
                    pass: false,
                    checked: 0,
                    detail: msg,
                    counterexample: None,
                }),
                Err(e) => Err(e.into()),
            }),
        }],
        Suite::Thm42 => domains(ranges.nmax, ranges.kmax)
            .into_iter()
            .map(|k| Instance {
                suite: "thm42",
                label: format!("k={}", klabel(&k)),
                work: Box::new(move || check_weight_identity(&k, caps)),
            })
            .collect(),
        Suite::Prop54 => domains(ranges.nmax, ranges.kmax)
            .into_iter()
            .map(|k| Instance {
                suite: "prop54",
                label: format!("k={}", klabel(&k)),
                work: Box::new(move || check_triangle_statistic(&k, caps)),
            })
            .collect(),
        Suite::Thm52 => domains(ranges.nmax, ranges.kmax)
            .into_iter()
            .map(|k| Instance {
                suite: "thm52",
                label: format!("k={}", klabel(&k)),
                work: Box::new(move || check_fiber_identity(&k, caps)),
            })
            .collect(),
        Suite::Lemma510 => (1..=ranges.size)
            .map(|s| Instance {
                suite: "lemma510",
                label: format!("size={s}"),
                work: Box::new(move || check_fence_sums(s as usize)),
            })
            .collect(),
        Suite::Thm11 => domains(ranges.nmax, ranges.kmax)
            .into_iter()
            .map(|k| Instance {
                suite: "thm11",
                label: format!("k={}", klabel(&k)),
                work: Box::new(move || check_count_identity(&k, caps)),
            })
            .collect(),
        Suite::Thm12 => {
            let mut v: Vec<Instance> = Vec::new();
            for n in 1..=ranges.nmax as u64 {
                for m in n.saturating_sub(1)..=ranges.kmax as u64 {
                    v.push(Instance {
                        suite: "thm12",
                        label: format!("n={n} m={m}"),
                        work: Box::new(move || check_free_boundary(n, m, caps)),
                    });
                }
            }
            for n in 1..=6u64 {
                v.push(Instance {
                    suite: "thm12",
                    label: format!("reduction n={n}"),
                    work: Box::new(move || {
                        let free = eval_free_boundary_formula(n, n - 1)?;
                        let df = eval_df_formula(n)?;
                        if free == df {
                            Ok(Outcome::pass(1, format!("free(n,n-1) = df(n) = {df}")))
                        } else {
                            Ok(Outcome {
                                pass: false,
                                checked: 1,
                                detail: format!("free(n,n-1) = {free} but df(n) = {df}"),
                                counterexample: Some(json!({"n": n})),
                            })
                        }
                    }),
                });
            }
            v
        }
        Suite::Equidist => (1..=ranges.equidist_nmax)
            .map(|n| Instance {
                suite: "equidist",
                label: format!("n={n}"),
                work: Box::new(move || check_equidistribution(n, caps)),
            })
            .collect(),
        Suite::All => unreachable!("expanded by the caller"),
    }
}

/// prefactor(k) * omega(x) = 2^ic(x) for every configuration of M_k.
fn check_weight_identity(k: &[u32], caps: Caps) -> Result<Outcome> {
    let rect = RectM6V::new(BoundarySpec::new(k.to_vec())?);
    let pf = prefactor(rect.spec());
    let e = six::enumerate_m6v(&rect, None, &caps)?;
    for fam in &e.families {
        let o = rect.paths_to_orientation(fam)?;
        let ic = six::ic(&rect, &o)?;
        let lhs = pf.mul(&six::omega(&rect, &o)?);
        if lhs != WeightMonomial::power_of_two(ic as i64) {
            return Ok(Outcome {
                pass: false,
                checked: e.families.len() as u64,
                detail: format!("prefactor * omega differs from 2^ic (ic = {ic})"),
                counterexample: Some(serde_json::to_value(fam)?),
            });
        }
    }
    Ok(Outcome::pass(e.families.len() as u64, count_noun(e.families.len() as u64, "configuration")))
}

/// ic(x) = alpha-bar + beta of the image triangle, and the path map
/// round-trips.
fn check_triangle_statistic(k: &[u32], caps: Caps) -> Result<Outcome> {
    let rect = RectM6V::new(BoundarySpec::new(k.to_vec())?);
    let e = six::enumerate_m6v(&rect, None, &caps)?;
    for fam in &e.families {
        let o = rect.paths_to_orientation(fam)?;
        let ic = six::ic(&rect, &o)?;
        let t = psi1(fam)?;
        if ic_triangle(&t) != ic {
            return Ok(Outcome {
                pass: false,
                checked: e.families.len() as u64,
                detail: format!("triangle statistic {} differs from ic {ic}", ic_triangle(&t)),
                counterexample: Some(serde_json::to_value(fam)?),
            });
        }
        let back = psi1_inverse(rect.spec(), &t)?;
        if back.paths != fam.paths {
            return Ok(Outcome {
                pass: false,
                checked: e.families.len() as u64,
                detail: "psi1_inverse does not invert psi1".into(),
                counterexample: Some(serde_json::to_value(fam)?),
            });
        }
    }
    Ok(Outcome::pass(e.families.len() as u64, count_noun(e.families.len() as u64, "configuration")))
}

/// 2^n * fiber_sum(T') = omega_FSA(T') for every triple-free pattern with
/// bottom row k.
fn check_fiber_identity(k: &[u32], caps: Caps) -> Result<Outcome> {
    let n = k.len();
    let patterns = enumerate_gt(k, &caps)?;
    let mut checked = 0u64;
    for t in patterns.iter().filter(|t| t.is_triple_free()) {
        checked += 1;
        let lhs = fiber_sum(t, &caps)? << n;
        if lhs != omega_fsa(t) {
            return Ok(Outcome {
                pass: false,
                checked,
                detail: format!("2^n * fiber_sum = {lhs} but omega_FSA = {}", omega_fsa(t)),
                counterexample: Some(serde_json::to_value(t)?),
            });
        }
    }
    Ok(Outcome::pass(checked, count_noun(checked, "triple-free pattern")))
}

/// Sum of 2^ic over the order ideals of every fence of size s is 2^s, and
/// restricting to ideals containing the bottom cell halves it.
fn check_fence_sums(s: usize) -> Result<Outcome> {
    let fences: u64 = 1 << (s - 1);
    for mask in 0..fences {
        let steps: Vec<ZigStep> = (0..s - 1)
            .map(|i| if mask >> i & 1 == 0 { ZigStep::Vertical } else { ZigStep::Diagonal })
            .collect();
        let f = Fence::new(steps);
        let ideals = icevertex::triangle::enumerate_ideals(&f);
        let mut total = BigUint::zero();
        let mut restricted = BigUint::zero();
        for ideal in &ideals {
            let w = BigUint::one() << icevertex::triangle::ic_ideal(&f, ideal)?;
            if ideal[0] {
                restricted += &w;
            }
            total += w;
        }
        if total != BigUint::one() << s || restricted != BigUint::one() << (s - 1) {
            return Ok(Outcome {
                pass: false,
                checked: fences,
                detail: format!("fence mask {mask}: total {total}, restricted {restricted}"),
                counterexample: Some(json!({"size": s, "mask": mask})),
            });
        }
    }
    Ok(Outcome::pass(fences, count_noun(fences, "fence")))
}

/// count_20v(k) = 2^{-n} * sum of omega_FSA over triple-free patterns with
/// bottom row k.
fn check_count_identity(k: &[u32], caps: Caps) -> Result<Outcome> {
    let n = k.len();
    let q = Quad20V::new(BoundarySpec::new(k.to_vec())?);
    let count = count_20v(&q, &caps)?.count;
    let patterns = enumerate_gt(k, &caps)?;
    let total: BigUint =
        patterns.iter().filter(|t| t.is_triple_free()).map(omega_fsa).sum();
    if count.clone() << n == total {
        Ok(Outcome::pass(1, format!("count {count} = 2^-{n} * {total}")))
    } else {
        Ok(Outcome {
            pass: false,
            checked: 1,
            detail: format!("count {count} but weighted pattern sum {total}"),
            counterexample: Some(json!({"k": k, "count": count.to_string(),
                                        "sum_omega_fsa": total.to_string()})),
        })
    }
}

/// Summing count_20v over all strictly increasing k in [1, m+1]^n matches
/// the free-boundary product formula.
fn check_free_boundary(n: u64, m: u64, caps: Caps) -> Result<Outcome> {
    let mut total = BigUint::zero();
    let ks = combos(m as u32 + 1, n as usize);
    for k in &ks {
        let q = Quad20V::new(BoundarySpec::new(k.clone())?);
        total += count_20v(&q, &caps)?.count;
    }
    let formula = eval_free_boundary_formula(n, m)?;
    if BigInt::from(total.clone()) == formula {
        Ok(Outcome::pass(ks.len() as u64, format!("{} sum to {total}", count_noun(ks.len() as u64, "boundary sequence"))))
    } else {
        Ok(Outcome {
            pass: false,
            checked: ks.len() as u64,
            detail: format!("boundary sum {total} but formula {formula}"),
            counterexample: Some(json!({"n": n, "m": m, "sum": total.to_string(),
                                        "formula": formula.to_string()})),
        })
    }
}

/// The ic statistic and the sign-matrix inversion number are
/// equidistributed over M_(1..n).
fn check_equidistribution(n: u32, caps: Caps) -> Result<Outcome> {
    let rect = RectM6V::new(BoundarySpec::new((1..=n).collect())?);
    let e = six::enumerate_m6v(&rect, None, &caps)?;
    let mut ics = Vec::with_capacity(e.families.len());
    let mut invs = Vec::with_capacity(e.families.len());
    for fam in &e.families {
        let o = rect.paths_to_orientation(fam)?;
        ics.push(six::ic(&rect, &o)? as i64);
        invs.push(six::inv(&six::sign_matrix(&rect, &o)?));
    }
    ics.sort_unstable();
    invs.sort_unstable();
    if ics == invs {
        Ok(Outcome::pass(ics.len() as u64, count_noun(ics.len() as u64, "configuration")))
    } else {
        Ok(Outcome {
            pass: false,
            checked: ics.len() as u64,
            detail: "multiset of ic differs from multiset of inv".into(),
            counterexample: Some(json!({"n": n})),
        })
    }
}

/// Re-run one suite's check on a single serialized object.
fn cmd_replay(out: &mut dyn Write, caps: Caps, suite: Suite, path: &PathBuf) -> Result<ExitCode> {
    let text =
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let outcome = match suite {
        Suite::Thm42 | Suite::Prop54 => {
            let fam: PathFamily6V = serde_json::from_str(&text).context("parsing configuration")?;
            let k = fam.spec.k().to_vec();
            let one = replay_family(suite, &fam, caps)?;
            (format!("k={}", klabel(&k)), one)
        }
        Suite::Thm52 => {
            let t: GTPattern = serde_json::from_str(&text).context("parsing pattern")?;
            let n = t.n();
            let lhs = fiber_sum(&t, &caps)? << n;
            let rhs = omega_fsa(&t);
            let pass = lhs == rhs;
            let detail = format!("2^n * fiber_sum = {lhs}, omega_FSA = {rhs}");
            (
                format!("bottom={}", klabel(t.bottom())),
                Outcome { pass, checked: 1, detail, counterexample: None },
            )
        }
        _ => bail!("--replay supports the thm42, prop54, and thm52 suites"),
    };
    let (label, o) = outcome;
    let verdict = if o.pass { "pass" } else { "FAIL" };
    writeln!(out, "{verdict} {} {label}: {}", suite.name(), o.detail)?;
    Ok(if o.pass { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn replay_family(suite: Suite, fam: &PathFamily6V, caps: Caps) -> Result<Outcome> {
    let _ = caps;
    let rect = RectM6V::new(fam.spec.clone());
    let o = rect.paths_to_orientation(fam)?;
    let ic = six::ic(&rect, &o)?;
    match suite {
        Suite::Thm42 => {
            let lhs = prefactor(rect.spec()).mul(&six::omega(&rect, &o)?);
            let pass = lhs == WeightMonomial::power_of_two(ic as i64);
            Ok(Outcome {
                pass,
                checked: 1,
                detail: format!("ic = {ic}"),
                counterexample: None,
            })
        }
        Suite::Prop54 => {
            let t = psi1(fam)?;
            let back = psi1_inverse(rect.spec(), &t)?;
            let pass = ic_triangle(&t) == ic && back.paths == fam.paths;
            Ok(Outcome {
                pass,
                checked: 1,
                detail: format!("ic = {ic}, triangle statistic = {}", ic_triangle(&t)),
                counterexample: None,
            })
        }
        _ => unreachable!("caller restricts the suite"),
    }
}

// ---------------------------------------------------------------------------
// sample

fn cmd_sample(
    out: &mut dyn Write,
    caps: Caps,
    pattern: Option<String>,
    bottom: Option<Vec<u32>>,
    count: u64,
    seed: u64,
) -> Result<ExitCode> {
    match (pattern, bottom) {
        (Some(_), Some(_)) => bail!("give either --pattern or --bottom, not both"),
        (None, None) => bail!("give --pattern (one fiber) or --bottom (whole ensemble)"),
        (Some(spec), None) => {
            let text = match spec.strip_prefix('@') {
                Some(path) => {
                    fs::read_to_string(path).with_context(|| format!("reading {path}"))?
                }
                None => spec,
            };
            let t: GTPattern = serde_json::from_str(&text).context("parsing pattern")?;
            let mut sampler = FiberSampler::new(&t, seed, &caps)?;
            for _ in 0..count {
                let (_, fam, prob) = sampler.draw();
                writeln!(
                    out,
                    "{}",
                    json!({"seed": seed, "rng": RNG_ALGORITHM,
                           "sample": fam, "prob": prob.to_string()})
                )?;
            }
        }
        (None, Some(k)) => {
            let spec = BoundarySpec::new(k)?;
            let mut sampler = EnsembleSampler::new(&spec, seed, &caps)?;
            for _ in 0..count {
                let (fam, prob) = sampler.draw()?;
                writeln!(
                    out,
                    "{}",
                    json!({"seed": seed, "rng": RNG_ALGORITHM,
                           "sample": fam, "prob": prob.to_string()})
                )?;
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

// ---------------------------------------------------------------------------
// formula

fn cmd_formula(out: &mut dyn Write, which: Which, n: u64, m: Option<u64>) -> Result<ExitCode> {
    let value = match which {
        Which::Df => {
            if m.is_some() {
                bail!("df takes only --n");
            }
            eval_df_formula(n)?
        }
        Which::Free => {
            let m = m.context("--m is required for the free formula")?;
            eval_free_boundary_formula(n, m)?
        }
    };
    writeln!(out, "{value}")?;
    Ok(ExitCode::SUCCESS)
}
