//! Command implementations behind the `boundslab` binary.
//!
//! Each command takes already-read inputs and returns the exit code with
//! the text for standard output and standard error. Exit codes: 0 when
//! consistent (or solutions exist), 1 when inconsistent or failed, 2 on error.

use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::checkers::{check, Notion};
use crate::domains::{Domain, Valuation};
use crate::engine::{format_trace, propagate_all, trace};
use crate::error::{Error, Result};
use crate::format::{format_model, format_model_with, format_set, parse_model};
use crate::model::Model;
use crate::propagators::Outcome;
use crate::reductions::{encode_subset_sum, grid_refute, is_monotonic, Monotonicity, SubsetSumInstance};
use crate::search::{solve, Limits};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

pub const CSV_HEADER: &str = "instance,notion,nodes,failures,solutions,pruned,micros";

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CmdOutput {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
    /// Trace text, when one was requested.
    pub trace: Option<String>,
}

impl CmdOutput {
    fn ok(code: i32, stdout: String) -> CmdOutput {
        CmdOutput { code, stdout, ..CmdOutput::default() }
    }

    fn error(e: impl std::fmt::Display) -> CmdOutput {
        CmdOutput { code: EXIT_ERROR, stderr: format!("error: {e}\n"), ..CmdOutput::default() }
    }
}

fn load(src: &str, notion: Option<Notion>) -> Result<Model> {
    let m = parse_model(src)?;
    let m = match notion {
        Some(n) => m.with_notion(n),
        None => m,
    };
    m.validate()?;
    Ok(m)
}

fn selected(m: &Model, id: Option<&str>) -> Result<Vec<usize>> {
    match id {
        None => Ok((0..m.constraints.len()).collect()),
        Some(id) => {
            m.constraint_index(id).map(|i| vec![i]).ok_or_else(|| Error::InvalidModel(format!("no constraint `{id}`")))
        }
    }
}

fn valuation_text(m: &Model, v: &Valuation) -> String {
    v.iter().map(|(x, r)| format!("{}={r}", m.name(x))).collect::<Vec<_>>().join(" ")
}

fn valuation_json(m: &Model, v: &Valuation) -> Value {
    let map: serde_json::Map<String, Value> =
        v.iter().map(|(x, r)| (m.name(x).to_string(), json!(r.to_string()))).collect();
    Value::Object(map)
}

fn domain_json(m: &Model, d: &Domain) -> Value {
    let map: serde_json::Map<String, Value> =
        m.vars.iter().zip(d.sets()).map(|(v, s)| (v.name.clone(), json!(s.values()))).collect();
    Value::Object(map)
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json");
    s.push('\n');
    s
}

/// Checks each constraint (or only `constraint`) against the model's domain.
pub fn cmd_check(src: &str, constraint: Option<&str>, notion: Option<Notion>, json: bool) -> CmdOutput {
    let run = || -> Result<CmdOutput> {
        let m = load(src, notion)?;
        let d = m.initial_domain();
        let mut all = true;
        let mut text = String::new();
        let mut rows = Vec::new();
        for i in selected(&m, constraint)? {
            let p = &m.constraints[i];
            let r = check(&d, &p.constraint, p.notion).map_err(|e| Error::InvalidModel(format!("{}: {e}", p.id)))?;
            all &= r.consistent;
            let verdict = if r.consistent { "consistent" } else { "inconsistent" };
            let _ = writeln!(text, "{} {} {}", p.id, p.notion, verdict);
            let mut culprits = Vec::new();
            for s in r.culprits() {
                let _ = writeln!(text, "  culprit {} = {}: no support", m.name(s.var), s.value);
                culprits.push(json!({"var": m.name(s.var), "value": s.value}));
            }
            rows.push(json!({
                "id": p.id,
                "kind": p.constraint.kind(),
                "notion": p.notion.name(),
                "consistent": r.consistent,
                "culprits": culprits,
            }));
        }
        let code = if all { EXIT_OK } else { EXIT_NEGATIVE };
        if json {
            return Ok(CmdOutput::ok(code, pretty(&json!({"consistent": all, "constraints": rows}))));
        }
        Ok(CmdOutput::ok(code, text))
    };
    run().unwrap_or_else(CmdOutput::error)
}

/// Propagates the whole model to its fixpoint. The text output is the
/// model itself with narrowed domains, so it can be fed back in.
pub fn cmd_propagate(src: &str, notion: Option<Notion>, json: bool, want_trace: bool) -> CmdOutput {
    let run = || -> Result<CmdOutput> {
        let m = load(src, notion)?;
        let (res, steps) = trace(&m, &m.initial_domain())?;
        let trace_text = want_trace.then(|| format_trace(&m, &steps));
        let mut out = match &res.outcome {
            Outcome::Failure if json => CmdOutput::ok(EXIT_NEGATIVE, pretty(&json!({"outcome": "failure"}))),
            Outcome::Failure => CmdOutput::ok(EXIT_NEGATIVE, "FAILURE\n".to_string()),
            Outcome::Fixpoint(d) if json => CmdOutput::ok(
                EXIT_OK,
                pretty(&json!({
                    "outcome": "fixpoint",
                    "domains": domain_json(&m, d),
                    "pruned": res.pruned_count(),
                })),
            ),
            Outcome::Fixpoint(d) => CmdOutput::ok(EXIT_OK, format_model_with(&m, d)),
        };
        out.trace = trace_text;
        Ok(out)
    };
    run().unwrap_or_else(CmdOutput::error)
}

/// Enumerates solutions by propagation and backtracking.
pub fn cmd_solve(src: &str, notion: Option<Notion>, limits: Limits, json: bool) -> CmdOutput {
    let run = || -> Result<CmdOutput> {
        let m = load(src, notion)?;
        let r = solve(&m, &m.initial_domain(), limits)?;
        let code = if r.solutions.is_empty() { EXIT_NEGATIVE } else { EXIT_OK };
        let s = r.stats;
        if json {
            let sols: Vec<Value> = r.solutions.iter().map(|v| valuation_json(&m, v)).collect();
            return Ok(CmdOutput::ok(
                code,
                pretty(&json!({
                    "solutions": sols,
                    "stats": s,
                    "truncated": r.truncated,
                })),
            ));
        }
        let mut text = String::new();
        for v in &r.solutions {
            let _ = writeln!(text, "{}", valuation_text(&m, v));
        }
        let _ = writeln!(
            text,
            "nodes={} failures={} solutions={} max_depth={} truncated={}",
            s.nodes, s.failures, s.solutions, s.max_depth, r.truncated
        );
        Ok(CmdOutput::ok(code, text))
    };
    run().unwrap_or_else(CmdOutput::error)
}

/// Prints the linear-equation model deciding the subset-sum instance.
pub fn cmd_reduce_subsetsum(items: &[i64], target: i64) -> CmdOutput {
    let run = || -> Result<CmdOutput> {
        let s = SubsetSumInstance::new(items.to_vec(), target)?;
        let (m, _, _) = encode_subset_sum(&s)?;
        Ok(CmdOutput::ok(EXIT_OK, format_model(&m)))
    };
    run().unwrap_or_else(CmdOutput::error)
}

/// Per-variable monotonicity of each constraint with a real reading.
pub fn cmd_analyze_monotone(src: &str, constraint: Option<&str>, json: bool) -> CmdOutput {
    let run = || -> Result<CmdOutput> {
        let m = load(src, None)?;
        let d = m.initial_domain();
        let mut text = String::new();
        let mut rows = Vec::new();
        let mut all = true;
        for i in selected(&m, constraint)? {
            let p = &m.constraints[i];
            if !p.constraint.has_real_semantics() {
                if constraint.is_some() {
                    return Err(Error::RealSemanticsUndefined(format!("{}: {}", p.id, p.constraint.kind())));
                }
                let _ = writeln!(text, "{} {}: skipped, no real reading", p.id, p.constraint.kind());
                continue;
            }
            let rep = is_monotonic(&p.constraint, &d)?;
            all &= rep.all_monotone();
            let mut parts = Vec::new();
            let mut vars = Vec::new();
            for (v, mono) in &rep.verdicts {
                let mut part = format!("{} {mono}", m.name(*v));
                let refutation = if *mono == Monotonicity::NotMonotone {
                    grid_refute(&p.constraint, &d, *v, Monotonicity::Less, 1_000_000).ok().flatten()
                } else {
                    None
                };
                vars.push(json!({
                    "var": m.name(*v),
                    "order": mono.to_string(),
                    "refutation": refutation.as_ref().map(|r| json!({
                        "solution": valuation_json(&m, &r.theta),
                        "moved_to": r.moved_to.to_string(),
                    })),
                }));
                if let Some(r) = refutation {
                    let _ = write!(
                        part,
                        " (solution {} breaks when {} moves to {})",
                        valuation_text(&m, &r.theta),
                        m.name(*v),
                        r.moved_to
                    );
                }
                parts.push(part);
            }
            let _ = writeln!(text, "{} {}: {}", p.id, p.constraint.kind(), parts.join(", "));
            rows.push(json!({"id": p.id, "kind": p.constraint.kind(), "vars": vars}));
        }
        let code = if all { EXIT_OK } else { EXIT_NEGATIVE };
        if json {
            return Ok(CmdOutput::ok(code, pretty(&json!({"all_monotone": all, "constraints": rows}))));
        }
        Ok(CmdOutput::ok(code, text))
    };
    run().unwrap_or_else(CmdOutput::error)
}

/// Subset-sum instances with even items and an odd target (never solvable),
/// one per size in `sizes`.
pub fn subset_sum_family(seed: u64, sizes: &[usize]) -> Vec<SubsetSumInstance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sizes
        .iter()
        .map(|&n| {
            let items: Vec<i64> = (0..n).map(|_| 2 * rng.random_range(1..=50)).collect();
            let total: i64 = items.iter().sum();
            let target = 2 * rng.random_range(total / 4..=total / 2) + 1;
            SubsetSumInstance::new(items, target).expect("valid family instance")
        })
        .collect()
}

fn bench_rows(name: &str, m: &Model, notions: &[Notion], node_limit: u64, out: &mut String, err: &mut String) {
    for &n in notions {
        let mm = m.with_notion(n);
        let start = Instant::now();
        let row = (|| -> Result<(u64, u64, u64, usize)> {
            mm.validate()?;
            let d = mm.initial_domain();
            let pruned = propagate_all(&mm, &d)?.pruned_count();
            let r = solve(&mm, &d, Limits { max_solutions: None, max_nodes: Some(node_limit) })?;
            Ok((r.stats.nodes, r.stats.failures, r.stats.solutions, pruned))
        })();
        let micros = start.elapsed().as_micros();
        match row {
            Ok((nodes, failures, solutions, pruned)) => {
                let _ = writeln!(out, "{name},{n},{nodes},{failures},{solutions},{pruned},{micros}");
            }
            Err(e) => {
                let _ = writeln!(err, "skipped {name} under {n}: {e}");
            }
        }
    }
}

/// Solves every `*.model` file in `dir` (sorted by name) under each notion,
/// or the seeded subset-sum family when `dir` is `None`. Writes CSV.
pub fn cmd_bench(dir: Option<&Path>, notions: &[Notion], seed: u64, node_limit: u64) -> CmdOutput {
    let notions: Vec<Notion> = if notions.is_empty() { Notion::ALL.to_vec() } else { notions.to_vec() };
    let mut out = format!("{CSV_HEADER}\n");
    let mut err = String::new();
    match dir {
        Some(dir) => {
            let entries = match std::fs::read_dir(dir) {
                Ok(e) => e,
                Err(e) => return CmdOutput::error(format!("{}: {e}", dir.display())),
            };
            let mut files: Vec<_> = entries
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|x| x == "model"))
                .collect();
            files.sort();
            for f in files {
                let name = f.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
                let parsed = std::fs::read_to_string(&f)
                    .map_err(|e| e.to_string())
                    .and_then(|s| parse_model(&s).map_err(|e| e.to_string()));
                match parsed {
                    Ok(m) => bench_rows(&name, &m, &notions, node_limit, &mut out, &mut err),
                    Err(e) => {
                        let _ = writeln!(err, "skipped {}: {e}", f.display());
                    }
                }
            }
        }
        None => {
            for s in subset_sum_family(seed, &[10, 14, 18, 22]) {
                let (m, _, _) = match encode_subset_sum(&s) {
                    Ok(x) => x,
                    Err(e) => return CmdOutput::error(e),
                };
                bench_rows(&format!("subsetsum-n{}", s.items.len()), &m, &notions, node_limit, &mut out, &mut err);
            }
        }
    }
    CmdOutput { code: EXIT_OK, stdout: out, stderr: err, trace: None }
}

/// Lines `name in set` for a domain; used in reports.
pub fn format_domain(m: &Model, d: &Domain) -> String {
    m.vars.iter().zip(d.sets()).map(|(v, s)| format!("{} in {}\n", v.name, format_set(s))).collect()
}
