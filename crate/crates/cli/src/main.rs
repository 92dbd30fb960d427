//! Command-line front end for the tradenet toolkit.
//!
//! Exit codes: 0 success / positive verdict, 1 negative verdict (gap found,
//! no equilibrium, failed check or suite), 2 usage or validation error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;
use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use tradenet::builtin;
use tradenet::convexity::{
    concave_extension_eval, facet_set, is_m_concave_fn, is_m_convex_fn, is_m_convex_set,
    is_msharp_concave_fn, is_msharp_convex_fn, is_msharp_convex_set, FiniteIntFunction,
};
use tradenet::coords::{IndexSet, IntVec, RatVec};
use tradenet::equilibrium::{certify_nonexistence, reverify_certificate, CertifyResult, PriceSearch};
use tradenet::generate::{generate_instances, Profile};
use tradenet::network::Instance;
use tradenet::rat::Rat;
use tradenet::solver::detect_gap;
use tradenet::suites::{self, SuiteConfig, SuiteReport};

#[derive(Parser)]
#[command(name = "tradenet", version, about = "Discrete-convexity toolkit for trading networks")]
struct Cli {
    /// Output mode; json emits exactly one document on stdout.
    #[arg(long, global = true, value_enum, default_value_t = OutputMode::Human)]
    output: OutputMode,
    /// Re-verify every certificate by independent arithmetic before printing.
    #[arg(long, global = true)]
    recheck: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputMode {
    Human,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Validate an instance document (schema plus every invariant).
    Validate { instance: PathBuf },
    /// Exchange-property checks on a valuation table or the constraint.
    Check {
        /// Instance file; defaults to the built-in golden instance.
        #[arg(long)]
        instance: Option<PathBuf>,
        /// Valuation to check: an agent id, `w<id>`, or `aggregate`.
        #[arg(long, conflicts_with = "constraint")]
        function: Option<String>,
        /// Check the polymatroid constraint instead of a valuation.
        #[arg(long)]
        constraint: bool,
        /// One of: msharp-concave, m-concave, msharp-convex, m-convex,
        /// msharp-convex-set, m-convex-set, submodular, monotone.
        #[arg(long)]
        property: String,
    },
    /// Evaluate the concave extension and the linearity facet at a point.
    Extension {
        #[arg(long)]
        instance: Option<PathBuf>,
        /// Valuation: an agent id, `w<id>`, or `aggregate`.
        #[arg(long, default_value = "aggregate")]
        function: String,
        /// Rational point, e.g. `e=1/2,g=-1/2`.
        #[arg(long)]
        at: String,
    },
    /// Integral + relaxation solve with gap detection.
    Solve {
        #[arg(long)]
        instance: Option<PathBuf>,
    },
    /// Search for supporting prices at a given outcome.
    Prices {
        #[arg(long)]
        instance: Option<PathBuf>,
        /// Integer outcome, e.g. `e=0,g=0`.
        #[arg(long)]
        outcome: String,
        /// Search over arc prices plus constraint rents.
        #[arg(long)]
        rents: bool,
    },
    /// Iterate all feasible outcomes: first supported one or the full
    /// bundle of infeasibility certificates.
    Certify {
        #[arg(long)]
        instance: Option<PathBuf>,
    },
    /// Run the built-in golden instance end to end.
    PaperExample1,
    /// Run the property suites.
    Suite {
        /// One of: thm21, thm22, thm23, lemma22, thm31, problem1, gap, lp,
        /// all.
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 2020)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        count: usize,
        #[arg(long, default_value_t = 4)]
        max_arcs: usize,
    },
    /// Emit a deterministic generated artifact for a profile.
    Generate {
        /// One of: msharp-valuation, two-sided-separable, multi-sided,
        /// polymatroid.
        #[arg(long)]
        profile: String,
        #[arg(long, default_value_t = 2020)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mode = cli.output;
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            match mode {
                OutputMode::Json => {
                    println!(
                        "{}",
                        serde_json::to_string_pretty(&json!({ "error": format!("{err:#}") }))
                            .expect("error document serializes")
                    );
                }
                OutputMode::Human => eprintln!("error: {err:#}"),
            }
            ExitCode::from(2)
        }
    }
}

fn load_instance(path: &Option<PathBuf>) -> Result<Instance> {
    match path {
        Some(p) => read_instance(p),
        None => Ok(builtin::example1()),
    }
}

fn read_instance(path: &Path) -> Result<Instance> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))?;
    Instance::from_json(&text).map_err(|e| anyhow!("{e}"))
}

fn parse_rat_point(index: &Arc<IndexSet>, s: &str) -> Result<RatVec> {
    let mut vals: Vec<Option<Rat>> = vec![None; index.len()];
    for part in s.split(',') {
        let (name, value) = part
            .split_once('=')
            .ok_or_else(|| anyhow!("expected `arc=value`, found `{part}`"))?;
        let pos = index
            .position(name.trim())
            .ok_or_else(|| anyhow!("unknown arc `{}`", name.trim()))?;
        vals[pos] = Some(Rat::from_str(value.trim()).map_err(|e| anyhow!("{e}"))?);
    }
    let mut out = Vec::with_capacity(index.len());
    for (i, v) in vals.into_iter().enumerate() {
        out.push(v.ok_or_else(|| anyhow!("missing coordinate `{}`", index.name(i)))?);
    }
    RatVec::new(index.clone(), out).map_err(|e| anyhow!("{e}"))
}

fn parse_int_point(index: &Arc<IndexSet>, s: &str) -> Result<IntVec> {
    let rv = parse_rat_point(index, s)?;
    rv.to_int()
        .ok_or_else(|| anyhow!("outcome coordinates must be integers"))
}

/// Resolve `--function`: agent id, `w<id>`, or the outcome-space aggregate.
fn resolve_function(inst: &Instance, name: &str) -> Result<(String, FiniteIntFunction)> {
    if name == "aggregate" {
        return Ok((
            "aggregate".to_string(),
            inst.aggregate_function().map_err(|e| anyhow!("{e}"))?,
        ));
    }
    let agents = inst.graph.agents();
    let direct = agents.iter().find(|a| a.as_str() == name);
    let stripped = name
        .strip_prefix('w')
        .and_then(|rest| agents.iter().find(|a| a.as_str() == rest));
    match direct.or(stripped) {
        Some(agent) => Ok((format!("w{agent}"), inst.valuation(agent).table.clone())),
        None => bail!("no valuation named `{name}` (agents: {agents:?})"),
    }
}

fn emit(mode: OutputMode, doc: serde_json::Value, human: String) {
    match mode {
        OutputMode::Json => {
            println!(
                "{}",
                serde_json::to_string_pretty(&doc).expect("report serializes")
            );
        }
        OutputMode::Human => println!("{human}"),
    }
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Validate { instance } => {
            let inst = read_instance(&instance)?;
            let arcs = inst.graph.arcs().len();
            emit(
                cli.output,
                json!({
                    "valid": true,
                    "agents": inst.graph.agents(),
                    "arcs": arcs,
                    "constrained": inst.constraint.is_some(),
                }),
                format!(
                    "valid instance: {} agents, {arcs} arcs, constraint: {}",
                    inst.graph.agents().len(),
                    if inst.constraint.is_some() { "present" } else { "absent" },
                ),
            );
            Ok(0)
        }
        Command::Check {
            instance,
            function,
            constraint,
            property,
        } => {
            let inst = load_instance(&instance)?;
            run_check(cli.output, &inst, function.as_deref(), constraint, &property)
        }
        Command::Extension {
            instance,
            function,
            at,
        } => {
            let inst = load_instance(&instance)?;
            let (label, table) = resolve_function(&inst, &function)?;
            let x = parse_rat_point(table.index(), &at)?;
            let (value, witness) = concave_extension_eval(&table, &x).map_err(|e| anyhow!("{e}"))?;
            let facet = facet_set(&table, &x).map_err(|e| anyhow!("{e}"))?;
            emit(
                cli.output,
                json!({
                    "function": label,
                    "point": x,
                    "value": value,
                    "lottery": witness,
                    "facet_set": facet,
                }),
                format!(
                    "extension of {label} at {x:?} = {value}\n  lottery: {:?}\n  facet set: {:?}",
                    witness.support,
                    facet.iter().collect::<Vec<_>>()
                ),
            );
            Ok(0)
        }
        Command::Solve { instance } => {
            let inst = load_instance(&instance)?;
            let report = detect_gap(&inst).map_err(|e| anyhow!("{e}"))?;
            let human = format!(
                "integral optimum: {} at {:?}\nfractional optimum: {}\ngap: {}\n(integral {} ms, relaxation {} ms)",
                report.integral.value,
                report.integral.argmax,
                report
                    .fractional
                    .as_ref()
                    .map(|f| f.value.to_string())
                    .unwrap_or_else(|| "none".to_string()),
                report.gap,
                report.timings.integral_ms,
                report.timings.fractional_ms,
            );
            let doc = serde_json::to_value(&report)?;
            emit(cli.output, doc, human);
            Ok(u8::from(report.gap))
        }
        Command::Prices {
            instance,
            outcome,
            rents,
        } => {
            let inst = load_instance(&instance)?;
            let x = parse_int_point(inst.graph.arc_index(), &outcome)?;
            let search = if rents {
                tradenet::equilibrium::find_prices_with_rents(&inst, &x)
            } else {
                tradenet::equilibrium::find_arc_prices(&inst, &x)
            }
            .map_err(|e| anyhow!("{e}"))?;
            match search {
                PriceSearch::Found(ps) => {
                    let report =
                        tradenet::equilibrium::verify_ce(&inst, &x, &ps).map_err(|e| anyhow!("{e}"))?;
                    emit(
                        cli.output,
                        json!({"found": true, "prices": ps, "report": report}),
                        format!("supported: prices {:?}, rents {:?}", ps.prices, ps.rents),
                    );
                    Ok(0)
                }
                PriceSearch::Unsupported(refusal) => {
                    if cli.recheck {
                        if let tradenet::equilibrium::Refusal::Lp(cert) = &refusal {
                            reverify_certificate(&inst, cert).map_err(|e| anyhow!("{e}"))?;
                        }
                    }
                    emit(
                        cli.output,
                        json!({"found": false, "certificate": refusal}),
                        format!("unsupported: {refusal:?}"),
                    );
                    Ok(1)
                }
            }
        }
        Command::Certify { instance } => {
            let inst = load_instance(&instance)?;
            let result = certify_nonexistence(&inst).map_err(|e| anyhow!("{e}"))?;
            if cli.recheck {
                recheck_certify(&inst, &result)?;
            }
            match &result {
                CertifyResult::Exists { outcome, .. } => {
                    emit(
                        cli.output,
                        serde_json::to_value(&result)?,
                        format!("equilibrium exists at {outcome:?}"),
                    );
                    Ok(0)
                }
                CertifyResult::Certificate(cert) => {
                    emit(
                        cli.output,
                        serde_json::to_value(&result)?,
                        format!(
                            "no equilibrium: certificates cover {} outcomes",
                            cert.entries.len()
                        ),
                    );
                    Ok(1)
                }
            }
        }
        Command::PaperExample1 => run_example1(cli.output, cli.recheck),
        Command::Suite {
            suite,
            seed,
            count,
            max_arcs,
        } => run_suites(cli.output, &suite, SuiteConfig { seed, count, max_arcs }),
        Command::Generate { profile, seed } => {
            let profile = Profile::from_str(&profile).map_err(|e| anyhow!("{e}"))?;
            let generated = generate_instances(seed, profile);
            let doc = match &generated {
                tradenet::generate::Generated::Instance(inst) => {
                    serde_json::to_value(inst.to_doc())?
                }
                tradenet::generate::Generated::Valuation(f) => serde_json::to_value(f)?,
                tradenet::generate::Generated::Constraint(p) => serde_json::to_value(
                    tradenet::polymatroid::SetFunctionDoc::table_of(p.set_fn()),
                )?,
            };
            emit(cli.output, doc.clone(), serde_json::to_string_pretty(&doc)?);
            Ok(0)
        }
    }
}

fn run_check(
    mode: OutputMode,
    inst: &Instance,
    function: Option<&str>,
    constraint: bool,
    property: &str,
) -> Result<u8> {
    let (target, holds, counterexample): (String, bool, Option<serde_json::Value>) = if constraint {
        let p = inst
            .constraint
            .as_ref()
            .ok_or_else(|| anyhow!("instance has no constraint"))?;
        match property {
            "submodular" => match p.set_fn().is_submodular() {
                Ok(()) => ("constraint".to_string(), true, None),
                Err(v) => (
                    "constraint".to_string(),
                    false,
                    Some(json!({
                        "s": tradenet::polymatroid::subset_names(p.ground(), v.s),
                        "t": tradenet::polymatroid::subset_names(p.ground(), v.t),
                    })),
                ),
            },
            "monotone" => ("constraint".to_string(), p.set_fn().is_monotone(), None),
            other => bail!("property `{other}` does not apply to the constraint"),
        }
    } else {
        let name = function.ok_or_else(|| anyhow!("--function or --constraint is required"))?;
        let (label, table) = resolve_function(inst, name)?;
        let fn_check = |r: Result<(), tradenet::convexity::FnViolation>| match r {
            Ok(()) => (true, None),
            Err(v) => (false, Some(serde_json::to_value(&v).unwrap())),
        };
        let set_check = |r: Result<(), tradenet::convexity::ExchangeViolation>| match r {
            Ok(()) => (true, None),
            Err(v) => (false, Some(serde_json::to_value(&v).unwrap())),
        };
        let (holds, ce) = match property {
            "msharp-concave" => fn_check(is_msharp_concave_fn(&table)),
            "m-concave" => fn_check(is_m_concave_fn(&table)),
            "msharp-convex" => fn_check(is_msharp_convex_fn(&table)),
            "m-convex" => fn_check(is_m_convex_fn(&table)),
            "msharp-convex-set" => set_check(is_msharp_convex_set(&table.effective_domain())),
            "m-convex-set" => set_check(is_m_convex_set(&table.effective_domain())),
            other => bail!("unknown property `{other}`"),
        };
        (label, holds, ce)
    };
    emit(
        mode,
        json!({
            "target": target,
            "property": property,
            "holds": holds,
            "counterexample": counterexample,
        }),
        format!(
            "{target} {property}: {}{}",
            if holds { "holds" } else { "fails" },
            counterexample
                .as_ref()
                .map(|c| format!(" ({c})"))
                .unwrap_or_default()
        ),
    );
    Ok(u8::from(!holds))
}

fn recheck_certify(inst: &Instance, result: &CertifyResult) -> Result<()> {
    match result {
        CertifyResult::Exists { outcome, prices, .. } => {
            let report = tradenet::equilibrium::verify_ce(inst, outcome, prices)
                .map_err(|e| anyhow!("{e}"))?;
            if !report.verdict {
                bail!("claimed equilibrium failed re-verification");
            }
        }
        CertifyResult::Certificate(cert) => {
            for entry in &cert.entries {
                reverify_certificate(inst, &entry.arc_only).map_err(|e| anyhow!("{e}"))?;
                if let Some(r) = &entry.with_rents {
                    reverify_certificate(inst, r).map_err(|e| anyhow!("{e}"))?;
                }
            }
        }
    }
    Ok(())
}

fn run_example1(mode: OutputMode, recheck: bool) -> Result<u8> {
    let inst = builtin::example1();
    let w1_ok = is_msharp_concave_fn(&inst.valuation("1").table).is_ok();
    let w2_ok = is_msharp_concave_fn(&inst.valuation("2").table).is_ok();
    let constraint_ok = inst
        .constraint
        .as_ref()
        .map(|p| p.set_fn().is_submodular().is_ok())
        .unwrap_or(false);
    let solve = detect_gap(&inst).map_err(|e| anyhow!("{e}"))?;
    let certify = certify_nonexistence(&inst).map_err(|e| anyhow!("{e}"))?;
    if recheck {
        recheck_certify(&inst, &certify)?;
    }
    let covered = match &certify {
        CertifyResult::Certificate(c) => c.entries.len(),
        CertifyResult::Exists { .. } => 0,
    };
    let doc = json!({
        "instance": inst.to_doc(),
        "checks": {
            "w1_msharp_concave": w1_ok,
            "w2_msharp_concave": w2_ok,
            "constraint_submodular": constraint_ok,
        },
        "solve": solve,
        "certify": certify,
    });
    let human = format!(
        "valuations M♯-concave: w1 {w1_ok}, w2 {w2_ok}; constraint submodular: {constraint_ok}\n\
         integral optimum: {} at {:?}\nfractional optimum: {}\ngap: {}\n\
         equilibrium: {}",
        solve.integral.value,
        solve.integral.argmax,
        solve
            .fractional
            .as_ref()
            .map(|f| f.value.to_string())
            .unwrap_or_else(|| "none".to_string()),
        solve.gap,
        match &certify {
            CertifyResult::Exists { outcome, .. } => format!("exists at {outcome:?}"),
            CertifyResult::Certificate(_) =>
                format!("none; certificates cover {covered} outcomes"),
        }
    );
    emit(mode, doc, human);
    Ok(u8::from(solve.gap))
}

fn run_suites(mode: OutputMode, which: &str, cfg: SuiteConfig) -> Result<u8> {
    let reports: Vec<SuiteReport> = match which {
        "all" => suites::all_suites(cfg),
        "thm21" => vec![suites::suite_thm21_cor21(cfg)],
        "thm22" => vec![suites::suite_thm22(cfg)],
        "thm23" => vec![suites::suite_thm23(cfg)],
        "lemma22" => vec![suites::suite_lemma22(cfg)],
        "thm31" => vec![suites::suite_thm31(cfg)],
        "problem1" => vec![suites::suite_problem1(cfg)],
        "gap" => vec![suites::suite_gap_nonexistence(cfg)],
        "lp" => vec![suites::suite_lp(cfg)],
        other => bail!("unknown suite `{other}`"),
    };
    let all_passed = reports.iter().all(|r| r.passed());
    match mode {
        OutputMode::Json => {
            let doc: Vec<serde_json::Value> = reports
                .iter()
                .map(|r| {
                    json!({
                        "name": r.name,
                        "cases": r.cases,
                        "passed": r.passed(),
                        "failures": r.failures,
                        "notes": r.notes,
                    })
                })
                .collect();
            println!("{}", serde_json::to_string_pretty(&doc)?);
        }
        OutputMode::Human => {
            for r in &reports {
                println!(
                    "suite {}: {} cases, {}",
                    r.name,
                    r.cases,
                    if r.passed() { "PASS" } else { "FAIL" }
                );
                for f in &r.failures {
                    println!("  failure: {f}");
                }
                for n in &r.notes {
                    println!("  note: {n}");
                }
            }
        }
    }
    Ok(u8::from(!all_passed))
}
