use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use symcont::corpus::{self, CheckRecord};
use symcont::dsl::{parse_constant, parse_program, parse_properties, Program};
use symcont::fuzz::{default_threads, run_theorem_parallel};
use symcont::report;
use symcont_core::checker::{check, classify, Holds, Property};
use symcont_core::oracle::probe;
use symcont_core::theorems::{closure_suites, negative_controls, relation_suite, theorem_by_id, FuzzConfig};
use symcont_core::FieldElement;

// Writes to stdout that ignore a closed pipe.
macro_rules! out {
    ($($t:tt)*) => {{
        use std::io::Write;
        let _ = write!(std::io::stdout(), $($t)*);
    }};
}

macro_rules! outln {
    ($($t:tt)*) => {{
        use std::io::Write;
        let _ = writeln!(std::io::stdout(), $($t)*);
    }};
}

const EXIT_USAGE: u8 = 2;
const EXIT_UNKNOWN: u8 = 3;
const EXIT_FAILURE: u8 = 4;

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Parser)]
#[command(name = "symcont", version, about = "Exact symmetric-continuity checks for piecewise functions")]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    #[arg(long, default_value_t = 0, global = true)]
    seed: u64,
    /// Largest sequence index used by the numeric oracle.
    #[arg(long, default_value_t = 10_000, global = true)]
    budget: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Target {
    /// Program file (`.cont`).
    file: PathBuf,
    /// Function to check; without it every `check` directive runs.
    #[arg(long = "fn")]
    function: Option<String>,
    /// Point, as a constant expression such as `0`, `1/3` or `rt(2)/2`.
    #[arg(long, allow_hyphen_values = true)]
    at: Option<String>,
    /// `sc`, `wc`, `wsc`, a comma list of them, or `all`.
    #[arg(long, default_value = "all")]
    prop: String,
}

#[derive(Subcommand)]
enum Command {
    /// Decide properties at a point and print verdicts with certificates.
    Check(Target),
    /// Decide all three properties at a function's special points.
    Classify(Target),
    /// Run the bundled examples and compare with the golden verdicts.
    Corpus {
        /// Rewrite the golden file from this run.
        #[arg(long)]
        bless: bool,
    },
    /// Check the inclusion diagram between the three properties.
    Relations,
    /// Fuzz closure statements under their premises.
    Fuzz {
        #[arg(long, conflicts_with = "all", required_unless_present = "all")]
        theorem: Option<String>,
        /// Every closure suite followed by every negative control.
        #[arg(long)]
        all: bool,
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        /// Keep going until this many trials satisfy the premises.
        #[arg(long, default_value_t = 0)]
        min_hits: u64,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Run the floating-point oracle at a point.
    Probe(Target),
}

struct Fail(u8, String);

fn usage(msg: impl Into<String>) -> Fail {
    Fail(EXIT_USAGE, msg.into())
}

fn load(path: &Path) -> Result<Program, Fail> {
    let text = fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    parse_program(&text).map_err(|e| usage(format!("{}:{e}", path.display())))
}

fn point(p: &Program, t: &Target) -> Result<Option<FieldElement>, Fail> {
    t.at.as_deref().map(|s| parse_constant(s, p.radicand.max(1)).map_err(|e| usage(format!("--at: {}", e.msg)))).transpose()
}

fn properties(t: &Target) -> Result<Vec<Property>, Fail> {
    parse_properties(&t.prop).ok_or_else(|| usage(format!("--prop: expected sc, wc, wsc or all, got {}", t.prop)))
}

fn function<'a>(p: &'a Program, t: &Target) -> Result<&'a symcont_core::func::PiecewiseFn, Fail> {
    let name = t.function.as_deref().ok_or_else(|| usage("--fn is required"))?;
    p.function(name).ok_or_else(|| usage(format!("no function named {name}")))
}

fn emit_json<T: serde::Serialize>(r: &T) {
    outln!("{}", report::to_json(r));
}

fn cmd_check(cli: &Cli, t: &Target) -> Result<u8, Fail> {
    let p = load(&t.file)?;
    let props = properties(t)?;
    let mut unknown = false;
    let records: Vec<CheckRecord> = match (&t.function, point(&p, t)?) {
        (Some(_), Some(a)) => {
            let f = function(&p, t)?;
            let mut verdicts = Vec::new();
            for prop in props {
                let v = check(f, &a, prop).map_err(|e| Fail(EXIT_UNKNOWN, e.to_string()))?;
                unknown |= v.holds == Holds::Unknown;
                if cli.format == Format::Text {
                    outln!("{}", report::verdict_text(&v));
                }
                verdicts.push(report::verdict(&v));
            }
            let bound = symcont_core::func::locally_bounded_at(f, &a).ok().and_then(|b| b.is_bounded());
            let locally_bounded = bound.map_or("unknown", |b| if b { "true" } else { "false" }).to_string();
            vec![CheckRecord { function: t.function.clone().unwrap_or_default(), locally_bounded, point: a.render(), verdicts }]
        }
        (None, Some(_)) => return Err(usage("--at needs --fn")),
        (name, None) => {
            let mut q = p.clone();
            if let Some(n) = name {
                function(&p, t)?;
                q.checks.retain(|c| &c.function == n);
            }
            q.uniform.clear();
            let run = corpus::run_program(&q);
            if let Some(e) = run.errors.first() {
                return Err(Fail(EXIT_UNKNOWN, e.clone()));
            }
            unknown = run.any_unknown();
            if cli.format == Format::Text {
                for v in &run.verdicts {
                    outln!("{}: {}", v.function, report::verdict_text(&v.verdict));
                }
            }
            run.record.checks
        }
    };
    if cli.format == Format::Json {
        if records.len() == 1 {
            emit_json(&records[0]);
        } else {
            emit_json(&records);
        }
    }
    Ok(if unknown { EXIT_UNKNOWN } else { 0 })
}

fn cmd_classify(cli: &Cli, t: &Target) -> Result<u8, Fail> {
    let p = load(&t.file)?;
    let f = function(&p, t)?;
    let pts = point(&p, t)?.map(|a| vec![a]);
    let rows = classify(f, pts.as_deref()).map_err(|e| Fail(EXIT_UNKNOWN, e.to_string()))?;
    let unknown = rows.iter().any(|r| [&r.sc, &r.wc, &r.wsc].iter().any(|v| v.holds == Holds::Unknown));
    match cli.format {
        Format::Json => emit_json(&rows.iter().map(report::point_verdicts).collect::<Vec<_>>()),
        Format::Text => {
            outln!("{:<16} {:<8} {:<8} {:<8}", "point", "sc", "wc", "wsc");
            for r in &rows {
                outln!("{:<16} {:<8} {:<8} {:<8}", r.point.to_string(), r.sc.holds.name(), r.wc.holds.name(), r.wsc.holds.name());
            }
        }
    }
    Ok(if unknown { EXIT_UNKNOWN } else { 0 })
}

fn cmd_corpus(cli: &Cli, bless: bool) -> Result<u8, Fail> {
    let run = corpus::run_corpus();
    let actual = run.golden();
    if bless {
        let path = corpus::golden_path();
        fs::write(&path, corpus::golden_json(&actual)).map_err(|e| Fail(EXIT_FAILURE, format!("{}: {e}", path.display())))?;
        eprintln!("wrote {}", path.display());
    }
    let expected = corpus::bundled_golden().map_err(|e| Fail(EXIT_FAILURE, e))?;
    let diffs = if bless { Vec::new() } else { corpus::diff(&expected, &actual) };
    let checks: usize = actual.values().map(|r| r.checks.iter().map(|c| c.verdicts.len()).sum::<usize>()).sum();
    let ok = diffs.is_empty() && run.errors.is_empty();
    match cli.format {
        Format::Json => emit_json(&serde_json::json!({ "diffs": diffs, "errors": run.errors, "passed": ok, "programs": actual, "verdicts": checks })),
        Format::Text => {
            for (name, r) in &actual {
                let row: Vec<String> = r.checks.iter().map(|c| format!("{}@{}[{}]", c.function, c.point, c.verdicts.iter().map(|v| format!("{}={}", v.property, v.holds)).collect::<Vec<_>>().join(" "))).collect();
                outln!("{name:<22} {}", row.join("  "));
            }
            for e in run.errors.iter().chain(&diffs) {
                outln!("  {e}");
            }
            outln!("corpus: {} programs, {checks} verdicts, {} diffs: {}", actual.len(), diffs.len(), if ok { "pass" } else { "FAIL" });
        }
    }
    Ok(if !ok {
        EXIT_FAILURE
    } else if run.any_unknown() {
        EXIT_UNKNOWN
    } else {
        0
    })
}

fn cmd_relations(cli: &Cli) -> Result<u8, Fail> {
    let cases = corpus::relation_cases().map_err(|e| Fail(EXIT_FAILURE, e))?;
    let r = relation_suite(&cases);
    match cli.format {
        Format::Json => emit_json(&report::relations(&r)),
        Format::Text => {
            outln!("{:<22} {:<8} {:<8} {:<8}", "function", "sc", "wc", "wsc");
            for m in &r.memberships {
                outln!("{:<22} {:<8} {:<8} {:<8}", m.name, m.sc.name(), m.wc.name(), m.wsc.name());
            }
            for i in &r.items {
                outln!("{:<5} {}{}", if i.holds { "ok" } else { "FAIL" }, i.label, i.witness.as_ref().map_or(String::new(), |w| format!(" ({w})")));
            }
            for e in r.mismatches.iter().chain(&r.errors) {
                outln!("  {e}");
            }
        }
    }
    Ok(if r.passed() { 0 } else { EXIT_FAILURE })
}

fn cmd_fuzz(cli: &Cli, theorem: Option<&str>, all: bool, trials: u64, min_hits: u64, threads: Option<usize>) -> Result<u8, Fail> {
    let specs = if all {
        closure_suites().into_iter().chain(negative_controls()).collect()
    } else {
        let id = theorem.unwrap_or_default();
        vec![theorem_by_id(id).ok_or_else(|| usage(format!("unknown theorem id {id}")))?]
    };
    let cfg = FuzzConfig { trials, ..FuzzConfig::with_seed(cli.seed).until_hits(min_hits, trials.max(min_hits.saturating_mul(50))) };
    let threads = threads.unwrap_or_else(default_threads);
    let reports: Vec<_> = specs.iter().map(|s| run_theorem_parallel(s, &cfg, threads)).collect();
    match cli.format {
        Format::Json => emit_json(&reports.iter().map(report::theorem).collect::<Vec<_>>()),
        Format::Text => {
            out!("{}", report::theorem_table(&reports));
            for r in &reports {
                for v in r.violations.iter().take(1) {
                    outln!("\n{} counterexample (trial {}, {} shrink steps), {} fails:", r.id, v.trial, v.shrink_steps, v.construction.name());
                    outln!("{}", v.instance.describe());
                    outln!("{}", report::verdict_text(&v.verdict));
                }
            }
        }
    }
    Ok(if reports.iter().all(|r| r.passed()) { 0 } else { EXIT_FAILURE })
}

fn cmd_probe(cli: &Cli, t: &Target) -> Result<u8, Fail> {
    let p = load(&t.file)?;
    let f = function(&p, t)?;
    let a = point(&p, t)?.ok_or_else(|| usage("--at is required"))?;
    let reports: Vec<_> = properties(t)?.into_iter().map(|prop| probe(f, &a, prop, cli.budget)).collect();
    match cli.format {
        Format::Json => emit_json(&reports.iter().map(report::probe).collect::<Vec<_>>()),
        Format::Text => {
            for r in &reports {
                let verdict = if r.refutation.is_some() { "refuted" } else { "not refuted" };
                outln!("{} at {}: numeric gap {:.6} over {} samples ({verdict})", r.property.name(), r.point, r.gap, r.samples_used);
            }
        }
    }
    Ok(0)
}

fn run(cli: &Cli) -> Result<u8, Fail> {
    match &cli.command {
        Command::Check(t) => cmd_check(cli, t),
        Command::Classify(t) => cmd_classify(cli, t),
        Command::Corpus { bless } => cmd_corpus(cli, *bless),
        Command::Relations => cmd_relations(cli),
        Command::Fuzz { theorem, all, trials, min_hits, threads } => cmd_fuzz(cli, theorem.as_deref(), *all, *trials, *min_hits, *threads),
        Command::Probe(t) => cmd_probe(cli, t),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(Fail(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
