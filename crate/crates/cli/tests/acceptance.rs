//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so the lines always reach the output.

use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use symcont::corpus::{self, run_corpus, CorpusRun};
use symcont::dsl::parse_constant;
use symcont::fuzz::{default_threads, run_theorem_parallel};
use symcont_core::checker::{check, default_points, interior_one_sided_limits, Certificate, Holds, Property, Verdict};
use symcont_core::limits::AsymptoticValue;
use symcont_core::oracle::{cross_validate, probe};
use symcont_core::theorems::{closure_suites, evaluate_instance, negative_controls, run_theorem, theorem_by_id, FuzzConfig, Instance};
use symcont_core::{FieldElement, PiecewiseFn};

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn constant(program: &str, text: &str) -> FieldElement {
    let p = corpus::load(program).unwrap();
    parse_constant(text, p.radicand.max(1)).unwrap()
}

fn verdict<'a>(run: &'a CorpusRun, program: &str, f: &str, at: &str, prop: Property) -> Result<&'a Verdict, String> {
    run.program(program).verdict(f, &constant(program, at), prop).ok_or_else(|| format!("{program}: no {prop} verdict for {f} at {at}"))
}

fn finite(n: i64) -> AsymptoticValue {
    AsymptoticValue::finite(FieldElement::from_int(n))
}

// ---------------------------------------------------------------- 1

fn corpus_matrix() -> Check {
    use Property::{Sc, Wc, Wsc};
    let start = Instant::now();
    let run = run_corpus();
    let elapsed = start.elapsed();
    ensure(run.errors.is_empty(), || format!("corpus errors: {:?}", run.errors))?;
    let table: &[(&str, &str, &str, Property, bool)] = &[
        ("jump_off_sequence", "f", "0", Sc, false),
        ("jump_off_sequence", "f", "0", Wc, true),
        ("jump_off_sequence", "f", "0", Wsc, true),
        ("jump_off_sequence", "f", "1", Wc, false),
        ("two_sequence_domain", "f", "0", Sc, false),
        ("two_sequence_domain", "f", "0", Wc, true),
        ("two_sequence_domain", "f", "0", Wsc, true),
        ("one_sided_sequences", "f", "0", Wc, true),
        ("one_sided_sequences", "f", "0", Wsc, false),
        ("sequence_domain", "f", "0", Wc, true),
        ("sequence_domain", "f", "0", Wsc, false),
        ("punctured_constant", "f", "0", Sc, true),
        ("punctured_constant", "f", "0", Wc, false),
        ("punctured_constant", "f", "0", Wsc, true),
        ("sum", "f", "0", Wsc, true),
        ("sum", "g", "0", Wsc, true),
        ("sum", "s", "0", Wsc, false),
        ("sum", "d", "0", Wsc, false),
        ("sum", "hi", "0", Wsc, false),
        ("sum", "lo", "0", Wsc, false),
        ("unbounded_product", "p", "0", Wsc, false),
        ("bounded_product", "f", "0", Wsc, true),
        ("bounded_product", "g", "0", Wsc, true),
        ("bounded_product", "p", "0", Wsc, false),
        ("composition", "f", "0", Wsc, true),
        ("composition", "h", "0", Wsc, false),
        ("power_family", "lim", "1", Wsc, false),
    ];
    for &(prog, f, at, prop, want) in table {
        let v = verdict(&run, prog, f, at, prop)?;
        ensure(v.holds.as_bool() == Some(want), || format!("{prog}: {f} {prop} at {at} is {}", v.holds.name()))?;
    }
    for at in ["1", "-1/2", "rt(2)", "-rt(2)/3"] {
        for prop in Property::ALL {
            let v = verdict(&run, "two_sequence_domain", "f", at, prop)?;
            ensure(v.holds == Holds::True && v.is_vacuous(), || format!("two_sequence_domain: {prop} at {at} not vacuously true"))?;
        }
    }
    let bounded: &[(&str, &str, Option<bool>)] =
        &[("unbounded_product", "g", Some(false)), ("bounded_product", "f", Some(true)), ("bounded_product", "g", Some(true))];
    for &(prog, f, want) in bounded {
        let b = run.program(prog).bound(f, &FieldElement::zero()).ok_or_else(|| format!("{prog}: no bound for {f}"))?;
        ensure(b.is_bounded() == want, || format!("{prog}: {f} locally bounded is {:?}", b.is_bounded()))?;
    }
    let h = verdict(&run, "composition", "h", "0", Wsc)?;
    ensure(h.exact_gap() == Some(finite(2)), || format!("composition difference limit {:?}", h.exact_gap()))?;
    let diffs = corpus::diff(&corpus::bundled_golden()?, &run.golden());
    ensure(diffs.is_empty(), || format!("golden diffs: {diffs:?}"))?;
    ensure(elapsed < Duration::from_secs(5), || format!("corpus took {elapsed:?}"))?;
    Ok(format!("{} table entries and golden file match, corpus ran in {:.0?}", table.len() + 16 + bounded.len(), elapsed))
}

// ---------------------------------------------------------------- 2

fn certificate_exactness() -> Check {
    let run = run_corpus();
    let sc = verdict(&run, "jump_off_sequence", "f", "0", Property::Sc)?;
    ensure(sc.exact_gap() == Some(finite(2)), || format!("SC gap {:?}", sc.exact_gap()))?;
    let wsc = verdict(&run, "sequence_domain", "f", "0", Property::Wsc)?;
    let Certificate::PatternTable(rows) = &wsc.certificate else {
        return Err(format!("WSC certificate {:?}", wsc.certificate));
    };
    let wsc_rows = rows.len();
    ensure(wsc_rows > 0 && rows.iter().all(|r| r.limit == finite(1)), || format!("pattern limits {:?}", rows.iter().map(|r| r.limit.to_string()).collect::<Vec<_>>()))?;
    let h = verdict(&run, "composition", "h", "0", Property::Wsc)?;
    let Certificate::PatternTable(rows) = &h.certificate else {
        return Err("composition certificate is not a pattern table".into());
    };
    ensure(h.exact_gap() == Some(finite(2)), || format!("composition gap {:?}", h.exact_gap()))?;
    Ok(format!("SC gap 2, {wsc_rows} WSC pattern limit(s) equal 1, composition difference limit 2 over {} pattern(s)", rows.len()))
}

// ---------------------------------------------------------------- 3

fn closure_fuzz() -> Check {
    let start = Instant::now();
    let cfg = FuzzConfig::with_seed(0).until_hits(1000, 50_000);
    let threads = default_threads();
    let mut lines = Vec::new();
    for spec in closure_suites() {
        let r = run_theorem_parallel(&spec, &cfg, threads);
        ensure(r.premise_hits >= 1000, || format!("{}: only {} premise hits in {} trials", r.id, r.premise_hits, r.trials))?;
        ensure(r.violations.is_empty(), || format!("{}: violation {}", r.id, r.violations[0].instance.describe()))?;
        ensure(r.hit_rate() > 0.01, || format!("{}: hit rate {:.3}", r.id, r.hit_rate()))?;
        lines.push(format!("{} {}/{}", r.id, r.premise_hits, r.trials));
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(300), || format!("fuzzing took {elapsed:?}"))?;
    Ok(format!("0 violations, {} in {:.1?}", lines.join(", "), elapsed))
}

// ---------------------------------------------------------------- 4

fn negative_controls_mined() -> Check {
    let cfg = FuzzConfig::with_seed(0);
    let mut found = Vec::new();
    for spec in negative_controls() {
        let r = run_theorem_parallel(&spec, &cfg, default_threads());
        ensure(r.trials <= 1000 && !r.violations.is_empty(), || format!("{}: no violation in {} trials", r.id, r.trials))?;
        found.push(format!("{} {}", r.id, r.violations.len()));
    }
    let p = |name: &str| corpus::load(name).unwrap();
    let pair = |name: &str, f: &str, g: &str| {
        let prog = p(name);
        Instance::pair(FieldElement::zero(), prog.function(f).unwrap().clone(), prog.function(g).unwrap().clone())
    };
    let cases = [
        ("sum-weak", pair("sum", "f", "g")),
        ("product-unbounded", pair("unbounded_product", "f", "g")),
        ("product-weak", pair("bounded_product", "f", "g")),
        ("composition-continuous", pair("composition", "f", "g")),
    ];
    for (id, inst) in &cases {
        let spec = theorem_by_id(id).unwrap();
        let ev = evaluate_instance(&spec, inst);
        ensure(ev.premises == Holds::True, || format!("{id}: premises {:?} ({:?})", ev.premises, ev.blocking))?;
        ensure(ev.is_violation(), || format!("{id}: bundled counterexample not a violation"))?;
    }
    Ok(format!("violations per 1000 trials: {}; 4 bundled counterexamples accepted", found.join(", ")))
}

// ---------------------------------------------------------------- 5

fn oracle_concordance() -> Check {
    let run = run_corpus();
    let mut n = 0;
    for (name, prog) in &run.programs {
        for v in &prog.verdicts {
            let c = cross_validate(&v.f, &v.verdict, 100_000);
            ensure(c.consistent, || format!("{name}: {} {} at {}: {}", v.function, v.verdict.property, v.verdict.point, c.detail))?;
            n += 1;
        }
    }
    let claims: [(&str, Property, f64); 4] =
        [("jump_off_sequence", Property::Sc, 2.0), ("one_sided_sequences", Property::Wsc, 1.0), ("sequence_domain", Property::Wsc, 1.0), ("punctured_constant", Property::Wc, 1.0)];
    let mut gaps = Vec::new();
    for (name, prop, exact) in claims {
        let p = corpus::load(name).unwrap();
        let r = probe(p.function("f").unwrap(), &FieldElement::zero(), prop, 100_000);
        ensure(r.refutation.is_some() && (r.gap - exact).abs() < 1e-3, || format!("{name}: {prop} numeric gap {} vs {exact}", r.gap))?;
        gaps.push(format!("{:.6}", r.gap));
    }
    Ok(format!("{n} verdicts cross-validated at budget 1e5; oracle gaps {}", gaps.join(", ")))
}

// ---------------------------------------------------------------- 6

fn vacuity() -> Check {
    let mut points: Vec<(&str, &str)> = Vec::new();
    for s in ["1", "-1", "1/2", "-1/2", "1/3", "-1/3", "rt(2)", "-rt(2)", "rt(2)/2", "-rt(2)/2", "rt(2)/3", "-rt(2)/3"] {
        points.push(("two_sequence_domain", s));
    }
    for s in ["1", "1/2", "1/3", "rt(2)", "rt(2)/2", "rt(2)/5", "-rt(2)", "-rt(2)/4"] {
        points.push(("sequence_domain", s));
    }
    for &(name, s) in &points {
        let p = corpus::load(name).unwrap();
        let f = p.function("f").unwrap();
        let a = constant(name, s);
        ensure(f.domain().contains(&a), || format!("{name}: {s} not in the domain"))?;
        for prop in Property::ALL {
            let v = check(f, &a, prop).map_err(|e| e.to_string())?;
            ensure(v.holds == Holds::True && v.is_vacuous(), || format!("{name}: {prop} at {s} is {} ({:?})", v.holds.name(), v.certificate))?;
        }
    }
    Ok(format!("{} isolated points, all three properties vacuously true", points.len()))
}

// ---------------------------------------------------------------- 7

fn one_sided_consistency(f: &PiecewiseFn, a: &FieldElement) -> Result<bool, String> {
    let Some((left, right)) = interior_one_sided_limits(f, a).map_err(|e| e.to_string())? else {
        return Ok(false);
    };
    if left.is_finite() != Some(true) || right.is_finite() != Some(true) {
        return Ok(false);
    }
    let equal = left.add(&right.neg()).is_zero();
    let v = check(f, a, Property::Sc).map_err(|e| e.to_string())?;
    ensure(equal.is_some() && v.holds.as_bool() == equal, || format!("SC {} at {a} with one-sided limits {left} and {right}", v.holds.name()))?;
    Ok(true)
}

fn random_point(rng: &mut ChaCha8Rng, radicand: u32) -> FieldElement {
    let q = rng.gen_range(1..=12);
    let p = rng.gen_range(-3 * q..=3 * q);
    if radicand > 1 && rng.gen_bool(0.5) {
        FieldElement::quadratic((p, q), (rng.gen_range(-q..=q), q), radicand).unwrap()
    } else {
        FieldElement::from_ratio(p, q)
    }
}

fn lemma_consistency() -> Check {
    let mut fns: Vec<(String, PiecewiseFn)> = Vec::new();
    for fx in corpus::FIXTURES {
        let p = corpus::load(fx.name).unwrap();
        for (n, f) in &p.functions {
            if f.domain().has_continuum() {
                fns.push((format!("{}:{n}", fx.name), f.clone()));
            }
        }
    }
    let mut special = 0;
    for (name, f) in &fns {
        let mut pts = default_points(f);
        pts.extend(f.special_points());
        for a in &pts {
            if one_sided_consistency(f, a).map_err(|e| format!("{name}: {e}"))? {
                special += 1;
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut fuzzed = 0;
    let mut tries = 0;
    while fuzzed < 1000 {
        tries += 1;
        ensure(tries < 20_000, || format!("only {fuzzed} usable interior points"))?;
        let (name, f) = &fns[rng.gen_range(0..fns.len())];
        let a = random_point(&mut rng, f.radicand());
        if one_sided_consistency(f, &a).map_err(|e| format!("{name}: {e}"))? {
            fuzzed += 1;
        }
    }
    Ok(format!("{} continuum functions, {special} special points and {fuzzed} fuzzed interior points agree", fns.len()))
}

fn main() -> ExitCode {
    let sequential_matches = || {
        let spec = theorem_by_id("sum-sc").unwrap();
        let cfg = FuzzConfig { trials: 50, max_trials: 50, ..FuzzConfig::with_seed(0) };
        run_theorem(&spec, &cfg) == run_theorem_parallel(&spec, &cfg, default_threads())
    };
    assert!(sequential_matches(), "parallel fuzzing diverges from the sequential runner");
    type Criterion = (&'static str, fn() -> Check);
    let criteria: [Criterion; 7] = [
        ("corpus verdict matrix", corpus_matrix),
        ("certificate exactness", certificate_exactness),
        ("closure fuzz suites", closure_fuzz),
        ("negative controls", negative_controls_mined),
        ("oracle concordance", oracle_concordance),
        ("vacuity", vacuity),
        ("one-sided limit consistency", lemma_consistency),
    ];
    let mut failed = 0;
    for (i, (title, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = panic::catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            Err(e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_else(|| "panic".into()))
        });
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("criterion {}: PASS  {title} ({secs:.1}s): {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL  {title} ({secs:.1}s): {why}", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
