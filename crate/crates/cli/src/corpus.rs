//! Bundled example programs and their golden verdicts.

use std::collections::BTreeMap;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use symcont_core::checker::{check, default_points, Holds, Verdict};
use symcont_core::func::{locally_bounded_at, LocalBound, PiecewiseFn};
use symcont_core::theorems::{uniform_limit_check, RelationCase, UniformLimitReport};
use symcont_core::FieldElement;

use crate::dsl::{parse_program, ParseError, Program};
use crate::report::{self, UniformRecord, VerdictRecord};

pub struct Fixture {
    pub name: &'static str,
    pub source: &'static str,
}

macro_rules! fixture {
    ($name:literal) => {
        Fixture { name: $name, source: include_str!(concat!("../corpus/", $name, ".cont")) }
    };
}

pub const FIXTURES: &[Fixture] = &[
    fixture!("jump_off_sequence"),
    fixture!("two_sequence_domain"),
    fixture!("one_sided_sequences"),
    fixture!("sequence_domain"),
    fixture!("punctured_constant"),
    fixture!("sum"),
    fixture!("unbounded_product"),
    fixture!("bounded_product"),
    fixture!("composition"),
    fixture!("power_family"),
];

const GOLDEN: &str = include_str!("../corpus/golden.json");

pub fn fixture(name: &str) -> Option<&'static Fixture> {
    FIXTURES.iter().find(|f| f.name == name)
}

pub fn load(name: &str) -> Result<Program, String> {
    let fx = fixture(name).ok_or_else(|| format!("no fixture {name}"))?;
    parse_program(fx.source).map_err(|e: ParseError| format!("{name}.cont:{e}"))
}

pub fn golden_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("corpus").join("golden.json")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub function: String,
    pub locally_bounded: String,
    pub point: String,
    pub verdicts: Vec<VerdictRecord>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ProgramRecord {
    pub checks: Vec<CheckRecord>,
    pub uniform: Vec<UniformRecord>,
}

pub type Golden = BTreeMap<String, ProgramRecord>;

/// A verdict produced by a `check` directive, with the function it is about.
#[derive(Clone, Debug)]
pub struct CheckedVerdict {
    pub function: String,
    pub f: PiecewiseFn,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, Default)]
pub struct ProgramRun {
    pub record: ProgramRecord,
    pub verdicts: Vec<CheckedVerdict>,
    pub bounds: Vec<(String, FieldElement, LocalBound)>,
    pub uniform: Vec<UniformLimitReport>,
    pub errors: Vec<String>,
}

impl ProgramRun {
    pub fn any_unknown(&self) -> bool {
        self.verdicts.iter().any(|v| v.verdict.holds == Holds::Unknown) || self.uniform.iter().any(|u| u.premise() == Holds::Unknown || u.limit_verdict.as_ref().is_ok_and(|v| v.holds == Holds::Unknown))
    }

    pub fn verdict(&self, function: &str, point: &FieldElement, property: symcont_core::checker::Property) -> Option<&Verdict> {
        self.verdicts.iter().find(|v| v.function == function && &v.verdict.point == point && v.verdict.property == property).map(|v| &v.verdict)
    }

    pub fn bound(&self, function: &str, point: &FieldElement) -> Option<&LocalBound> {
        self.bounds.iter().find(|(n, p, _)| n == function && p == point).map(|(_, _, b)| b)
    }
}

fn bound_name(b: &LocalBound) -> &'static str {
    match b.is_bounded() {
        Some(true) => "true",
        Some(false) => "false",
        None => "unknown",
    }
}

/// Run every directive of a program.
pub fn run_program(p: &Program) -> ProgramRun {
    let mut run = ProgramRun::default();
    for c in &p.checks {
        let Some(f) = p.function(&c.function) else {
            run.errors.push(format!("line {}: unknown function {}", c.line, c.function));
            continue;
        };
        let bound = locally_bounded_at(f, &c.point).unwrap_or_else(|e| LocalBound::Unknown(e.to_string()));
        let mut verdicts = Vec::new();
        for &prop in &c.properties {
            match check(f, &c.point, prop) {
                Ok(v) => {
                    verdicts.push(report::verdict(&v));
                    run.verdicts.push(CheckedVerdict { function: c.function.clone(), f: f.clone(), verdict: v });
                }
                Err(e) => run.errors.push(format!("line {}: {} {} at {}: {e}", c.line, c.function, prop.name(), c.point)),
            }
        }
        run.record.checks.push(CheckRecord { function: c.function.clone(), locally_bounded: bound_name(&bound).into(), point: c.point.render(), verdicts });
        run.bounds.push((c.function.clone(), c.point.clone(), bound));
    }
    for u in &p.uniform {
        let (Some(fam), Some(lim)) = (p.family(&u.family), p.function(&u.limit)) else {
            run.errors.push(format!("line {}: unknown family or function", u.line));
            continue;
        };
        let bounds = match u.bounds() {
            Ok(b) => b,
            Err(e) => {
                run.errors.push(format!("line {}: {e}", u.line));
                continue;
            }
        };
        let r = uniform_limit_check(fam, lim, &bounds, &u.point, u.upto);
        run.record.uniform.push(report::uniform(&r));
        run.uniform.push(r);
    }
    run
}

pub struct CorpusRun {
    pub programs: BTreeMap<String, ProgramRun>,
    pub errors: Vec<String>,
}

impl CorpusRun {
    pub fn golden(&self) -> Golden {
        self.programs.iter().map(|(k, r)| (k.clone(), r.record.clone())).collect()
    }

    pub fn program(&self, name: &str) -> &ProgramRun {
        &self.programs[name]
    }

    pub fn any_unknown(&self) -> bool {
        self.programs.values().any(ProgramRun::any_unknown)
    }
}

pub fn run_corpus() -> CorpusRun {
    let mut programs = BTreeMap::new();
    let mut errors = Vec::new();
    for fx in FIXTURES {
        match load(fx.name) {
            Ok(p) => {
                let run = run_program(&p);
                errors.extend(run.errors.iter().map(|e| format!("{}: {e}", fx.name)));
                programs.insert(fx.name.to_string(), run);
            }
            Err(e) => errors.push(e),
        }
    }
    CorpusRun { programs, errors }
}

pub fn bundled_golden() -> Result<Golden, String> {
    serde_json::from_str(GOLDEN).map_err(|e| format!("golden.json: {e}"))
}

pub fn golden_json(g: &Golden) -> String {
    report::to_json(g) + "\n"
}

/// Human-readable differences between a golden table and a fresh run.
pub fn diff(expected: &Golden, actual: &Golden) -> Vec<String> {
    let mut out = Vec::new();
    for (name, want) in expected {
        let Some(got) = actual.get(name) else {
            out.push(format!("{name}: missing from run"));
            continue;
        };
        if want.checks.len() != got.checks.len() {
            out.push(format!("{name}: {} check records, golden has {}", got.checks.len(), want.checks.len()));
        }
        for (w, g) in want.checks.iter().zip(&got.checks) {
            let at = format!("{name}: {} at {}", w.function, w.point);
            if w.function != g.function || w.point != g.point {
                out.push(format!("{at}: run checks {} at {}", g.function, g.point));
                continue;
            }
            if w.locally_bounded != g.locally_bounded {
                out.push(format!("{at}: locally bounded {} (golden {})", g.locally_bounded, w.locally_bounded));
            }
            for (wv, gv) in w.verdicts.iter().zip(&g.verdicts) {
                if wv != gv {
                    out.push(format!("{at}: {} is {} gap {:?} (golden {} gap {:?})", wv.property, gv.holds, gv.exact_gap, wv.holds, wv.exact_gap));
                }
            }
            if w.verdicts.len() != g.verdicts.len() {
                out.push(format!("{at}: verdict count changed"));
            }
        }
        if want.uniform != got.uniform {
            out.push(format!("{name}: uniform-limit record changed"));
        }
    }
    for name in actual.keys().filter(|k| !expected.contains_key(*k)) {
        out.push(format!("{name}: not in golden table"));
    }
    out
}

/// Function-level memberships expected for the single-function programs,
/// in SC, WC, WSC order.
pub const RELATION_ROWS: &[(&str, [bool; 3])] = &[
    ("jump_off_sequence", [false, false, true]),
    ("two_sequence_domain", [false, true, true]),
    ("one_sided_sequences", [false, false, false]),
    ("sequence_domain", [false, true, false]),
    ("punctured_constant", [true, false, true]),
];

/// Relation cases for the single-function programs, tested at their
/// default points plus every checked point.
pub fn relation_cases() -> Result<Vec<RelationCase>, String> {
    RELATION_ROWS
        .iter()
        .map(|(name, row)| {
            let p = load(name)?;
            let f = p.function("f").ok_or_else(|| format!("{name}: no f"))?.clone();
            let mut points = default_points(&f);
            for c in &p.checks {
                if !points.contains(&c.point) {
                    points.push(c.point.clone());
                }
            }
            Ok(RelationCase { name: (*name).into(), f, points: Some(points), expected: Some(*row) })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_parse() {
        for fx in FIXTURES {
            let p = load(fx.name).unwrap();
            assert!(!p.checks.is_empty(), "{}", fx.name);
        }
    }

    #[test]
    fn diff_reports_a_flipped_verdict() {
        let run = run_corpus();
        let g = run.golden();
        assert!(diff(&g, &g).is_empty());
        let mut bad = g.clone();
        let rec = bad.get_mut("punctured_constant").unwrap();
        rec.checks[0].verdicts[0].holds = "false".into();
        let d = diff(&bad, &g);
        assert_eq!(d.len(), 1, "{d:?}");
    }
}
