//! Invariants checked over the bundled programs and generated functions.

use proptest::prelude::*;

use symcont::corpus::{self, FIXTURES};
use symcont::dsl::parse_program;
use symcont::report::{self, VerdictRecord};
use symcont_core::checker::{check, enumerate_patterns, pattern_limit, Property};
use symcont_core::func::PiecewiseFn;
use symcont_core::sets::{s_space, HSetDescriptor};
use symcont_core::theorems::{generate, trial_rng, FuzzConfig, Profile};
use symcont_core::FieldElement;

/// Every function of every bundled program with the points it is checked at.
fn checked_points() -> Vec<(String, PiecewiseFn, FieldElement)> {
    let mut out = Vec::new();
    for fx in FIXTURES {
        let p = corpus::load(fx.name).unwrap();
        for c in &p.checks {
            out.push((format!("{}:{}", fx.name, c.function), p.function(&c.function).unwrap().clone(), c.point.clone()));
        }
    }
    out
}

#[test]
fn patterns_cover_ten_thousand_steps_per_point() {
    for (name, f, a) in checked_points() {
        let patterns = enumerate_patterns(&f, &a).unwrap();
        let s = s_space(&a, f.domain()).unwrap();
        let streams = s.classes().len() + usize::from(s.is_generic());
        if s.is_empty() || streams == 0 {
            continue;
        }
        // Patterns describe the germ: only steps below every pattern radius.
        let rho = patterns.iter().filter_map(|p| p.hset.radius().cloned()).chain(s.radius().cloned()).min();
        let steps = s.clone().with_radius(rho).sample(10_000usize.div_ceil(streams), f.radicand());
        assert!(steps.len() >= 10_000, "{name}");
        for h in steps {
            let bp = f.branch_index(&(&a + &h)).unwrap();
            let bm = f.branch_index(&(&a - &h)).unwrap();
            assert!(
                patterns.iter().any(|p| p.plus_branch == bp && p.minus_branch == bm && p.hset.contains_h(&h)),
                "{name} at {a}: h = {h} in no pattern"
            );
        }
    }
}

#[test]
fn first_match_is_total_on_domain_points() {
    let rt2 = FieldElement::sqrt_radicand(2).unwrap();
    let mut seen = 0;
    for fx in FIXTURES {
        let p = corpus::load(fx.name).unwrap();
        for (name, f) in &p.functions {
            let mut hits = 0;
            for i in 0..4000i64 {
                let base = if i % 2 == 0 { FieldElement::one() } else { rt2.clone() };
                let x = match i % 4 {
                    0 | 1 => &base / &FieldElement::from_int(1 + i / 4),
                    2 => -(&base / &FieldElement::from_int(1 + i / 4)),
                    _ => FieldElement::from_ratio(i % 97 - 48, 1 + i % 13),
                };
                if f.domain().contains(&x) && f.evaluate(&x).is_ok() {
                    f.branch_index(&x).unwrap_or_else(|e| panic!("{}:{name} at {x}: {e}", fx.name));
                    hits += 1;
                }
            }
            assert!(hits >= 1000 || !f.domain().has_continuum(), "{}:{name}: {hits}", fx.name);
            seen += hits;
        }
    }
    assert!(seen > 10_000);
}

/// A member of `hset` close to `t`.
fn step_near(hset: &HSetDescriptor, t: f64, radicand: u32) -> Option<FieldElement> {
    let bases: Vec<FieldElement> = if hset.is_generic() { vec![hset.generic_scale(radicand)] } else { hset.classes().iter().map(|c| c.base().clone()).collect() };
    for c in bases {
        let n0 = (c.to_f64() / t).ceil() as i64;
        for n in n0..n0 + 64 {
            let h = &c / &FieldElement::from_int(n);
            if hset.contains_h(&h) {
                return Some(h);
            }
        }
    }
    None
}

#[test]
fn pattern_limits_agree_with_float_evaluation() {
    let mut paths = 0;
    for (name, f, a) in checked_points() {
        for pair in enumerate_patterns(&f, &a).unwrap() {
            let Some(v) = pattern_limit(&f, &a, &pair).unwrap().to_f64().filter(|v| v.is_finite()) else { continue };
            let mut errors = Vec::new();
            for t in [1e-3, 1e-5, 1e-7] {
                let Some(h) = step_near(&pair.hset, t, f.radicand()) else { break };
                let d = f.evaluate_f64(&(&a + &h)).unwrap() - f.evaluate_f64(&(&a - &h)).unwrap();
                errors.push((d - v).abs());
            }
            if errors.len() < 3 {
                continue;
            }
            paths += 1;
            assert!(errors.windows(2).all(|w| w[1] <= w[0] + 1e-12), "{name} at {a}: errors {errors:?}");
            assert!(errors[2] <= 1e-2 * (1.0 + v.abs()), "{name} at {a}: errors {errors:?}");
        }
    }
    assert!(paths >= 20, "{paths}");
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn generated_functions_render_and_parse_back(seed in 0u64..1_000_000) {
        let cfg = FuzzConfig::with_seed(seed);
        if let Some(inst) = generate(Profile::Pair, &cfg, &mut trial_rng(seed, 0)) {
            for f in [Some(&inst.f), inst.g.as_ref()].into_iter().flatten() {
                let text = f.to_dsl("f");
                let p = parse_program(&text).map_err(|e| TestCaseError::fail(format!("{e}\n{text}")))?;
                prop_assert_eq!(p.function("f").unwrap(), f, "{}", text);
            }
        }
    }

    #[test]
    fn verdict_records_round_trip(seed in 0u64..1_000_000) {
        let cfg = FuzzConfig::with_seed(seed);
        if let Some(inst) = generate(Profile::Single, &cfg, &mut trial_rng(seed, 1)) {
            for p in Property::ALL {
                let Ok(v) = check(&inst.f, &inst.point, p) else { continue };
                let rec = report::verdict(&v);
                let text = report::to_json(&rec);
                let back: VerdictRecord = serde_json::from_str(&text).unwrap();
                prop_assert_eq!(&back, &rec);
                prop_assert_eq!(report::to_json(&back), text);
            }
        }
    }
}

fn wsc_limits(program: &str, function: &str) -> Vec<String> {
    let p = corpus::load(program).unwrap();
    let v = check(p.function(function).unwrap(), &FieldElement::zero(), Property::Wsc).unwrap();
    let symcont_core::checker::Certificate::PatternTable(rows) = v.certificate else { panic!("{program}: {:?}", v.certificate) };
    let mut out: Vec<String> = rows.iter().map(|r| r.limit.to_string()).collect();
    out.sort();
    out
}

#[test]
fn counterexample_limits_match_displayed_values() {
    // The sum's constant pattern is -6; the printed "6" drops the sign.
    assert_eq!(wsc_limits("sum", "s"), ["-2", "-4", "-6"]);
    assert_eq!(wsc_limits("unbounded_product", "p"), ["2"]);
    assert_eq!(wsc_limits("bounded_product", "p"), ["1", "2"]);
    assert_eq!(wsc_limits("composition", "h"), ["2"]);
    let p = corpus::load("power_family").unwrap();
    let v = check(p.function("lim").unwrap(), &FieldElement::one(), Property::Wsc).unwrap();
    assert_eq!(v.exact_gap().unwrap().to_string(), "1");
}
