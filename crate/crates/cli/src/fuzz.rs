//! Multi-threaded driver for the fuzz suites.
//!
//! Trials are evaluated in parallel batches without shrinking, then folded
//! in index order. Violations that the sequential runner would shrink are
//! re-run with shrinking, so the report matches
//! [`run_theorem`](symcont_core::theorems::run_theorem) exactly.

use std::num::NonZeroUsize;
use std::thread;

use symcont_core::theorems::{run_trial, FuzzConfig, TheoremReport, TheoremSpec, TrialOutcome};

pub fn default_threads() -> usize {
    thread::available_parallelism().map_or(1, NonZeroUsize::get)
}

fn batch(spec: &TheoremSpec, cfg: &FuzzConfig, start: u64, len: u64, threads: usize) -> Vec<TrialOutcome> {
    let threads = threads.clamp(1, len.max(1) as usize);
    let mut out: Vec<Option<TrialOutcome>> = (0..len).map(|_| None).collect();
    thread::scope(|s| {
        let chunk = out.len().div_ceil(threads).max(1);
        for (c, slots) in out.chunks_mut(chunk).enumerate() {
            let first = start + (c * chunk) as u64;
            s.spawn(move || {
                for (i, slot) in slots.iter_mut().enumerate() {
                    *slot = Some(run_trial(spec, cfg, first + i as u64, false));
                }
            });
        }
    });
    out.into_iter().map(|o| o.expect("every slot filled")).collect()
}

pub fn run_theorem_parallel(spec: &TheoremSpec, cfg: &FuzzConfig, threads: usize) -> TheoremReport {
    let mut report = TheoremReport::new(spec);
    let cap = cfg.max_trials.max(cfg.trials);
    let step = (threads.max(1) * 16) as u64;
    let mut index = 0u64;
    let more = |r: &TheoremReport, i: u64| i < cap && (i < cfg.trials || r.premise_hits < cfg.min_premise_hits);
    while more(&report, index) {
        let len = step.min(cap - index);
        for outcome in batch(spec, cfg, index, len, threads) {
            if !more(&report, index) {
                break;
            }
            let outcome = match outcome {
                TrialOutcome::Hit { violation: Some(_), .. } if report.violations.len() < cfg.shrink_limit => run_trial(spec, cfg, index, true),
                o => o,
            };
            report.absorb(outcome);
            index += 1;
        }
    }
    report
}
