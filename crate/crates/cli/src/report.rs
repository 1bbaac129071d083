//! JSON records and text renderings for verdicts and suite reports.
//!
//! Records serialize through `serde_json::Value`, whose maps are ordered,
//! so keys always come out sorted. Exact values are strings in the
//! `p/q + r/s*rt(d)` form.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use symcont_core::checker::{Certificate, EmptySpace, PatternRow, PointVerdicts, Verdict};
use symcont_core::oracle::ProbeReport;
use symcont_core::sets::ReplaySequence;
use symcont_core::theorems::{RelationReport, TheoremReport, UniformLimitReport, Violation};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SequenceRecord {
    pub first_index: u64,
    pub scale: String,
    pub step: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RowRecord {
    pub hset: String,
    pub limit: String,
    pub minus_branch: usize,
    pub plus_branch: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BranchLimitRecord {
    pub branch: usize,
    pub limit: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SideRecord {
    pub branches: Vec<BranchLimitRecord>,
    pub sequence: Option<SequenceRecord>,
    pub side: String,
    pub witness: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CertificateRecord {
    Vacuous { empty: String },
    Witness { row: RowRecord, sequence: Option<SequenceRecord> },
    PatternTable { rows: Vec<RowRecord> },
    Sides { sides: Vec<SideRecord>, value: String },
    OracleHint { gap: Option<f64>, reason: String, samples: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerdictRecord {
    pub certificate: CertificateRecord,
    /// Size of the violation a negative verdict proves.
    pub exact_gap: Option<String>,
    pub holds: String,
    pub point: String,
    pub property: String,
}

fn sequence(s: &ReplaySequence) -> SequenceRecord {
    SequenceRecord { first_index: s.first_index, scale: s.scale.render(), step: s.step }
}

fn row(r: &PatternRow) -> RowRecord {
    RowRecord { hset: r.pair.hset.to_string(), limit: r.limit.to_string(), minus_branch: r.pair.minus_branch, plus_branch: r.pair.plus_branch }
}

pub fn certificate(c: &Certificate) -> CertificateRecord {
    match c {
        Certificate::Vacuous(e) => CertificateRecord::Vacuous {
            empty: match e {
                EmptySpace::Symmetric => "symmetric",
                EmptySpace::OneSided => "one_sided",
            }
            .into(),
        },
        Certificate::Witness { row: r, sequence: s } => CertificateRecord::Witness { row: row(r), sequence: s.as_ref().map(sequence) },
        Certificate::PatternTable(rows) => CertificateRecord::PatternTable { rows: rows.iter().map(row).collect() },
        Certificate::Sides { value, sides } => CertificateRecord::Sides {
            value: value.render(),
            sides: sides
                .iter()
                .map(|s| SideRecord {
                    branches: s.branches.iter().map(|(b, l)| BranchLimitRecord { branch: *b, limit: l.to_string() }).collect(),
                    sequence: s.sequence.as_ref().map(sequence),
                    side: s.side.name().into(),
                    witness: s.witness,
                })
                .collect(),
        },
        Certificate::OracleHint { gap, samples, reason } => CertificateRecord::OracleHint { gap: gap.is_finite().then_some(*gap), reason: reason.clone(), samples: *samples },
    }
}

pub fn verdict(v: &Verdict) -> VerdictRecord {
    VerdictRecord {
        certificate: certificate(&v.certificate),
        exact_gap: v.exact_gap().map(|g| g.to_string()),
        holds: v.holds.name().into(),
        point: v.point.render(),
        property: v.property.name().into(),
    }
}

/// Sorted-key JSON value of any record.
pub fn to_value<T: Serialize>(r: &T) -> Value {
    serde_json::to_value(r).expect("records serialize")
}

pub fn to_json<T: Serialize>(r: &T) -> String {
    serde_json::to_string_pretty(&to_value(r)).expect("values serialize")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointRecord {
    pub point: String,
    pub sc: VerdictRecord,
    pub wc: VerdictRecord,
    pub wsc: VerdictRecord,
}

pub fn point_verdicts(p: &PointVerdicts) -> PointRecord {
    PointRecord { point: p.point.render(), sc: verdict(&p.sc), wc: verdict(&p.wc), wsc: verdict(&p.wsc) }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ViolationRecord {
    pub construction: String,
    pub instance: String,
    pub shrink_steps: u32,
    pub trial: u64,
    pub verdict: VerdictRecord,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TheoremRecord {
    pub conclusion_unknown: u64,
    pub expect_violations: bool,
    pub hit_rate: f64,
    pub id: String,
    pub passed: bool,
    pub premise_hits: u64,
    pub premise_unknown: u64,
    pub trials: u64,
    pub violations: Vec<ViolationRecord>,
}

fn violation(v: &Violation) -> ViolationRecord {
    ViolationRecord { construction: v.construction.name().into(), instance: v.instance.describe(), shrink_steps: v.shrink_steps, trial: v.trial, verdict: verdict(&v.verdict) }
}

pub fn theorem(r: &TheoremReport) -> TheoremRecord {
    TheoremRecord {
        conclusion_unknown: r.conclusion_unknown,
        expect_violations: r.expect_violations,
        hit_rate: r.hit_rate(),
        id: r.id.clone(),
        passed: r.passed(),
        premise_hits: r.premise_hits,
        premise_unknown: r.premise_unknown,
        trials: r.trials,
        violations: r.violations.iter().map(violation).collect(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilyRecord {
    pub lower: Option<f64>,
    pub samples: usize,
    pub scale: String,
    pub side: Option<String>,
    pub tail_samples: usize,
    pub upper: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeRecord {
    pub budget: u64,
    pub families: Vec<FamilyRecord>,
    pub gap: Option<f64>,
    pub point: String,
    pub property: String,
    pub refuted: bool,
    pub samples_used: usize,
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

pub fn probe(r: &ProbeReport) -> ProbeRecord {
    ProbeRecord {
        budget: r.budget,
        families: r
            .families
            .iter()
            .map(|f| FamilyRecord {
                lower: finite(f.lower),
                samples: f.samples,
                scale: f.scale.render(),
                side: f.side.map(|s| s.name().into()),
                tail_samples: f.tail_samples,
                upper: finite(f.upper),
            })
            .collect(),
        gap: finite(r.gap),
        point: r.point.render(),
        property: r.property.name().into(),
        refuted: r.refutation.is_some(),
        samples_used: r.samples_used,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UniformRecord {
    pub approximants: Vec<String>,
    pub limit: Option<VerdictRecord>,
    pub non_uniform: Option<u32>,
    pub premise: String,
    /// Sampled `sup |f_k - f|`, rounded to six significant digits.
    pub sampled_sup: Vec<String>,
}

pub fn uniform(r: &UniformLimitReport) -> UniformRecord {
    UniformRecord {
        approximants: r.approximants.iter().map(|h| h.name().into()).collect(),
        limit: r.limit_verdict.as_ref().ok().map(verdict),
        non_uniform: r.non_uniform,
        premise: r.premise().name().into(),
        sampled_sup: r.sampled_sup.iter().map(|d| format!("{d:.5e}")).collect(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MembershipRecord {
    pub name: String,
    pub points_tested: usize,
    pub sc: String,
    pub wc: String,
    pub wsc: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RelationItemRecord {
    pub holds: bool,
    pub label: String,
    pub witness: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RelationRecord {
    pub errors: Vec<String>,
    pub items: Vec<RelationItemRecord>,
    pub memberships: Vec<MembershipRecord>,
    pub mismatches: Vec<String>,
    pub passed: bool,
}

pub fn relations(r: &RelationReport) -> RelationRecord {
    RelationRecord {
        errors: r.errors.clone(),
        items: r.items.iter().map(|i| RelationItemRecord { holds: i.holds, label: i.label.into(), witness: i.witness.clone() }).collect(),
        memberships: r
            .memberships
            .iter()
            .map(|m| MembershipRecord { name: m.name.clone(), points_tested: m.points_tested, sc: m.sc.name().into(), wc: m.wc.name().into(), wsc: m.wsc.name().into() })
            .collect(),
        mismatches: r.mismatches.clone(),
        passed: r.passed(),
    }
}

// ------------------------------------------------------------------ text

pub fn verdict_text(v: &Verdict) -> String {
    let mut s = format!("{} at {}: {}", v.property.name(), v.point, v.holds.name());
    match &v.certificate {
        Certificate::Vacuous(e) => s.push_str(&format!(" (vacuous: {} sequence space empty)", if *e == EmptySpace::Symmetric { "symmetric" } else { "one-sided" })),
        Certificate::Witness { row, sequence } => {
            s.push_str(&format!("\n  witness: branches ({}, {}) on {} -> limit {}", row.pair.plus_branch, row.pair.minus_branch, row.pair.hset, row.limit));
            if let Some(q) = sequence {
                s.push_str(&format!("\n  sequence: h_n = ({})/({} + {}n)", q.scale, q.first_index, q.step));
            }
        }
        Certificate::PatternTable(rows) => {
            for r in rows {
                s.push_str(&format!("\n  pattern ({}, {}) on {} -> limit {}", r.pair.plus_branch, r.pair.minus_branch, r.pair.hset, r.limit));
            }
        }
        Certificate::Sides { value, sides } => {
            s.push_str(&format!("\n  f(a) = {value}"));
            for side in sides {
                let lims: Vec<String> = side.branches.iter().map(|(b, l)| format!("#{b}: {l}")).collect();
                let w = side.witness.map_or("none".to_string(), |b| format!("#{b}"));
                s.push_str(&format!("\n  {} limits [{}], witness {}", side.side.name(), lims.join(", "), w));
            }
        }
        Certificate::OracleHint { gap, samples, reason } => s.push_str(&format!("\n  undecided ({reason}); numeric gap {gap:.3e} over {samples} samples")),
    }
    if let Some(g) = v.exact_gap() {
        s.push_str(&format!("\n  gap: {g}"));
    }
    s
}

pub fn theorem_table(reports: &[TheoremReport]) -> String {
    let mut s = format!("{:<24} {:>7} {:>7} {:>7} {:>9} {:>10}  {}\n", "suite", "trials", "hits", "skipped", "hit rate", "violations", "result");
    for r in reports {
        s.push_str(&format!(
            "{:<24} {:>7} {:>7} {:>7} {:>8.1}% {:>10}  {}\n",
            r.id,
            r.trials,
            r.premise_hits,
            r.premise_unknown,
            100.0 * r.hit_rate(),
            r.violations.len(),
            if r.passed() { "pass" } else { "FAIL" }
        ));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use symcont_core::checker::classify;
    use symcont_core::FieldElement;

    #[test]
    fn verdict_records_round_trip_with_sorted_keys() {
        let p = crate::dsl::parse_program("fn f on line = piecewise { x in seq(1) union points(0) -> 0, x > 0 -> 1, else -> -1 }").unwrap();
        let rows = classify(p.function("f").unwrap(), Some(&[FieldElement::zero(), FieldElement::one()])).unwrap();
        for r in &rows {
            for v in [&r.sc, &r.wc, &r.wsc] {
                let rec = verdict(v);
                let text = to_json(&rec);
                let back: VerdictRecord = serde_json::from_str(&text).unwrap();
                assert_eq!(back, rec);
                assert_eq!(to_json(&back), text);
            }
        }
        let text = to_json(&verdict(&rows[0].sc));
        let keys: Vec<&str> = ["\"certificate\"", "\"exact_gap\"", "\"holds\"", "\"point\"", "\"property\""].to_vec();
        let pos: Vec<usize> = keys.iter().map(|k| text.find(k).unwrap()).collect();
        assert!(pos.windows(2).all(|w| w[0] < w[1]));
    }
}
