//! Deciders for symmetric, weak and weakly symmetric continuity.
//!
//! Near `a`, every admissible `h` falls into one of finitely many
//! patterns `(i, j)`: branch `i` applies at `a + h` and branch `j` at
//! `a − h`. Along a pattern the difference `f(a + h) − f(a − h)` has a
//! single limit, so each property reduces to limits over patterns.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::field::FieldElement;
use crate::func::{effective_germs, EvalError, FnError, PiecewiseFn};
use crate::limits::{limit, path_at_scale, AsymptoticValue, PathError};
use crate::oracle;
use crate::sets::{lu_spaces, s_space, HSetDescriptor, ReplaySequence, SetError, Side};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Property {
    Sc,
    Wc,
    Wsc,
}

impl Property {
    pub const ALL: [Property; 3] = [Property::Sc, Property::Wc, Property::Wsc];

    pub fn name(self) -> &'static str {
        match self {
            Property::Sc => "SC",
            Property::Wc => "WC",
            Property::Wsc => "WSC",
        }
    }

    pub fn parse(s: &str) -> Option<Property> {
        match s.to_ascii_lowercase().as_str() {
            "sc" => Some(Property::Sc),
            "wc" => Some(Property::Wc),
            "wsc" => Some(Property::Wsc),
            _ => None,
        }
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Holds {
    True,
    False,
    Unknown,
}

impl Holds {
    pub fn name(self) -> &'static str {
        match self {
            Holds::True => "true",
            Holds::False => "false",
            Holds::Unknown => "unknown",
        }
    }

    pub fn as_bool(self) -> Option<bool> {
        match self {
            Holds::True => Some(true),
            Holds::False => Some(false),
            Holds::Unknown => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PatternPair {
    pub plus_branch: usize,
    pub minus_branch: usize,
    pub hset: HSetDescriptor,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PatternRow {
    pub pair: PatternPair,
    /// Limit of `f(a + h) − f(a − h)` along the pattern.
    pub limit: AsymptoticValue,
}

/// Which sequence space is empty.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EmptySpace {
    Symmetric,
    OneSided,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SideReport {
    pub side: Side,
    /// Feasible branches with their one-sided limits.
    pub branches: Vec<(usize, AsymptoticValue)>,
    /// A branch whose limit equals `f(a)`.
    pub witness: Option<usize>,
    pub sequence: Option<ReplaySequence>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Certificate {
    Vacuous(EmptySpace),
    Witness { row: PatternRow, sequence: Option<ReplaySequence> },
    PatternTable(Vec<PatternRow>),
    Sides { value: FieldElement, sides: Vec<SideReport> },
    OracleHint { gap: f64, samples: usize, reason: String },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Verdict {
    pub property: Property,
    pub point: FieldElement,
    pub holds: Holds,
    pub certificate: Certificate,
}

impl Verdict {
    pub fn is_vacuous(&self) -> bool {
        matches!(self.certificate, Certificate::Vacuous(_))
    }

    /// Exact size of the violation a negative verdict claims, when the
    /// certificate carries one.
    pub fn exact_gap(&self) -> Option<AsymptoticValue> {
        match (&self.certificate, self.holds) {
            (Certificate::Witness { row, .. }, Holds::False) => Some(row.limit.abs()),
            (Certificate::PatternTable(rows), Holds::False) => min_abs(rows.iter().map(|r| &r.limit)),
            (Certificate::Sides { value, sides }, Holds::False) => sides
                .iter()
                .filter(|s| s.witness.is_none())
                .filter_map(|s| min_abs(s.branches.iter().map(|(_, l)| l).map(|l| l.add(&AsymptoticValue::finite(-value))).collect::<Vec<_>>().iter()))
                .max_by(|a, b| a.to_f64().unwrap_or(0.0).total_cmp(&b.to_f64().unwrap_or(0.0))),
            _ => None,
        }
    }
}

fn min_abs<'a>(vals: impl Iterator<Item = &'a AsymptoticValue>) -> Option<AsymptoticValue> {
    vals.map(AsymptoticValue::abs).min_by(|a, b| a.to_f64().unwrap_or(f64::INFINITY).total_cmp(&b.to_f64().unwrap_or(f64::INFINITY)))
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum CheckError {
    #[error("point {0} is not in the domain")]
    OutOfDomain(String),
    #[error(transparent)]
    Set(#[from] SetError),
    #[error(transparent)]
    Path(#[from] PathError),
    #[error(transparent)]
    Fn(#[from] FnError),
    #[error("evaluation: {0}")]
    Eval(#[from] EvalError),
}

fn require_domain(f: &PiecewiseFn, a: &FieldElement) -> Result<(), CheckError> {
    if f.domain().contains(a) {
        Ok(())
    } else {
        Err(CheckError::OutOfDomain(format!("{a}")))
    }
}

/// Feasible branch pairs near `a`, with their joint admissible `h`.
pub fn enumerate_patterns(f: &PiecewiseFn, a: &FieldElement) -> Result<Vec<PatternPair>, CheckError> {
    let plus = effective_germs(f, a, Side::Right)?;
    let minus = effective_germs(f, a, Side::Left)?;
    let mut out = Vec::new();
    for (i, hp) in plus.iter().enumerate() {
        if !hp.is_feasible() {
            continue;
        }
        for (j, hm) in minus.iter().enumerate() {
            if !hm.is_feasible() {
                continue;
            }
            let joint = hp.intersect(hm)?;
            if joint.is_feasible() {
                out.push(PatternPair { plus_branch: i, minus_branch: j, hset: joint });
            }
        }
    }
    Ok(out)
}

/// Limit of `f(a + h) − f(a − h)` along a pattern.
pub fn pattern_limit(f: &PiecewiseFn, a: &FieldElement, pair: &PatternPair) -> Result<AsymptoticValue, CheckError> {
    let one = FieldElement::one();
    let up = path_at_scale(&f.branches()[pair.plus_branch].expr, a, Side::Right, &one)?;
    let down = path_at_scale(&f.branches()[pair.minus_branch].expr, a, Side::Left, &one)?;
    Ok(limit(&up.sub(&down)))
}

fn pattern_rows(f: &PiecewiseFn, a: &FieldElement) -> Result<Vec<PatternRow>, CheckError> {
    enumerate_patterns(f, a)?
        .into_iter()
        .map(|pair| {
            let limit = pattern_limit(f, a, &pair)?;
            Ok(PatternRow { pair, limit })
        })
        .collect()
}

fn hint(f: &PiecewiseFn, a: &FieldElement, property: Property, reason: String) -> Certificate {
    let report = oracle::probe(f, a, property, 10_000);
    Certificate::OracleHint { gap: report.gap, samples: report.samples_used, reason }
}

fn witness(f: &PiecewiseFn, row: PatternRow) -> Certificate {
    let sequence = row.pair.hset.witness_sequence(f.radicand());
    Certificate::Witness { row, sequence }
}

pub fn check_sym_cont(f: &PiecewiseFn, a: &FieldElement) -> Result<Verdict, CheckError> {
    require_domain(f, a)?;
    let verdict = |holds, certificate| Verdict { property: Property::Sc, point: a.clone(), holds, certificate };
    if s_space(a, f.domain())?.is_empty() {
        return Ok(verdict(Holds::True, Certificate::Vacuous(EmptySpace::Symmetric)));
    }
    let rows = pattern_rows(f, a)?;
    if let Some(row) = rows.iter().find(|r| r.limit.is_zero() == Some(false)) {
        return Ok(verdict(Holds::False, witness(f, row.clone())));
    }
    if let Some(row) = rows.iter().find(|r| r.limit.is_zero().is_none()) {
        let reason = format!("undecided limit for branches ({}, {})", row.pair.plus_branch, row.pair.minus_branch);
        return Ok(verdict(Holds::Unknown, hint(f, a, Property::Sc, reason)));
    }
    Ok(verdict(Holds::True, Certificate::PatternTable(rows)))
}

pub fn check_weak_sym_cont(f: &PiecewiseFn, a: &FieldElement) -> Result<Verdict, CheckError> {
    require_domain(f, a)?;
    let verdict = |holds, certificate| Verdict { property: Property::Wsc, point: a.clone(), holds, certificate };
    if s_space(a, f.domain())?.is_empty() {
        return Ok(verdict(Holds::True, Certificate::Vacuous(EmptySpace::Symmetric)));
    }
    let rows = pattern_rows(f, a)?;
    if let Some(row) = rows.iter().find(|r| r.limit.is_zero() == Some(true)) {
        return Ok(verdict(Holds::True, witness(f, row.clone())));
    }
    if let Some(row) = rows.iter().find(|r| r.limit.is_zero().is_none()) {
        let reason = format!("undecided limit for branches ({}, {})", row.pair.plus_branch, row.pair.minus_branch);
        return Ok(verdict(Holds::Unknown, hint(f, a, Property::Wsc, reason)));
    }
    Ok(verdict(Holds::False, Certificate::PatternTable(rows)))
}

pub fn check_weak_cont(f: &PiecewiseFn, a: &FieldElement) -> Result<Verdict, CheckError> {
    require_domain(f, a)?;
    let verdict = |holds, certificate| Verdict { property: Property::Wc, point: a.clone(), holds, certificate };
    let (left, right) = lu_spaces(a, f.domain())?;
    if !left.is_feasible() && !right.is_feasible() {
        return Ok(verdict(Holds::True, Certificate::Vacuous(EmptySpace::OneSided)));
    }
    let value = match f.evaluate(a) {
        Ok(v) => v,
        Err(EvalError::NotInField) => {
            return Ok(verdict(Holds::Unknown, hint(f, a, Property::Wc, "value at the point leaves the field".into())));
        }
        Err(e) => return Err(e.into()),
    };
    let radicand = f.radicand();
    let mut sides = Vec::new();
    let mut overall = Holds::True;
    for w in [left, right] {
        if !w.is_feasible() {
            continue;
        }
        let germs = effective_germs(f, a, w.side)?;
        let mut report = SideReport { side: w.side, branches: Vec::new(), witness: None, sequence: None };
        let mut undecided = false;
        for (i, h) in germs.iter().enumerate() {
            if !h.is_feasible() {
                continue;
            }
            let p = path_at_scale(&f.branches()[i].expr, a, w.side, &FieldElement::one())?;
            let l = limit(&p);
            match l.equals_field(&value) {
                Some(true) if report.witness.is_none() => {
                    report.witness = Some(i);
                    report.sequence = h.witness_sequence(radicand);
                }
                None => undecided = true,
                _ => {}
            }
            report.branches.push((i, l));
        }
        let side_holds = if report.witness.is_some() {
            Holds::True
        } else if undecided {
            Holds::Unknown
        } else {
            Holds::False
        };
        overall = match (overall, side_holds) {
            (Holds::False, _) | (_, Holds::False) => Holds::False,
            (Holds::Unknown, _) | (_, Holds::Unknown) => Holds::Unknown,
            _ => Holds::True,
        };
        sides.push(report);
    }
    if overall == Holds::Unknown {
        return Ok(verdict(Holds::Unknown, hint(f, a, Property::Wc, "undecided one-sided limit".into())));
    }
    Ok(verdict(overall, Certificate::Sides { value, sides }))
}

pub fn check(f: &PiecewiseFn, a: &FieldElement, property: Property) -> Result<Verdict, CheckError> {
    match property {
        Property::Sc => check_sym_cont(f, a),
        Property::Wc => check_weak_cont(f, a),
        Property::Wsc => check_weak_sym_cont(f, a),
    }
}

/// All three verdicts at one point.
#[derive(Clone, Debug, PartialEq)]
pub struct PointVerdicts {
    pub point: FieldElement,
    pub sc: Verdict,
    pub wc: Verdict,
    pub wsc: Verdict,
}

impl PointVerdicts {
    pub fn get(&self, p: Property) -> &Verdict {
        match p {
            Property::Sc => &self.sc,
            Property::Wc => &self.wc,
            Property::Wsc => &self.wsc,
        }
    }
}

/// Points checked by [`classify`] when none are given: the special
/// points of the function, plus spot points between and beyond them on
/// continuum domains and a few members of each generated set.
pub fn default_points(f: &PiecewiseFn) -> Vec<FieldElement> {
    let mut pts = f.special_points();
    let mut extra = Vec::new();
    if f.domain().has_continuum() {
        let two = FieldElement::from_int(2);
        let one = FieldElement::one();
        let quarter = &FieldElement::sqrt_radicand(f.radicand()).unwrap_or_else(|_| one.clone()) / &FieldElement::from_int(4);
        for w in pts.windows(2) {
            extra.push(&(&w[0] + &w[1]) / &two);
        }
        if let (Some(lo), Some(hi)) = (pts.first(), pts.last()) {
            extra.push(&(lo - &one) - &quarter);
            extra.push(&(hi + &one) + &quarter);
        }
    }
    for g in f.domain().gen_sets() {
        for n in [1i64, 2, 3, -1, -2, -3] {
            let x = g.scale() / &FieldElement::from_int(n);
            if g.contains(&x) {
                extra.push(x);
            }
        }
    }
    for x in extra {
        if f.domain().contains(&x) && !pts.contains(&x) {
            pts.push(x);
        }
    }
    pts.sort();
    pts
}

/// Verdict matrix at the given points (or at [`default_points`]).
/// Properties defined by quantifying over every point are only decided
/// at the points tested.
pub fn classify(f: &PiecewiseFn, points: Option<&[FieldElement]>) -> Result<Vec<PointVerdicts>, CheckError> {
    let pts = match points {
        Some(p) => p.to_vec(),
        None => default_points(f),
    };
    pts.into_iter()
        .map(|a| {
            Ok(PointVerdicts { sc: check_sym_cont(f, &a)?, wc: check_weak_cont(f, &a)?, wsc: check_weak_sym_cont(f, &a)?, point: a })
        })
        .collect()
}

/// Both one-sided limits at an interior point, when the domain is a
/// continuum on both sides and each side has a single feasible limit.
pub fn interior_one_sided_limits(f: &PiecewiseFn, a: &FieldElement) -> Result<Option<(AsymptoticValue, AsymptoticValue)>, CheckError> {
    let mut out = vec![];
    for side in [Side::Left, Side::Right] {
        let germs = effective_germs(f, a, side)?;
        let mut lims: Vec<AsymptoticValue> = Vec::new();
        for (i, h) in germs.iter().enumerate() {
            if h.is_feasible() {
                let p = path_at_scale(&f.branches()[i].expr, a, side, &FieldElement::one())?;
                lims.push(limit(&p));
            }
        }
        let Some(first) = lims.first().cloned() else { return Ok(None) };
        if lims.iter().any(|l| l.add(&first.neg()).is_zero() != Some(true)) {
            return Ok(None);
        }
        out.push(first);
    }
    let right = out.pop();
    let left = out.pop();
    Ok(left.zip(right))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::ExtReal;
    use crate::func::{Branch, Expr};
    use crate::sets::{CmpOp, GuardAtom, IndexRange, Region, StructuredSet};

    fn fe(n: i64) -> FieldElement {
        FieldElement::from_int(n)
    }

    fn rt2() -> FieldElement {
        FieldElement::sqrt_radicand(2).unwrap()
    }

    fn set_a() -> StructuredSet {
        StructuredSet::gen(fe(1), IndexRange::All).unwrap().union(StructuredSet::points(vec![fe(0)]))
    }

    fn jumps_off_a() -> PiecewiseFn {
        PiecewiseFn::new(
            StructuredSet::line(),
            vec![
                Branch::new(Region::new(vec![GuardAtom::In(set_a())]), Expr::int(0)),
                Branch::new(Region::new(vec![GuardAtom::cmp_x(CmpOp::Gt, fe(0))]), Expr::int(1)),
                Branch::otherwise(Expr::int(-1)),
            ],
        )
        .unwrap()
    }

    fn indicator_of_nonzero() -> PiecewiseFn {
        PiecewiseFn::new(StructuredSet::line(), vec![Branch::new(Region::new(vec![GuardAtom::cmp_x(CmpOp::Eq, fe(0))]), Expr::int(0)), Branch::otherwise(Expr::int(1))]).unwrap()
    }

    #[test]
    fn jumps_off_a_at_zero() {
        let f = jumps_off_a();
        let zero = fe(0);
        let sc = check_sym_cont(&f, &zero).unwrap();
        assert_eq!(sc.holds, Holds::False);
        let Certificate::Witness { row, sequence } = &sc.certificate else { panic!() };
        assert_eq!(row.limit, AsymptoticValue::finite(fe(2)));
        assert_eq!((row.pair.plus_branch, row.pair.minus_branch), (1, 2));
        assert_eq!(sequence.as_ref().unwrap().scale, rt2());
        let wsc = check_weak_sym_cont(&f, &zero).unwrap();
        assert_eq!(wsc.holds, Holds::True);
        let Certificate::Witness { row, .. } = &wsc.certificate else { panic!() };
        assert_eq!(row.limit, AsymptoticValue::finite(fe(0)));
        assert_eq!(row.pair.hset.classes()[0].base(), &fe(1));
        assert_eq!(check_weak_cont(&f, &zero).unwrap().holds, Holds::True);
    }

    #[test]
    fn jumps_off_a_elsewhere() {
        let f = jumps_off_a();
        assert_eq!(check_weak_cont(&f, &fe(1)).unwrap().holds, Holds::False);
        assert_eq!(check_sym_cont(&f, &FieldElement::from_ratio(1, 2)).unwrap().holds, Holds::True);
        assert_eq!(check_sym_cont(&f, &FieldElement::from_ratio(1, 3)).unwrap().holds, Holds::True);
    }

    #[test]
    fn removable_jump_at_zero() {
        let f = indicator_of_nonzero();
        let row = classify(&f, Some(&[fe(0)])).unwrap().remove(0);
        assert_eq!(row.sc.holds, Holds::True);
        assert_eq!(row.wc.holds, Holds::False);
        assert_eq!(row.wsc.holds, Holds::True);
        assert_eq!(check_sym_cont(&f, &fe(3)).unwrap().holds, Holds::True);
    }

    #[test]
    fn constant_everywhere() {
        let f = PiecewiseFn::constant(StructuredSet::line(), fe(7));
        for v in classify(&f, None).unwrap() {
            for p in Property::ALL {
                assert_eq!(v.get(p).holds, Holds::True);
            }
        }
    }

    #[test]
    fn isolated_points_are_vacuous() {
        let dom = set_a();
        let f = PiecewiseFn::new(dom, vec![Branch::otherwise(Expr::Var)]).unwrap();
        for n in 1..5 {
            let x = FieldElement::from_ratio(1, n);
            for p in Property::ALL {
                let v = check(&f, &x, p).unwrap();
                assert_eq!(v.holds, Holds::True);
                assert!(v.is_vacuous());
            }
        }
        assert!(enumerate_patterns(&f, &FieldElement::from_ratio(1, 2)).unwrap().is_empty());
    }

    #[test]
    fn infinite_difference() {
        let f = PiecewiseFn::new(StructuredSet::line(), vec![Branch::new(Region::new(vec![GuardAtom::cmp_x(CmpOp::Eq, fe(0))]), Expr::int(0)), Branch::otherwise(Expr::div(Expr::int(1), Expr::Var))]).unwrap();
        let v = check_sym_cont(&f, &fe(0)).unwrap();
        assert_eq!(v.holds, Holds::False);
        assert_eq!(v.exact_gap(), Some(AsymptoticValue::Limit(ExtReal::PlusInfinity)));
    }

    #[test]
    fn out_of_domain_is_an_error() {
        let f = PiecewiseFn::new(set_a(), vec![Branch::otherwise(Expr::Var)]).unwrap();
        assert!(matches!(check_sym_cont(&f, &rt2()), Err(CheckError::OutOfDomain(_))));
    }
}
