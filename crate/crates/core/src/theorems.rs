//! Premise-conditional fuzzing of the closure theorems, the relation
//! matrix over a set of named functions, and the uniform-limit check.
//!
//! A trial draws an [`Instance`] from the theorem's generator profile,
//! evaluates the premises with the checker, and, when all of them hold,
//! builds each construction and checks the conclusion. Unknown premises
//! or conclusions skip the trial and are counted.

use alloc::{format, string::String, vec, vec::Vec};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::checker::{check, classify, Holds, Property, Verdict};
use crate::field::FieldElement;
use crate::func::{check_lipschitz, combine, locally_bounded_at, side_limits, Branch, Combinator, Exponent, Expr, FnError, FnFamily, PiecewiseFn, UniformContinuityCert};
use crate::oracle::{sup_distance, validate_declared_uc};
use crate::sets::{CmpOp, GuardAtom, IndexRange, Interval, Region, SetAtom, Side, StructuredSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Role {
    F,
    G,
}

impl Role {
    pub fn name(self) -> &'static str {
        match self {
            Role::F => "f",
            Role::G => "g",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Premise {
    Holds { role: Role, property: Property },
    LocallyBounded(Role),
    /// `role(x) ≠ 0` on the whole domain (structural sign proof).
    Nonvanishing(Role),
    /// `1/role` locally bounded at the point.
    ReciprocalBounded(Role),
    /// The instance certificate proves `g` uniformly continuous.
    UniformlyContinuous,
    /// Continuous at every point of its domain.
    Continuous(Role),
    /// `f(A)` lies in the domain of `g`.
    RangeInDomain,
    Nonnegative(Role),
    EqualDomains,
    /// Every approximant is WSC at the point and within its declared
    /// error bound of `f` on sampled points.
    UniformApproximation,
}

impl core::fmt::Display for Premise {
    fn fmt(&self, out: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Premise::Holds { role, property } => write!(out, "{} {}", role.name(), property.name()),
            Premise::LocallyBounded(r) => write!(out, "{} locally bounded", r.name()),
            Premise::Nonvanishing(r) => write!(out, "{} nonvanishing", r.name()),
            Premise::ReciprocalBounded(r) => write!(out, "1/{} locally bounded", r.name()),
            Premise::UniformlyContinuous => write!(out, "g uniformly continuous"),
            Premise::Continuous(r) => write!(out, "{} continuous", r.name()),
            Premise::RangeInDomain => write!(out, "f(A) in dom g"),
            Premise::Nonnegative(r) => write!(out, "{} nonnegative", r.name()),
            Premise::EqualDomains => write!(out, "equal domains"),
            Premise::UniformApproximation => write!(out, "uniform approximation"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Construction {
    Identity,
    Abs,
    /// `c·f` with the instance scalar.
    ScaleByConstant,
    Add,
    Sub,
    Max,
    Min,
    Mul,
    Recip,
    Quotient,
    /// `g ∘ f`.
    Compose,
    Sqrt,
}

impl Construction {
    pub fn name(self) -> &'static str {
        match self {
            Construction::Identity => "f",
            Construction::Abs => "|f|",
            Construction::ScaleByConstant => "c*f",
            Construction::Add => "f+g",
            Construction::Sub => "f-g",
            Construction::Max => "max(f,g)",
            Construction::Min => "min(f,g)",
            Construction::Mul => "f*g",
            Construction::Recip => "1/f",
            Construction::Quotient => "f/g",
            Construction::Compose => "g(f)",
            Construction::Sqrt => "sqrt(f)",
        }
    }

    pub fn apply(self, inst: &Instance) -> Result<PiecewiseFn, FnError> {
        let f = &inst.f;
        let g = || inst.g.as_ref().ok_or(FnError::MissingOperand);
        let op = match self {
            Construction::Identity => return Ok(f.clone()),
            Construction::Abs => Combinator::Abs,
            Construction::ScaleByConstant => Combinator::Scale(inst.scalar.clone()),
            Construction::Add => Combinator::Add,
            Construction::Sub => Combinator::Sub,
            Construction::Max => Combinator::Max,
            Construction::Min => Combinator::Min,
            Construction::Mul => Combinator::Mul,
            Construction::Recip => Combinator::Recip,
            Construction::Quotient => Combinator::Quotient,
            Construction::Compose => Combinator::Compose,
            Construction::Sqrt => Combinator::Sqrt,
        };
        if op.is_binary() {
            combine(&op, f, Some(g()?))
        } else {
            combine(&op, f, None)
        }
    }
}

/// Instance generator used for a theorem's trials.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Profile {
    Single,
    /// `g` biased toward SC at the point.
    Pair,
    /// Both operands drawn from the sequence-set motif; neither biased to SC.
    PairWeak,
    /// `g` may carry poles at the point.
    PairPoles,
    Nonvanishing,
    Quotient,
    /// `g` piecewise affine and continuous, with a Lipschitz certificate.
    Composition,
    /// `f` with poles, `g` continuous with a quadratic piece.
    CompositionContinuous,
    Nonnegative,
    /// `f_k = f + c/k`.
    UniformFamily,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TheoremSpec {
    pub id: &'static str,
    pub summary: &'static str,
    pub premises: Vec<Premise>,
    pub constructions: Vec<Construction>,
    pub conclusion: Property,
    pub profile: Profile,
    /// Negative control: the suite passes only if a violation is found.
    pub expect_violations: bool,
}

fn spec(id: &'static str, summary: &'static str, premises: Vec<Premise>, constructions: Vec<Construction>, profile: Profile) -> TheoremSpec {
    TheoremSpec { id, summary, premises, constructions, conclusion: Property::Wsc, profile, expect_violations: false }
}

use Premise::{EqualDomains, LocallyBounded, Nonnegative, Nonvanishing, RangeInDomain, ReciprocalBounded};

fn holds(role: Role, property: Property) -> Premise {
    Premise::Holds { role, property }
}

/// The closure statements, each expected to produce no violations.
pub fn closure_suites() -> Vec<TheoremSpec> {
    use Construction as C;
    use Property::{Sc, Wsc};
    use Role::{F, G};
    vec![
        spec("sc-implies-wsc", "f SC at a => f WSC at a", vec![holds(F, Sc)], vec![C::Identity], Profile::Single),
        spec("abs-scale", "f WSC => |f|, c*f WSC", vec![holds(F, Wsc)], vec![C::Abs, C::ScaleByConstant], Profile::Single),
        spec(
            "sum-sc",
            "f WSC, g SC => f+g, f-g, max, min WSC",
            vec![holds(F, Wsc), holds(G, Sc), EqualDomains],
            vec![C::Add, C::Sub, C::Max, C::Min],
            Profile::Pair,
        ),
        spec(
            "product-bounded",
            "f WSC, g SC, both locally bounded => f*g WSC",
            vec![holds(F, Wsc), holds(G, Sc), LocallyBounded(F), LocallyBounded(G), EqualDomains],
            vec![C::Mul],
            Profile::Pair,
        ),
        spec(
            "reciprocal",
            "f WSC, nonvanishing, 1/f locally bounded => 1/f WSC",
            vec![holds(F, Wsc), Nonvanishing(F), ReciprocalBounded(F)],
            vec![C::Recip],
            Profile::Nonvanishing,
        ),
        spec(
            "quotient",
            "f WSC and locally bounded, g SC, nonvanishing, 1/g locally bounded => f/g WSC",
            vec![holds(F, Wsc), LocallyBounded(F), holds(G, Sc), Nonvanishing(G), ReciprocalBounded(G), EqualDomains],
            vec![C::Quotient],
            Profile::Quotient,
        ),
        spec(
            "composition",
            "f WSC, g uniformly continuous (certified) => g(f) WSC",
            vec![holds(F, Wsc), Premise::UniformlyContinuous, RangeInDomain],
            vec![C::Compose],
            Profile::Composition,
        ),
        spec("sqrt", "f WSC and nonnegative => sqrt(f) WSC", vec![holds(F, Wsc), Nonnegative(F)], vec![C::Sqrt], Profile::Nonnegative),
        spec("uniform-limit", "f_k WSC, f_k -> f uniformly => f WSC", vec![Premise::UniformApproximation], vec![C::Identity], Profile::UniformFamily),
    ]
}

/// Weakened statements, each expected to produce violations.
pub fn negative_controls() -> Vec<TheoremSpec> {
    use Construction as C;
    use Property::{Sc, Wsc};
    use Role::{F, G};
    let neg = |mut s: TheoremSpec| {
        s.expect_violations = true;
        s
    };
    vec![
        neg(spec(
            "sum-weak",
            "f WSC, g only WSC: f+g, f-g, max, min may fail",
            vec![holds(F, Wsc), holds(G, Wsc), EqualDomains],
            vec![C::Add, C::Sub, C::Max, C::Min],
            Profile::PairWeak,
        )),
        neg(spec(
            "product-unbounded",
            "f WSC, g SC, boundedness dropped: f*g may fail",
            vec![holds(F, Wsc), holds(G, Sc), EqualDomains],
            vec![C::Mul],
            Profile::PairPoles,
        )),
        neg(spec(
            "product-weak",
            "f, g WSC and locally bounded: f*g may fail",
            vec![holds(F, Wsc), holds(G, Wsc), LocallyBounded(F), LocallyBounded(G), EqualDomains],
            vec![C::Mul],
            Profile::PairWeak,
        )),
        neg(spec(
            "composition-continuous",
            "f WSC, g merely continuous: g(f) may fail",
            vec![holds(F, Wsc), Premise::Continuous(G), RangeInDomain],
            vec![C::Compose],
            Profile::CompositionContinuous,
        )),
    ]
}

pub fn theorem_by_id(id: &str) -> Option<TheoremSpec> {
    closure_suites().into_iter().chain(negative_controls()).find(|s| s.id == id)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FuzzConfig {
    pub seed: u64,
    /// Instances to generate.
    pub trials: u64,
    /// Keep generating past `trials` until this many premise hits.
    pub min_premise_hits: u64,
    /// Hard cap on generated instances.
    pub max_trials: u64,
    pub max_branches: usize,
    /// Generator scales for sequence sets.
    pub scales: Vec<FieldElement>,
    /// Integer coefficients are drawn from `[-coeff_range, coeff_range]`.
    pub coeff_range: i64,
    /// Violations beyond this many are reported unshrunk.
    pub shrink_limit: usize,
}

impl Default for FuzzConfig {
    fn default() -> Self {
        let rt2 = FieldElement::sqrt_radicand(2).expect("2 is squarefree");
        Self {
            seed: 0,
            trials: 1000,
            min_premise_hits: 0,
            max_trials: 1000,
            max_branches: 4,
            scales: vec![FieldElement::one(), rt2.clone(), FieldElement::from_ratio(3, 2), &rt2 * &FieldElement::from_int(2)],
            coeff_range: 3,
            shrink_limit: 5,
        }
    }
}

impl FuzzConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self { seed, ..Self::default() }
    }

    /// Run until at least `hits` premise-satisfying trials, giving up
    /// after `cap` instances.
    pub fn until_hits(mut self, hits: u64, cap: u64) -> Self {
        self.min_premise_hits = hits;
        self.max_trials = cap;
        self
    }
}

/// `f_k` for `k = 1..=k_max` with `sup |f_k − f| ≤ bounds[k−1]` declared.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Approximants {
    pub family: FnFamily,
    pub bounds: Vec<FieldElement>,
    pub k_max: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    pub point: FieldElement,
    pub f: PiecewiseFn,
    pub g: Option<PiecewiseFn>,
    pub scalar: FieldElement,
    pub cert: Option<UniformContinuityCert>,
    pub approximants: Option<Approximants>,
}

impl Instance {
    pub fn single(point: FieldElement, f: PiecewiseFn) -> Self {
        Self { point, f, g: None, scalar: FieldElement::from_int(2), cert: None, approximants: None }
    }

    pub fn pair(point: FieldElement, f: PiecewiseFn, g: PiecewiseFn) -> Self {
        Self { g: Some(g), ..Self::single(point, f) }
    }

    fn role(&self, r: Role) -> Option<&PiecewiseFn> {
        match r {
            Role::F => Some(&self.f),
            Role::G => self.g.as_ref(),
        }
    }

    /// DSL rendering of the operands, for reports.
    pub fn describe(&self) -> String {
        let mut s = self.f.to_dsl("f");
        if let Some(g) = &self.g {
            s.push_str(&g.to_dsl("g"));
        }
        s.push_str(&format!("# at {}\n", self.point));
        s
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConstructionOutcome {
    pub construction: Construction,
    pub verdict: Result<Verdict, String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Evaluation {
    /// `True` when every premise holds.
    pub premises: Holds,
    /// First premise that failed or could not be decided.
    pub blocking: Option<(Premise, String)>,
    pub outcomes: Vec<ConstructionOutcome>,
}

impl Evaluation {
    pub fn violated(&self) -> Option<&ConstructionOutcome> {
        if self.premises != Holds::True {
            return None;
        }
        self.outcomes.iter().find(|o| matches!(&o.verdict, Ok(v) if v.holds == Holds::False))
    }

    pub fn is_violation(&self) -> bool {
        self.violated().is_some()
    }

    fn conclusion_unknown(&self) -> bool {
        self.outcomes.iter().any(|o| !matches!(&o.verdict, Ok(v) if v.holds != Holds::Unknown))
    }
}

/// Evaluate premises and, when they all hold, the conclusion for every
/// construction.
pub fn evaluate_instance(spec: &TheoremSpec, inst: &Instance) -> Evaluation {
    let mut unknown = None;
    for p in &spec.premises {
        match premise_holds(p, inst) {
            (Holds::True, _) => {}
            (Holds::False, why) => return Evaluation { premises: Holds::False, blocking: Some((p.clone(), why)), outcomes: Vec::new() },
            (Holds::Unknown, why) => {
                if unknown.is_none() {
                    unknown = Some((p.clone(), why));
                }
            }
        }
    }
    if unknown.is_some() {
        return Evaluation { premises: Holds::Unknown, blocking: unknown, outcomes: Vec::new() };
    }
    let outcomes = spec
        .constructions
        .iter()
        .map(|&c| {
            let verdict = c.apply(inst).map_err(|e| format!("{e}")).and_then(|h| check(&h, &inst.point, spec.conclusion).map_err(|e| format!("{e}")));
            ConstructionOutcome { construction: c, verdict }
        })
        .collect();
    Evaluation { premises: Holds::True, blocking: None, outcomes }
}

fn premise_holds(p: &Premise, inst: &Instance) -> (Holds, String) {
    let need = |r: Role| inst.role(r).ok_or_else(|| format!("missing operand {}", r.name()));
    let a = &inst.point;
    let res: Result<(Holds, String), String> = (|| match p {
        Premise::Holds { role, property } => {
            let v = check(need(*role)?, a, *property).map_err(|e| format!("{e}"))?;
            Ok((v.holds, String::new()))
        }
        Premise::LocallyBounded(r) => bounded(need(*r)?, a),
        Premise::ReciprocalBounded(r) => {
            let rec = combine(&Combinator::Recip, need(*r)?, None).map_err(|e| format!("{e}"))?;
            bounded(&rec, a)
        }
        Premise::Nonvanishing(r) => Ok(structural(need(*r)?, |s| matches!(s, Sign::Pos | Sign::Neg), "not provably nonzero")),
        Premise::Nonnegative(r) => Ok(structural(need(*r)?, |s| matches!(s, Sign::Pos | Sign::NonNeg | Sign::Zero), "not provably nonnegative")),
        Premise::EqualDomains => {
            let g = need(Role::G)?;
            Ok(if inst.f.domain() == g.domain() { (Holds::True, String::new()) } else { (Holds::False, "domains differ".into()) })
        }
        Premise::Continuous(r) => continuous(need(*r)?),
        Premise::RangeInDomain => {
            let g = need(Role::G)?;
            let full = g.domain().atoms().iter().any(|x| matches!(x, SetAtom::Interval(iv) if *iv == Interval::line()));
            Ok(if full { (Holds::True, String::new()) } else { (Holds::Unknown, "dom g is not the whole line".into()) })
        }
        Premise::UniformlyContinuous => {
            let g = need(Role::G)?;
            Ok(match &inst.cert {
                None => (Holds::Unknown, "no certificate".into()),
                Some(UniformContinuityCert::Lipschitz { constant, scope }) => {
                    if !covers(scope, g.domain()) {
                        (Holds::Unknown, "certificate scope misses dom g".into())
                    } else {
                        match check_lipschitz(g, constant) {
                            Ok(()) => (Holds::True, String::new()),
                            Err(e) => (Holds::Unknown, format!("{e}")),
                        }
                    }
                }
                Some(UniformContinuityCert::SqrtOnNonnegatives) => {
                    let ok = g.branches().iter().all(|b| b.expr == Expr::sqrt(Expr::Var));
                    if ok {
                        (Holds::True, String::new())
                    } else {
                        (Holds::Unknown, "g is not sqrt(x)".into())
                    }
                }
                Some(UniformContinuityCert::Declared { budget }) => {
                    if validate_declared_uc(g, *budget) {
                        (Holds::True, String::new())
                    } else {
                        (Holds::Unknown, "declared modulus not confirmed".into())
                    }
                }
            })
        }
        Premise::UniformApproximation => {
            let ap = inst.approximants.as_ref().ok_or("no approximants")?;
            let r = uniform_limit_check(&ap.family, &inst.f, &ap.bounds, a, ap.k_max);
            Ok(match r.premise() {
                Holds::True => (Holds::True, String::new()),
                h => (h, r.describe()),
            })
        }
    })();
    res.unwrap_or_else(|e| (Holds::Unknown, e))
}

fn bounded(f: &PiecewiseFn, a: &FieldElement) -> Result<(Holds, String), String> {
    Ok(match locally_bounded_at(f, a).map_err(|e| format!("{e}"))?.is_bounded() {
        Some(true) => (Holds::True, String::new()),
        Some(false) => (Holds::False, "unbounded".into()),
        None => (Holds::Unknown, "boundedness undecided".into()),
    })
}

/// Pole-free branches on a continuum are continuous off the branch
/// thresholds; at each threshold every feasible side limit must equal
/// the value.
fn continuous(f: &PiecewiseFn) -> Result<(Holds, String), String> {
    if !f.domain().atoms().iter().all(|x| matches!(x, SetAtom::Interval(_))) || f.branches().iter().any(|b| has_div(&b.expr)) {
        return Ok((Holds::Unknown, "continuity not decidable here".into()));
    }
    for p in f.special_points() {
        let v = match f.evaluate(&p) {
            Ok(v) => v,
            Err(_) => return Ok((Holds::Unknown, format!("value at {p}"))),
        };
        for side in [Side::Left, Side::Right] {
            for (lim, _) in side_limits(f, &p, side).map_err(|e| format!("{e}"))? {
                match lim.equals_field(&v) {
                    Some(true) => {}
                    Some(false) => return Ok((Holds::False, format!("jump at {p}"))),
                    None => return Ok((Holds::Unknown, format!("limit at {p}"))),
                }
            }
        }
    }
    Ok((Holds::True, String::new()))
}

fn has_div(e: &Expr) -> bool {
    match e {
        Expr::Div(..) => true,
        Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) => has_div(a) || has_div(b),
        Expr::Neg(a) | Expr::Pow(a, _) | Expr::Abs(a) | Expr::Sqrt(a) => has_div(a),
        _ => false,
    }
}

fn covers(scope: &StructuredSet, dom: &StructuredSet) -> bool {
    scope == dom || scope.atoms().iter().any(|x| matches!(x, SetAtom::Interval(iv) if *iv == Interval::line()))
}

fn structural(f: &PiecewiseFn, ok: impl Fn(Sign) -> bool, why: &str) -> (Holds, String) {
    if f.branches().iter().all(|b| ok(expr_sign(&b.expr))) {
        (Holds::True, String::new())
    } else {
        (Holds::Unknown, why.into())
    }
}

/// Sign of an expression valid at every real `x` where it is defined.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sign {
    Pos,
    Neg,
    NonNeg,
    NonPos,
    Zero,
    Any,
}

impl Sign {
    fn flip(self) -> Sign {
        match self {
            Sign::Pos => Sign::Neg,
            Sign::Neg => Sign::Pos,
            Sign::NonNeg => Sign::NonPos,
            Sign::NonPos => Sign::NonNeg,
            s => s,
        }
    }

    fn strict(self) -> bool {
        matches!(self, Sign::Pos | Sign::Neg)
    }

    fn nonneg(self) -> bool {
        matches!(self, Sign::Pos | Sign::NonNeg | Sign::Zero)
    }

    fn nonpos(self) -> bool {
        matches!(self, Sign::Neg | Sign::NonPos | Sign::Zero)
    }
}

fn sign_add(a: Sign, b: Sign) -> Sign {
    match (a, b) {
        (Sign::Zero, s) | (s, Sign::Zero) => s,
        (x, y) if x.nonneg() && y.nonneg() => {
            if x == Sign::Pos || y == Sign::Pos {
                Sign::Pos
            } else {
                Sign::NonNeg
            }
        }
        (x, y) if x.nonpos() && y.nonpos() => {
            if x == Sign::Neg || y == Sign::Neg {
                Sign::Neg
            } else {
                Sign::NonPos
            }
        }
        _ => Sign::Any,
    }
}

fn sign_mul(a: Sign, b: Sign) -> Sign {
    match (a, b) {
        (Sign::Zero, _) | (_, Sign::Zero) => Sign::Zero,
        (Sign::Any, _) | (_, Sign::Any) => Sign::Any,
        (x, y) => {
            let neg = x.nonpos() != y.nonpos();
            let strict = x.strict() && y.strict();
            match (neg, strict) {
                (false, true) => Sign::Pos,
                (false, false) => Sign::NonNeg,
                (true, true) => Sign::Neg,
                (true, false) => Sign::NonPos,
            }
        }
    }
}

/// Conservative structural sign analysis.
pub fn expr_sign(e: &Expr) -> Sign {
    match e {
        Expr::Const(c) => match c.signum() {
            1 => Sign::Pos,
            -1 => Sign::Neg,
            _ => Sign::Zero,
        },
        Expr::Var => Sign::Any,
        Expr::Param => Sign::Pos,
        Expr::Add(a, b) => sign_add(expr_sign(a), expr_sign(b)),
        Expr::Sub(a, b) => sign_add(expr_sign(a), expr_sign(b).flip()),
        Expr::Neg(a) => expr_sign(a).flip(),
        Expr::Mul(a, b) => sign_mul(expr_sign(a), expr_sign(b)),
        Expr::Div(a, b) => {
            let d = expr_sign(b);
            if d.strict() {
                sign_mul(expr_sign(a), d)
            } else {
                Sign::Any
            }
        }
        Expr::Pow(_, Exponent::Lit(0)) => Sign::Pos,
        Expr::Pow(a, Exponent::Lit(k)) => {
            let s = expr_sign(a);
            if k % 2 == 1 {
                s
            } else if s.strict() {
                Sign::Pos
            } else if s == Sign::Zero {
                Sign::Zero
            } else {
                Sign::NonNeg
            }
        }
        Expr::Pow(a, Exponent::Param) => match expr_sign(a) {
            Sign::Pos => Sign::Pos,
            Sign::NonNeg => Sign::NonNeg,
            Sign::Zero => Sign::Zero,
            _ => Sign::Any,
        },
        Expr::Abs(a) => match expr_sign(a) {
            s if s.strict() => Sign::Pos,
            Sign::Zero => Sign::Zero,
            _ => Sign::NonNeg,
        },
        Expr::Sqrt(a) => match expr_sign(a) {
            Sign::Pos => Sign::Pos,
            Sign::Zero => Sign::Zero,
            _ => Sign::NonNeg,
        },
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Violation {
    pub trial: u64,
    pub construction: Construction,
    pub instance: Instance,
    pub verdict: Verdict,
    /// Accepted shrinking steps.
    pub shrink_steps: u32,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TheoremReport {
    pub id: String,
    pub trials: u64,
    pub premise_hits: u64,
    pub premise_unknown: u64,
    pub conclusion_unknown: u64,
    pub violations: Vec<Violation>,
    pub expect_violations: bool,
}

impl TheoremReport {
    pub fn new(spec: &TheoremSpec) -> Self {
        Self {
            id: spec.id.into(),
            trials: 0,
            premise_hits: 0,
            premise_unknown: 0,
            conclusion_unknown: 0,
            violations: Vec::new(),
            expect_violations: spec.expect_violations,
        }
    }

    pub fn hit_rate(&self) -> f64 {
        if self.trials == 0 {
            0.0
        } else {
            self.premise_hits as f64 / self.trials as f64
        }
    }

    /// Closure suites pass with no violations and a nonzero hit rate;
    /// negative controls pass when a violation was found.
    pub fn passed(&self) -> bool {
        if self.expect_violations {
            !self.violations.is_empty()
        } else {
            self.violations.is_empty() && self.premise_hits > 0
        }
    }

    /// Fold one trial into the report. Trials must arrive in index order
    /// for reports to be reproducible.
    pub fn absorb(&mut self, outcome: TrialOutcome) {
        self.trials += 1;
        match outcome {
            TrialOutcome::PremiseFalse => {}
            TrialOutcome::PremiseUnknown => self.premise_unknown += 1,
            TrialOutcome::Hit { conclusion_unknown, violation } => {
                self.premise_hits += 1;
                if conclusion_unknown {
                    self.conclusion_unknown += 1;
                }
                if let Some(v) = violation {
                    self.violations.push(v);
                }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum TrialOutcome {
    PremiseFalse,
    PremiseUnknown,
    Hit { conclusion_unknown: bool, violation: Option<Violation> },
}

/// Generator for trial `index`; depends only on the seed and the index.
pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Run one trial. `shrink` controls whether a violation is minimized.
pub fn run_trial(spec: &TheoremSpec, cfg: &FuzzConfig, index: u64, shrink: bool) -> TrialOutcome {
    let mut rng = trial_rng(cfg.seed, index);
    let Some(inst) = generate(spec.profile, cfg, &mut rng) else {
        return TrialOutcome::PremiseFalse;
    };
    let ev = evaluate_instance(spec, &inst);
    match ev.premises {
        Holds::False => TrialOutcome::PremiseFalse,
        Holds::Unknown => TrialOutcome::PremiseUnknown,
        Holds::True => {
            let violation = ev.violated().map(|o| {
                let (instance, shrink_steps) = if shrink { shrink_violation(spec, inst.clone(), o.construction) } else { (inst.clone(), 0) };
                let verdict = final_verdict(spec, &instance, o.construction).unwrap_or_else(|| o.verdict.clone().expect("violation verdict"));
                Violation { trial: index, construction: o.construction, instance, verdict, shrink_steps }
            });
            TrialOutcome::Hit { conclusion_unknown: ev.conclusion_unknown(), violation }
        }
    }
}

fn final_verdict(spec: &TheoremSpec, inst: &Instance, c: Construction) -> Option<Verdict> {
    c.apply(inst).ok().and_then(|h| check(&h, &inst.point, spec.conclusion).ok())
}

/// Premise-conditional fuzzing of one statement.
pub fn run_theorem(spec: &TheoremSpec, cfg: &FuzzConfig) -> TheoremReport {
    let mut report = TheoremReport::new(spec);
    let mut index = 0u64;
    while index < cfg.max_trials.max(cfg.trials) && (index < cfg.trials || report.premise_hits < cfg.min_premise_hits) {
        let shrink = report.violations.len() < cfg.shrink_limit;
        report.absorb(run_trial(spec, cfg, index, shrink));
        index += 1;
    }
    report
}

fn still_violates(spec: &TheoremSpec, inst: &Instance, c: Construction) -> bool {
    let ev = evaluate_instance(spec, inst);
    ev.premises == Holds::True && ev.outcomes.iter().any(|o| o.construction == c && matches!(&o.verdict, Ok(v) if v.holds == Holds::False))
}

const SHRINK_STEPS: u32 = 64;

/// Greedy minimization: drop branches and simplify expressions while the
/// instance still violates the same construction.
pub fn shrink_violation(spec: &TheoremSpec, mut inst: Instance, c: Construction) -> (Instance, u32) {
    if inst.approximants.is_some() {
        return (inst, 0);
    }
    let mut steps = 0;
    'outer: while steps < SHRINK_STEPS {
        let defined = |i: &Instance| i.f.evaluate(&i.point).is_ok() && i.g.as_ref().is_none_or(|g| g.evaluate(&i.point).is_ok());
        let keep_defined = defined(&inst);
        for cand in shrink_candidates(&inst) {
            if (!keep_defined || defined(&cand)) && still_violates(spec, &cand, c) {
                inst = cand;
                steps += 1;
                continue 'outer;
            }
        }
        break;
    }
    (inst, steps)
}

fn shrink_candidates(inst: &Instance) -> Vec<Instance> {
    let mut out = Vec::new();
    for role in [Role::F, Role::G] {
        let Some(f) = inst.role(role) else { continue };
        let bs = f.branches();
        let mut fns = Vec::new();
        for i in 0..bs.len().saturating_sub(1) {
            let mut nb = bs.to_vec();
            nb.remove(i);
            fns.push(nb);
        }
        for (i, b) in bs.iter().enumerate() {
            for e in expr_shrinks(&b.expr) {
                let mut nb = bs.to_vec();
                nb[i] = Branch::new(b.region.clone(), e);
                fns.push(nb);
            }
        }
        for nb in fns {
            if let Ok(h) = PiecewiseFn::new(f.domain().clone(), nb) {
                let mut c = inst.clone();
                match role {
                    Role::F => c.f = h,
                    Role::G => c.g = Some(h),
                }
                out.push(c);
            }
        }
    }
    out
}

fn expr_shrinks(e: &Expr) -> Vec<Expr> {
    let zero = FieldElement::zero();
    let one = FieldElement::one();
    let mut out = Vec::new();
    match e {
        Expr::Const(c) => {
            if !c.is_zero() {
                out.push(Expr::Const(zero));
            }
            let s = FieldElement::from_int(c.signum() as i64);
            if *c != s && c.abs() != one {
                out.push(Expr::Const(s));
            }
        }
        Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) => {
            out.push((**a).clone());
            out.push((**b).clone());
            for x in expr_shrinks(a) {
                out.push(rebuild(e, x, (**b).clone()));
            }
            for y in expr_shrinks(b) {
                out.push(rebuild(e, (**a).clone(), y));
            }
        }
        Expr::Div(a, b) => {
            out.push((**a).clone());
            for x in expr_shrinks(a) {
                out.push(Expr::div(x, (**b).clone()));
            }
        }
        Expr::Neg(a) | Expr::Abs(a) | Expr::Pow(a, _) => out.push((**a).clone()),
        _ => {}
    }
    out
}

fn rebuild(e: &Expr, a: Expr, b: Expr) -> Expr {
    match e {
        Expr::Add(..) => Expr::add(a, b),
        Expr::Sub(..) => Expr::sub(a, b),
        _ => Expr::mul(a, b),
    }
}

// ---------------------------------------------------------------- generators

struct Gen<'a> {
    cfg: &'a FuzzConfig,
    rng: &'a mut ChaCha8Rng,
    point: FieldElement,
    /// Sequence sets available to guards.
    sets: Vec<StructuredSet>,
}

#[derive(Clone, Copy)]
enum Shape {
    Poly { poles: bool },
    /// Every branch `s·(k + w²)` with `k > 0`.
    Nonvanishing { sign: Option<i64> },
    Nonnegative,
}

impl Gen<'_> {
    fn int(&mut self, lo: i64, hi: i64) -> i64 {
        self.rng.gen_range(lo..=hi)
    }

    fn coeff(&mut self) -> FieldElement {
        let r = self.cfg.coeff_range.max(1);
        let n = self.int(-r, r);
        if self.rng.gen_bool(0.2) {
            FieldElement::from_ratio(2 * n + 1, 2)
        } else {
            FieldElement::from_int(n)
        }
    }

    fn nonzero_coeff(&mut self) -> FieldElement {
        loop {
            let c = self.coeff();
            if !c.is_zero() {
                return c;
            }
        }
    }

    fn scale(&mut self) -> FieldElement {
        let i = self.rng.gen_range(0..self.cfg.scales.len());
        self.cfg.scales[i].clone()
    }

    fn gen_set(&mut self, range: Option<IndexRange>) -> StructuredSet {
        let range = range.unwrap_or_else(|| match self.int(0, 9) {
            0 | 1 => IndexRange::Positive,
            2 => IndexRange::Negative,
            _ => IndexRange::All,
        });
        let s = self.scale();
        StructuredSet::gen(s, range).expect("nonzero scale")
    }

    /// `x − a`.
    fn u(&self) -> Expr {
        if self.point.is_zero() {
            Expr::Var
        } else {
            Expr::sub(Expr::Var, Expr::Const(self.point.clone()))
        }
    }

    /// `c0 + c1·u + c2·u²` with the constant either given or drawn.
    fn poly(&mut self, c0: Option<FieldElement>) -> Expr {
        let c0 = c0.unwrap_or_else(|| self.coeff());
        let mut e = Expr::Const(c0);
        let u = self.u();
        let c1 = self.coeff();
        if !c1.is_zero() {
            e = Expr::add(e, Expr::mul(Expr::Const(c1), u.clone()));
        }
        if self.rng.gen_bool(0.35) {
            let c2 = self.nonzero_coeff();
            e = Expr::add(e, Expr::mul(Expr::Const(c2), Expr::pow(u, 2)));
        }
        e
    }

    fn pole(&mut self, c: FieldElement) -> Expr {
        let u = self.u();
        if self.rng.gen_bool(0.6) {
            Expr::div(Expr::Const(c), Expr::abs(u))
        } else {
            Expr::div(Expr::Const(c), u)
        }
    }

    fn atom(&mut self) -> GuardAtom {
        let a = self.point.clone();
        let k = self.int(0, 19);
        if self.sets.is_empty() || k < 8 {
            let op = [CmpOp::Lt, CmpOp::Le, CmpOp::Gt, CmpOp::Ge][self.int(0, 3) as usize];
            GuardAtom::cmp_x(op, a)
        } else if k < 15 {
            let i = self.rng.gen_range(0..self.sets.len());
            GuardAtom::In(self.sets[i].clone())
        } else if k < 18 {
            let i = self.rng.gen_range(0..self.sets.len());
            GuardAtom::NotIn(self.sets[i].clone())
        } else {
            GuardAtom::In(StructuredSet::points(vec![a]))
        }
    }

    fn region(&mut self) -> Region {
        let n = if self.rng.gen_bool(0.3) { 2 } else { 1 };
        Region::new((0..n).map(|_| self.atom()).collect())
    }

    fn domain(&mut self) -> StructuredSet {
        if !self.point.is_zero() || self.rng.gen_bool(0.7) {
            return StructuredSet::line();
        }
        let mut d = StructuredSet::points(vec![FieldElement::zero()]);
        let n = self.int(1, 2);
        for _ in 0..n {
            let s = self.gen_set(None);
            self.sets.push(s.clone());
            d = d.union(s);
        }
        d
    }

    fn expr(&mut self, shape: Shape, shared: Option<&FieldElement>, pole: Option<&FieldElement>) -> Expr {
        match shape {
            Shape::Poly { .. } => {
                let e = self.poly(shared.cloned());
                match pole {
                    Some(c) => {
                        let p = self.pole(c.clone());
                        Expr::add(e, p)
                    }
                    None => e,
                }
            }
            Shape::Nonvanishing { sign } => {
                let k = match shared {
                    Some(k) => k.clone(),
                    None => FieldElement::from_ratio(self.int(1, 6), 2),
                };
                let w = self.poly(Some(FieldElement::zero()));
                let inner = Expr::add(Expr::Const(k), Expr::pow(w, 2));
                let s = sign.unwrap_or_else(|| if self.rng.gen_bool(0.5) { 1 } else { -1 });
                if s < 0 {
                    Expr::neg(inner)
                } else {
                    inner
                }
            }
            Shape::Nonnegative => {
                let w = self.poly(shared.cloned());
                match self.int(0, 2) {
                    0 => Expr::pow(w, 2),
                    1 => Expr::abs(w),
                    _ => {
                        let c = FieldElement::from_int(self.int(0, 3));
                        Expr::add(Expr::pow(w, 2), Expr::mul(Expr::Const(c), Expr::pow(self.u(), 2)))
                    }
                }
            }
        }
    }

    /// Piecewise function with an `else` tail. `sc_bias` is the chance
    /// that every branch shares the value at the point.
    fn function(&mut self, domain: &StructuredSet, shape: Shape, sc_bias: f64) -> PiecewiseFn {
        let n = self.rng.gen_range(1..=self.cfg.max_branches.max(1));
        let shared = if self.rng.gen_bool(sc_bias) {
            Some(match shape {
                Shape::Nonvanishing { .. } => FieldElement::from_ratio(self.int(1, 6), 2),
                _ => self.coeff(),
            })
        } else {
            None
        };
        let pole_c = match shape {
            Shape::Poly { poles: true } if self.rng.gen_bool(0.5) => Some(self.nonzero_coeff()),
            _ => None,
        };
        let mut branches = Vec::with_capacity(n + 1);
        if pole_c.is_some() {
            // keep the point itself away from the pole
            let v = self.coeff();
            branches.push(Branch::new(Region::new(vec![GuardAtom::In(StructuredSet::points(vec![self.point.clone()]))]), Expr::Const(v)));
        }
        for i in 0..n {
            let with_pole = pole_c.as_ref().filter(|_| shared.is_some() || self.rng.gen_bool(0.7));
            let e = self.expr(shape, shared.as_ref(), with_pole);
            if i + 1 == n {
                branches.push(Branch::otherwise(e));
            } else {
                let r = self.region();
                branches.push(Branch::new(r, e));
            }
        }
        PiecewiseFn::new(domain.clone(), branches).expect("generated function has an else branch")
    }

    /// `{x ∈ A: c + r·x; x > 0: p; else: q}` on the line, `A` a sequence set.
    fn motif(&mut self, set: StructuredSet) -> PiecewiseFn {
        let c = self.coeff();
        let r = self.coeff();
        let e = Expr::add(Expr::Const(c), Expr::mul(Expr::Const(r), Expr::Var));
        let (p, q) = (self.coeff(), self.coeff());
        PiecewiseFn::new(
            StructuredSet::line(),
            vec![
                Branch::new(Region::new(vec![GuardAtom::In(set)]), e),
                Branch::new(Region::new(vec![GuardAtom::cmp_x(CmpOp::Gt, FieldElement::zero())]), Expr::Const(p)),
                Branch::otherwise(Expr::Const(q)),
            ],
        )
        .expect("motif has an else branch")
    }

    /// Continuous piecewise-affine map with at most three pieces.
    fn lipschitz(&mut self) -> (PiecewiseFn, FieldElement) {
        let pieces = self.int(1, 3) as usize;
        let mut breaks: Vec<i64> = Vec::new();
        while breaks.len() + 1 < pieces {
            let b = self.int(-3, 3);
            if !breaks.contains(&b) {
                breaks.push(b);
            }
        }
        breaks.sort_unstable();
        let slope = |g: &mut Self| FieldElement::from_ratio(g.int(-4, 4), 2);
        let mut slopes: Vec<FieldElement> = (0..pieces).map(|_| slope(self)).collect();
        if slopes.iter().all(|s| s.is_zero()) {
            slopes[0] = FieldElement::one();
        }
        let c0 = self.coeff();
        // value at the first breakpoint, then carried across for continuity
        let mut branches = Vec::new();
        let mut anchor = FieldElement::zero();
        let mut value = c0;
        for (i, s) in slopes.iter().enumerate() {
            let e = Expr::add(Expr::Const(value.clone()), Expr::mul(Expr::Const(s.clone()), Expr::sub(Expr::Var, Expr::Const(anchor.clone()))));
            if i + 1 == pieces {
                branches.push(Branch::otherwise(e));
            } else {
                let b = FieldElement::from_int(breaks[i]);
                branches.push(Branch::new(Region::new(vec![GuardAtom::cmp_x(CmpOp::Lt, b.clone())]), e));
                value = &value + &(s * &(&b - &anchor));
                anchor = b;
            }
        }
        let lip = slopes.iter().map(FieldElement::abs).fold(FieldElement::zero(), |m, s| m.max(s));
        (PiecewiseFn::new(StructuredSet::line(), branches).expect("else branch present"), lip)
    }
}

fn pick_point(rng: &mut ChaCha8Rng) -> FieldElement {
    match rng.gen_range(0..10) {
        0 => FieldElement::one(),
        1 => FieldElement::from_ratio(-1, 2),
        _ => FieldElement::zero(),
    }
}

/// Draw one instance for a profile; `None` when the draw is degenerate.
pub fn generate(profile: Profile, cfg: &FuzzConfig, rng: &mut ChaCha8Rng) -> Option<Instance> {
    let point = pick_point(rng);
    let mut g = Gen { cfg, rng, point: point.clone(), sets: Vec::new() };
    let poly = Shape::Poly { poles: false };
    let inst = match profile {
        Profile::Single => {
            let d = g.domain();
            let f = g.function(&d, poly, 0.5);
            let mut inst = Instance::single(point, f);
            inst.scalar = g.coeff();
            inst
        }
        Profile::Pair | Profile::PairPoles => {
            let d = g.domain();
            let f = g.function(&d, poly, 0.5);
            let gs = if profile == Profile::PairPoles { Shape::Poly { poles: true } } else { poly };
            let h = g.function(&d, gs, 0.85);
            Instance::pair(point, f, h)
        }
        Profile::PairWeak => {
            if g.rng.gen_bool(0.5) {
                g.point = FieldElement::zero();
                let s1 = g.gen_set(Some(IndexRange::All));
                let mut s2 = g.gen_set(Some(IndexRange::All));
                if s2 == s1 {
                    s2 = StructuredSet::gen(FieldElement::sqrt_radicand(2).ok()?, IndexRange::All).ok()?;
                }
                let f = g.motif(s1);
                let h = g.motif(s2);
                Instance::pair(FieldElement::zero(), f, h)
            } else {
                let d = g.domain();
                let f = g.function(&d, poly, 0.4);
                let h = g.function(&d, poly, 0.4);
                Instance::pair(point, f, h)
            }
        }
        Profile::Nonvanishing => {
            let d = g.domain();
            let f = g.function(&d, Shape::Nonvanishing { sign: None }, 0.5);
            Instance::single(point, f)
        }
        Profile::Quotient => {
            let d = g.domain();
            let f = g.function(&d, poly, 0.5);
            let s = if g.rng.gen_bool(0.5) { 1 } else { -1 };
            let h = g.function(&d, Shape::Nonvanishing { sign: Some(s) }, 0.85);
            Instance::pair(point, f, h)
        }
        Profile::Composition => {
            let d = g.domain();
            let f = g.function(&d, poly, 0.5);
            let (h, lip) = g.lipschitz();
            let mut inst = Instance::pair(point, f, h);
            inst.cert = Some(UniformContinuityCert::Lipschitz { constant: lip, scope: StructuredSet::line() });
            inst
        }
        Profile::CompositionContinuous => {
            let d = g.domain();
            let f = g.function(&d, Shape::Poly { poles: true }, 0.8);
            let p = g.nonzero_coeff();
            let q = g.coeff();
            let lin = Expr::mul(Expr::Const(q), Expr::Var);
            let quad = Expr::add(Expr::mul(Expr::Const(p), Expr::pow(Expr::Var, 2)), lin.clone());
            let h = PiecewiseFn::new(
                StructuredSet::line(),
                vec![Branch::new(Region::new(vec![GuardAtom::cmp_x(CmpOp::Ge, FieldElement::zero())]), quad), Branch::otherwise(lin)],
            )
            .ok()?;
            Instance::pair(point, f, h)
        }
        Profile::Nonnegative => {
            let d = g.domain();
            let f = g.function(&d, Shape::Nonnegative, 0.5);
            Instance::single(point, f)
        }
        Profile::UniformFamily => {
            let d = g.domain();
            let f = g.function(&d, poly, 0.5);
            let c = g.nonzero_coeff();
            let k_max = g.int(2, 6) as u32;
            let branches = f.branches().iter().map(|b| Branch::new(b.region.clone(), Expr::add(b.expr.clone(), Expr::div(Expr::Const(c.clone()), Expr::Param)))).collect();
            let family = FnFamily { param: "k".into(), domain: d, branches };
            let bounds = (1..=k_max).map(|k| &c.abs() / &FieldElement::from_int(k as i64)).collect();
            let mut inst = Instance::single(point, f);
            inst.approximants = Some(Approximants { family, bounds, k_max });
            inst
        }
    };
    Some(inst)
}

// ------------------------------------------------------------ uniform limits

#[derive(Clone, Debug, PartialEq)]
pub struct UniformLimitReport {
    /// WSC verdict of each approximant at the point.
    pub approximants: Vec<Holds>,
    /// Sampled `sup |f_k − f|` for each `k`.
    pub sampled_sup: Vec<f64>,
    /// First `k` whose sampled distance exceeds its bound.
    pub non_uniform: Option<u32>,
    pub limit_verdict: Result<Verdict, String>,
}

impl UniformLimitReport {
    /// Status of the hypotheses: every approximant WSC and every sampled
    /// distance within bound.
    pub fn premise(&self) -> Holds {
        if self.non_uniform.is_some() || self.approximants.contains(&Holds::False) {
            Holds::False
        } else if self.approximants.contains(&Holds::Unknown) || self.approximants.is_empty() {
            Holds::Unknown
        } else {
            Holds::True
        }
    }

    /// `Some(false)` would contradict the theorem.
    pub fn theorem_holds(&self) -> Option<bool> {
        if self.premise() != Holds::True {
            return None;
        }
        match &self.limit_verdict {
            Ok(v) => v.holds.as_bool(),
            Err(_) => None,
        }
    }

    pub fn describe(&self) -> String {
        match self.non_uniform {
            Some(k) => format!("sampled sup at k={} is {:.6} above its bound", k, self.sampled_sup[k as usize - 1]),
            None => format!("approximant verdicts {:?}", self.approximants),
        }
    }
}

/// Points for sup sampling: a grid over each atom of the domain plus
/// points crowding every landmark from both sides.
pub fn uniform_sample_points(domain: &StructuredSet, landmarks: &[FieldElement]) -> Vec<FieldElement> {
    let mut pts = Vec::new();
    let grid = |lo: &FieldElement, hi: &FieldElement, out: &mut Vec<FieldElement>| {
        let n = 192i64;
        let w = hi - lo;
        for i in 0..=n {
            out.push(lo + &(&w * &FieldElement::from_ratio(i, n)));
        }
    };
    for atom in domain.atoms() {
        match atom {
            SetAtom::Interval(iv) => {
                let lo = iv.lo.value().cloned().unwrap_or_else(|| FieldElement::from_int(-8));
                let hi = iv.hi.value().cloned().unwrap_or_else(|| FieldElement::from_int(8));
                grid(&lo, &hi, &mut pts);
            }
            SetAtom::Gen(g) => {
                for n in 1..=96i64 {
                    for s in [1, -1] {
                        pts.push(g.scale() / &FieldElement::from_int(s * n));
                    }
                }
            }
            SetAtom::Points(p) => pts.extend(p.iter().cloned()),
        }
    }
    let mut near = FieldElement::one();
    let half = FieldElement::from_ratio(1, 2);
    for _ in 0..32 {
        near = &near * &half;
        for l in landmarks {
            pts.push(l + &near);
            pts.push(l - &near);
        }
    }
    pts.retain(|x| domain.contains(x));
    pts
}

/// Uniform-limit statement for `f_1..f_K`: approximants WSC at `a`,
/// sampled distances within the declared bounds, then the limit's own
/// WSC verdict.
pub fn uniform_limit_check(family: &FnFamily, limit_fn: &PiecewiseFn, error_bounds: &[FieldElement], a: &FieldElement, k_max: u32) -> UniformLimitReport {
    let mut landmarks = limit_fn.special_points();
    landmarks.push(a.clone());
    let pts = uniform_sample_points(limit_fn.domain(), &landmarks);
    let mut approximants = Vec::new();
    let mut sampled_sup = Vec::new();
    let mut non_uniform = None;
    for k in 1..=k_max {
        let fk = match family.instantiate(k) {
            Ok(f) => f,
            Err(_) => {
                approximants.push(Holds::Unknown);
                sampled_sup.push(f64::NAN);
                continue;
            }
        };
        approximants.push(check(&fk, a, Property::Wsc).map(|v| v.holds).unwrap_or(Holds::Unknown));
        let d = sup_distance(&fk, limit_fn, &pts);
        sampled_sup.push(d);
        let bound = error_bounds.get(k as usize - 1).map(FieldElement::to_f64).unwrap_or(f64::INFINITY);
        if non_uniform.is_none() && d > bound + 1e-9 {
            non_uniform = Some(k);
        }
    }
    let limit_verdict = check(limit_fn, a, Property::Wsc).map_err(|e| format!("{e}"));
    UniformLimitReport { approximants, sampled_sup, non_uniform, limit_verdict }
}

// --------------------------------------------------------- relation matrix

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationCase {
    pub name: String,
    pub f: PiecewiseFn,
    /// Points to test; the special points when `None`.
    pub points: Option<Vec<FieldElement>>,
    /// Expected function-level membership in (SC, WC, WSC).
    pub expected: Option<[bool; 3]>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Membership {
    pub name: String,
    pub sc: Holds,
    pub wc: Holds,
    pub wsc: Holds,
    pub points_tested: usize,
}

impl Membership {
    pub fn row(&self) -> [Holds; 3] {
        [self.sc, self.wc, self.wsc]
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationItem {
    pub label: &'static str,
    pub holds: bool,
    /// Case realizing a non-inclusion, or the first counterexample to an
    /// inclusion.
    pub witness: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationReport {
    pub memberships: Vec<Membership>,
    pub items: Vec<RelationItem>,
    /// Cases whose membership differs from the expected row.
    pub mismatches: Vec<String>,
    pub errors: Vec<String>,
}

impl RelationReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty() && self.errors.is_empty() && self.items.iter().all(|i| i.holds)
    }
}

fn fold(a: Holds, b: Holds) -> Holds {
    match (a, b) {
        (Holds::False, _) | (_, Holds::False) => Holds::False,
        (Holds::Unknown, _) | (_, Holds::Unknown) => Holds::Unknown,
        _ => Holds::True,
    }
}

/// Function-level membership at the tested points and the inclusion /
/// non-inclusion matrix among SC, WC and WSC.
pub fn relation_suite(cases: &[RelationCase]) -> RelationReport {
    let mut memberships = Vec::new();
    let mut errors = Vec::new();
    let mut mismatches = Vec::new();
    let mut sc_not_wsc = None;
    for case in cases {
        let rows = match classify(&case.f, case.points.as_deref()) {
            Ok(r) => r,
            Err(e) => {
                errors.push(format!("{}: {e}", case.name));
                continue;
            }
        };
        let mut m = Membership { name: case.name.clone(), sc: Holds::True, wc: Holds::True, wsc: Holds::True, points_tested: rows.len() };
        for r in &rows {
            m.sc = fold(m.sc, r.sc.holds);
            m.wc = fold(m.wc, r.wc.holds);
            m.wsc = fold(m.wsc, r.wsc.holds);
            if r.sc.holds == Holds::True && r.wsc.holds != Holds::True && sc_not_wsc.is_none() {
                sc_not_wsc = Some(format!("{} at {}", case.name, r.point));
            }
        }
        if let Some(exp) = case.expected {
            let got = m.row().map(|h| h.as_bool());
            if got != exp.map(Some) {
                mismatches.push(format!("{}: expected {:?}, got {:?}", case.name, exp, m.row()));
            }
        }
        memberships.push(m);
    }
    use Holds::{False as F, True as T};
    let find = |pred: &dyn Fn(&Membership) -> bool| memberships.iter().find(|m| pred(m)).map(|m| m.name.clone());
    let items = vec![
        RelationItem { label: "SC subset of WSC", holds: sc_not_wsc.is_none(), witness: sc_not_wsc },
        item("SC not subset of WC", find(&|m| m.sc == T && m.wc == F)),
        item("WSC not subset of SC", find(&|m| m.wsc == T && m.sc == F)),
        item("WSC not subset of SC union WC", find(&|m| m.wsc == T && m.sc == F && m.wc == F)),
        item("WSC and WC not subset of SC", find(&|m| m.wsc == T && m.wc == T && m.sc == F)),
        item("WC not subset of SC", find(&|m| m.wc == T && m.sc == F)),
        item("WC not subset of WSC", find(&|m| m.wc == T && m.wsc == F)),
        item("WSC not subset of WC", find(&|m| m.wsc == T && m.wc == F)),
    ];
    RelationReport { memberships, items, mismatches, errors }
}

fn item(label: &'static str, witness: Option<String>) -> RelationItem {
    RelationItem { label, holds: witness.is_some(), witness }
}
