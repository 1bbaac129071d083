//! Piecewise functions over structured domains, and the constructions
//! that combine them.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_traits::ToPrimitive;

use crate::field::{ExtReal, FieldElement, FieldError};
use crate::limits::{limit, path_at_scale, AsymptoticValue, PathError, PathNode};
use crate::sets::{region_germ, set_germ, Bound, CmpOp, GuardAtom, HSetDescriptor, Region, SetAtom, SetError, Side, StructuredSet};

/// Largest family index accepted by [`FnFamily::instantiate`].
pub const MAX_FAMILY_INDEX: u32 = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Exponent {
    Lit(u32),
    /// The family index `k`.
    Param,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Expr {
    Const(FieldElement),
    Var,
    /// The family index `k` used as a value.
    Param,
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Pow(Box<Expr>, Exponent),
    Abs(Box<Expr>),
    Sqrt(Box<Expr>),
}

// Node builders named after the operation they build.
#[allow(clippy::should_implement_trait)]
impl Expr {
    pub fn int(n: i64) -> Expr {
        Expr::Const(FieldElement::from_int(n))
    }

    pub fn add(a: Expr, b: Expr) -> Expr {
        Expr::Add(Box::new(a), Box::new(b))
    }

    pub fn sub(a: Expr, b: Expr) -> Expr {
        Expr::Sub(Box::new(a), Box::new(b))
    }

    pub fn mul(a: Expr, b: Expr) -> Expr {
        Expr::Mul(Box::new(a), Box::new(b))
    }

    pub fn div(a: Expr, b: Expr) -> Expr {
        Expr::Div(Box::new(a), Box::new(b))
    }

    pub fn neg(a: Expr) -> Expr {
        Expr::Neg(Box::new(a))
    }

    pub fn pow(a: Expr, k: u32) -> Expr {
        Expr::Pow(Box::new(a), Exponent::Lit(k))
    }

    pub fn abs(a: Expr) -> Expr {
        Expr::Abs(Box::new(a))
    }

    pub fn sqrt(a: Expr) -> Expr {
        Expr::Sqrt(Box::new(a))
    }

    pub fn mentions_param(&self) -> bool {
        match self {
            Expr::Param | Expr::Pow(_, Exponent::Param) => true,
            Expr::Const(_) | Expr::Var => false,
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => a.mentions_param() || b.mentions_param(),
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Abs(a) | Expr::Sqrt(a) => a.mentions_param(),
        }
    }

    pub fn has_sqrt(&self) -> bool {
        match self {
            Expr::Sqrt(_) => true,
            Expr::Const(_) | Expr::Var | Expr::Param => false,
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => a.has_sqrt() || b.has_sqrt(),
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Abs(a) => a.has_sqrt(),
        }
    }

    /// Replace `x` by `by`.
    pub fn substitute(&self, by: &Expr) -> Expr {
        let s = |e: &Expr| Box::new(e.substitute(by));
        match self {
            Expr::Var => by.clone(),
            Expr::Const(_) | Expr::Param => self.clone(),
            Expr::Add(a, b) => Expr::Add(s(a), s(b)),
            Expr::Sub(a, b) => Expr::Sub(s(a), s(b)),
            Expr::Mul(a, b) => Expr::Mul(s(a), s(b)),
            Expr::Div(a, b) => Expr::Div(s(a), s(b)),
            Expr::Neg(a) => Expr::Neg(s(a)),
            Expr::Pow(a, k) => Expr::Pow(s(a), *k),
            Expr::Abs(a) => Expr::Abs(s(a)),
            Expr::Sqrt(a) => Expr::Sqrt(s(a)),
        }
    }

    /// Bind the family index.
    pub fn instantiate(&self, k: u32) -> Expr {
        let s = |e: &Expr| Box::new(e.instantiate(k));
        match self {
            Expr::Param => Expr::int(i64::from(k)),
            Expr::Const(_) | Expr::Var => self.clone(),
            Expr::Add(a, b) => Expr::Add(s(a), s(b)),
            Expr::Sub(a, b) => Expr::Sub(s(a), s(b)),
            Expr::Mul(a, b) => Expr::Mul(s(a), s(b)),
            Expr::Div(a, b) => Expr::Div(s(a), s(b)),
            Expr::Neg(a) => Expr::Neg(s(a)),
            Expr::Pow(a, Exponent::Param) => Expr::Pow(s(a), Exponent::Lit(k)),
            Expr::Pow(a, e) => Expr::Pow(s(a), *e),
            Expr::Abs(a) => Expr::Abs(s(a)),
            Expr::Sqrt(a) => Expr::Sqrt(s(a)),
        }
    }

    /// Every constant in the tree.
    pub fn constants(&self, out: &mut Vec<FieldElement>) {
        match self {
            Expr::Const(c) => out.push(c.clone()),
            Expr::Var | Expr::Param => {}
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.constants(out);
                b.constants(out);
            }
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Abs(a) | Expr::Sqrt(a) => a.constants(out),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Neg(_) => 3,
            Expr::Pow(..) => 4,
            Expr::Const(c) if !c.is_rational() || c.is_negative() || !c.to_integer().is_some() => 2,
            _ => 5,
        }
    }
}

fn write_operand(f: &mut fmt::Formatter<'_>, e: &Expr, min_prec: u8) -> fmt::Result {
    if e.precedence() < min_prec {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => {
                if c.is_rational() && !c.is_negative() {
                    write!(f, "{c}")
                } else {
                    write!(f, "({c})")
                }
            }
            Expr::Var => f.write_str("x"),
            Expr::Param => f.write_str("k"),
            Expr::Add(a, b) => {
                write_operand(f, a, 1)?;
                f.write_str(" + ")?;
                write_operand(f, b, 2)
            }
            Expr::Sub(a, b) => {
                write_operand(f, a, 1)?;
                f.write_str(" - ")?;
                write_operand(f, b, 2)
            }
            Expr::Mul(a, b) => {
                write_operand(f, a, 2)?;
                f.write_str("*")?;
                write_operand(f, b, 3)
            }
            Expr::Div(a, b) => {
                write_operand(f, a, 2)?;
                f.write_str("/")?;
                write_operand(f, b, 3)
            }
            Expr::Neg(a) => {
                f.write_str("-")?;
                write_operand(f, a, 4)
            }
            Expr::Pow(a, k) => {
                write_operand(f, a, 5)?;
                match k {
                    Exponent::Lit(n) => write!(f, "^{n}"),
                    Exponent::Param => f.write_str("^k"),
                }
            }
            Expr::Abs(a) => write!(f, "abs({a})"),
            Expr::Sqrt(a) => write!(f, "sqrt({a})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("point is outside the domain")]
    OutOfDomain,
    #[error("value leaves the quadratic field")]
    NotInField,
    #[error("square root of a negative value")]
    SqrtOfNegative,
    #[error("division by zero")]
    DivisionByZero,
    #[error("unbound family parameter")]
    UnboundParameter,
    #[error("no branch matches the point")]
    NoBranch,
    #[error("field arithmetic: {0}")]
    Field(FieldError),
}

impl From<FieldError> for EvalError {
    fn from(e: FieldError) -> Self {
        match e {
            FieldError::DivisionByZero => EvalError::DivisionByZero,
            other => EvalError::Field(other),
        }
    }
}

pub fn eval_expr(e: &Expr, x: &FieldElement) -> Result<FieldElement, EvalError> {
    Ok(match e {
        Expr::Const(c) => c.clone(),
        Expr::Var => x.clone(),
        Expr::Param => return Err(EvalError::UnboundParameter),
        Expr::Add(a, b) => eval_expr(a, x)?.checked_add(&eval_expr(b, x)?)?,
        Expr::Sub(a, b) => eval_expr(a, x)?.checked_sub(&eval_expr(b, x)?)?,
        Expr::Mul(a, b) => eval_expr(a, x)?.checked_mul(&eval_expr(b, x)?)?,
        Expr::Div(a, b) => eval_expr(a, x)?.checked_div(&eval_expr(b, x)?)?,
        Expr::Neg(a) => -eval_expr(a, x)?,
        Expr::Pow(a, Exponent::Lit(k)) => eval_expr(a, x)?.pow(*k),
        Expr::Pow(_, Exponent::Param) => return Err(EvalError::UnboundParameter),
        Expr::Abs(a) => eval_expr(a, x)?.abs(),
        Expr::Sqrt(a) => {
            let v = eval_expr(a, x)?;
            if v.is_negative() {
                return Err(EvalError::SqrtOfNegative);
            }
            v.sqrt().ok_or(EvalError::NotInField)?
        }
    })
}

/// Float evaluation, used where exact values leave the field.
pub fn eval_expr_f64(e: &Expr, x: f64) -> f64 {
    match e {
        Expr::Const(c) => c.to_f64(),
        Expr::Var => x,
        Expr::Param => f64::NAN,
        Expr::Add(a, b) => eval_expr_f64(a, x) + eval_expr_f64(b, x),
        Expr::Sub(a, b) => eval_expr_f64(a, x) - eval_expr_f64(b, x),
        Expr::Mul(a, b) => eval_expr_f64(a, x) * eval_expr_f64(b, x),
        Expr::Div(a, b) => eval_expr_f64(a, x) / eval_expr_f64(b, x),
        Expr::Neg(a) => -eval_expr_f64(a, x),
        Expr::Pow(a, Exponent::Lit(k)) => libm::pow(eval_expr_f64(a, x), f64::from(*k)),
        Expr::Pow(_, Exponent::Param) => f64::NAN,
        Expr::Abs(a) => libm::fabs(eval_expr_f64(a, x)),
        Expr::Sqrt(a) => libm::sqrt(eval_expr_f64(a, x)),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Branch {
    pub region: Region,
    pub expr: Expr,
}

impl Branch {
    pub fn new(region: Region, expr: Expr) -> Self {
        Self { region, expr }
    }

    pub fn otherwise(expr: Expr) -> Self {
        Self { region: Region::always(), expr }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum FnError {
    #[error("function has no branches")]
    NoBranches,
    #[error("a function on a continuum domain needs a final else branch")]
    MissingElse,
    #[error("branches do not cover the domain near {0}")]
    NotTotal(String),
    #[error("domains differ")]
    DomainMismatch,
    #[error("operation needs a second function")]
    MissingOperand,
    #[error("unsupported construction: {0}")]
    Unsupported(String),
    #[error("family index {0} outside 1..={MAX_FAMILY_INDEX}")]
    FamilyIndex(u32),
    #[error("certificate rejected: {0}")]
    Certificate(String),
    #[error(transparent)]
    Set(#[from] SetError),
    #[error(transparent)]
    Path(#[from] PathError),
}

/// Ordered guarded branches; the first branch whose region holds applies.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PiecewiseFn {
    domain: StructuredSet,
    branches: Vec<Branch>,
}

impl PiecewiseFn {
    /// Build and check totality on the domain.
    pub fn new(domain: StructuredSet, branches: Vec<Branch>) -> Result<Self, FnError> {
        let f = Self { domain, branches };
        f.check_total()?;
        Ok(f)
    }

    /// Build without the totality check (for combinators whose result is
    /// total by construction).
    pub fn new_unchecked(domain: StructuredSet, branches: Vec<Branch>) -> Self {
        Self { domain, branches }
    }

    pub fn constant(domain: StructuredSet, c: FieldElement) -> Self {
        Self { domain, branches: vec![Branch::otherwise(Expr::Const(c))] }
    }

    pub fn domain(&self) -> &StructuredSet {
        &self.domain
    }

    pub fn branches(&self) -> &[Branch] {
        &self.branches
    }

    pub fn has_else(&self) -> bool {
        self.branches.last().is_some_and(|b| b.region.is_always())
    }

    fn check_total(&self) -> Result<(), FnError> {
        if self.branches.is_empty() {
            return Err(FnError::NoBranches);
        }
        if self.has_else() {
            return Ok(());
        }
        if self.domain.has_continuum() {
            return Err(FnError::MissingElse);
        }
        let covered = |x: &FieldElement| -> Result<bool, FnError> {
            for b in &self.branches {
                if b.region.contains(x).unwrap_or(false) {
                    return Ok(true);
                }
            }
            Ok(false)
        };
        for atom in self.domain.atoms() {
            match atom {
                SetAtom::Points(ps) => {
                    for p in ps {
                        if !covered(p)? {
                            return Err(FnError::NotTotal(p.to_string()));
                        }
                    }
                }
                SetAtom::Interval(iv) => {
                    // degenerate intervals only
                    for p in iv.lo.value().into_iter().chain(iv.hi.value()) {
                        if iv.contains(p) && !covered(p)? {
                            return Err(FnError::NotTotal(p.to_string()));
                        }
                    }
                }
                SetAtom::Gen(g) => {
                    let zero = FieldElement::zero();
                    let single = StructuredSet::new(vec![SetAtom::Gen(g.clone())]);
                    let mut radius: Option<FieldElement> = None;
                    for side in [Side::Left, Side::Right] {
                        let want = set_germ(&zero, side, &single)?;
                        let mut have = HSetDescriptor::empty();
                        for b in &self.branches {
                            have = have.union(&region_germ(&zero, side, &b.region)?)?;
                        }
                        let missing = want.difference(&have)?;
                        if !missing.is_empty() {
                            return Err(FnError::NotTotal(format!("0 on {}", g)));
                        }
                        if let Some(r) = missing.radius() {
                            radius = Some(match radius {
                                Some(old) => old.min(r.clone()),
                                None => r.clone(),
                            });
                        }
                    }
                    // members outside the exactness radius are finitely many
                    if let Some(r) = radius {
                        let last = (&g.scale().abs() / &r).floor().to_i64().unwrap_or(i64::MAX).saturating_add(1);
                        if last > 100_000 {
                            return Err(FnError::NotTotal(format!("far members of {}", g)));
                        }
                        for n in 1..=last {
                            for sign in [1, -1] {
                                let x = g.scale() / &FieldElement::from_int(sign * n);
                                if g.contains(&x) && !covered(&x)? {
                                    return Err(FnError::NotTotal(x.to_string()));
                                }
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Index of the branch that applies at `x`.
    pub fn branch_index(&self, x: &FieldElement) -> Result<usize, EvalError> {
        if !self.domain.contains(x) {
            return Err(EvalError::OutOfDomain);
        }
        for (i, b) in self.branches.iter().enumerate() {
            if b.region.contains(x)? {
                return Ok(i);
            }
        }
        Err(EvalError::NoBranch)
    }

    pub fn evaluate(&self, x: &FieldElement) -> Result<FieldElement, EvalError> {
        let i = self.branch_index(x)?;
        eval_expr(&self.branches[i].expr, x)
    }

    /// Exact branch choice, float value (for values that leave the field).
    pub fn evaluate_f64(&self, x: &FieldElement) -> Result<f64, EvalError> {
        let i = self.branch_index(x)?;
        match eval_expr(&self.branches[i].expr, x) {
            Ok(v) => Ok(v.to_f64()),
            Err(EvalError::NotInField) => Ok(eval_expr_f64(&self.branches[i].expr, x.to_f64())),
            Err(e) => Err(e),
        }
    }

    /// Radicand of the field the function lives in.
    pub fn radicand(&self) -> u32 {
        let mut consts = Vec::new();
        for b in &self.branches {
            b.expr.constants(&mut consts);
            for a in b.region.atoms() {
                match a {
                    GuardAtom::In(s) | GuardAtom::NotIn(s) => set_constants(s, &mut consts),
                    GuardAtom::Cmp { lhs, rhs, .. } => {
                        lhs.constants(&mut consts);
                        consts.push(rhs.clone());
                    }
                }
            }
        }
        set_constants(&self.domain, &mut consts);
        consts.iter().find(|c| !c.is_rational()).map_or(crate::field::DEFAULT_RADICAND, FieldElement::radicand)
    }

    /// Points where the branch structure can change: listed points,
    /// interval endpoints and comparison thresholds, plus 0.
    pub fn special_points(&self) -> Vec<FieldElement> {
        let mut pts = vec![FieldElement::zero()];
        pts.extend(self.domain.landmarks());
        for b in &self.branches {
            for a in b.region.atoms() {
                match a {
                    GuardAtom::In(s) | GuardAtom::NotIn(s) => pts.extend(s.landmarks()),
                    GuardAtom::Cmp { lhs: Expr::Var, rhs, .. } => pts.push(rhs.clone()),
                    GuardAtom::Cmp { .. } => {}
                }
            }
        }
        let mut out: Vec<FieldElement> = Vec::new();
        for p in pts {
            if self.domain.contains(&p) && !out.contains(&p) {
                out.push(p);
            }
        }
        out.sort();
        out
    }

    /// DSL text, `fn <name> on <domain> = piecewise { ... }`.
    pub fn to_dsl(&self, name: &str) -> String {
        let mut s = format!("fn {name} on {} = piecewise {{\n", self.domain);
        for b in &self.branches {
            s.push_str(&format!("  {} -> {},\n", b.region, b.expr));
        }
        s.push_str("}\n");
        s
    }
}

fn set_constants(s: &StructuredSet, out: &mut Vec<FieldElement>) {
    for a in s.atoms() {
        match a {
            SetAtom::Gen(g) => out.push(g.scale().clone()),
            SetAtom::Points(ps) => out.extend(ps.iter().cloned()),
            SetAtom::Interval(iv) => {
                out.extend(iv.lo.value().cloned());
                out.extend(iv.hi.value().cloned());
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Combinator {
    Abs,
    Scale(FieldElement),
    Add,
    Sub,
    Max,
    Min,
    Mul,
    Recip,
    Quotient,
    /// `g ∘ f` with `g` the second operand.
    Compose,
    Sqrt,
}

impl Combinator {
    pub fn is_binary(&self) -> bool {
        matches!(self, Combinator::Add | Combinator::Sub | Combinator::Max | Combinator::Min | Combinator::Mul | Combinator::Quotient | Combinator::Compose)
    }

    pub fn name(&self) -> &'static str {
        match self {
            Combinator::Abs => "abs",
            Combinator::Scale(_) => "scale",
            Combinator::Add => "add",
            Combinator::Sub => "sub",
            Combinator::Max => "max",
            Combinator::Min => "min",
            Combinator::Mul => "mul",
            Combinator::Recip => "recip",
            Combinator::Quotient => "quotient",
            Combinator::Compose => "compose",
            Combinator::Sqrt => "sqrt",
        }
    }
}

fn half(e: Expr) -> Expr {
    Expr::div(e, Expr::int(2))
}

fn map_branches(f: &PiecewiseFn, op: impl Fn(&Expr) -> Expr) -> PiecewiseFn {
    PiecewiseFn::new_unchecked(f.domain.clone(), f.branches.iter().map(|b| Branch::new(b.region.clone(), op(&b.expr))).collect())
}

/// Product refinement: branch `(i, j)` applies where `f` uses branch `i`
/// and `g` uses branch `j`. Both operands are total, so first match on
/// the lexicographic order reproduces both choices.
fn product(f: &PiecewiseFn, g: &PiecewiseFn, op: impl Fn(&Expr, &Expr) -> Expr) -> Result<PiecewiseFn, FnError> {
    if f.domain != g.domain {
        return Err(FnError::DomainMismatch);
    }
    let mut branches = Vec::new();
    for bf in &f.branches {
        for bg in &g.branches {
            branches.push(Branch::new(bf.region.and(&bg.region), op(&bf.expr, &bg.expr)));
        }
    }
    Ok(PiecewiseFn::new_unchecked(f.domain.clone(), branches))
}

/// Rewrite `outer(x)` guards as guards on `inner(x)`.
fn substitute_region(r: &Region, inner: &Expr) -> Result<Region, FnError> {
    let mut atoms = Vec::new();
    for a in r.atoms() {
        match a {
            GuardAtom::Cmp { lhs, op, rhs } => atoms.push(GuardAtom::Cmp { lhs: lhs.substitute(inner), op: *op, rhs: rhs.clone() }),
            GuardAtom::In(s) => match s.atoms() {
                [SetAtom::Interval(iv)] => {
                    match &iv.lo {
                        Bound::Unbounded => {}
                        Bound::Closed(v) => atoms.push(GuardAtom::Cmp { lhs: inner.clone(), op: CmpOp::Ge, rhs: v.clone() }),
                        Bound::Open(v) => atoms.push(GuardAtom::Cmp { lhs: inner.clone(), op: CmpOp::Gt, rhs: v.clone() }),
                    }
                    match &iv.hi {
                        Bound::Unbounded => {}
                        Bound::Closed(v) => atoms.push(GuardAtom::Cmp { lhs: inner.clone(), op: CmpOp::Le, rhs: v.clone() }),
                        Bound::Open(v) => atoms.push(GuardAtom::Cmp { lhs: inner.clone(), op: CmpOp::Lt, rhs: v.clone() }),
                    }
                }
                _ => return Err(FnError::Unsupported(format!("outer guard `{a}` in a composition"))),
            },
            GuardAtom::NotIn(_) => return Err(FnError::Unsupported(format!("outer guard `{a}` in a composition"))),
        }
    }
    Ok(Region::new(atoms))
}

pub fn combine(op: &Combinator, f: &PiecewiseFn, g: Option<&PiecewiseFn>) -> Result<PiecewiseFn, FnError> {
    let second = || g.ok_or(FnError::MissingOperand);
    Ok(match op {
        Combinator::Abs => map_branches(f, |e| Expr::abs(e.clone())),
        Combinator::Scale(c) if c.is_zero() => PiecewiseFn::constant(f.domain.clone(), FieldElement::zero()),
        Combinator::Scale(c) => map_branches(f, |e| Expr::mul(Expr::Const(c.clone()), e.clone())),
        Combinator::Recip => map_branches(f, |e| Expr::div(Expr::int(1), e.clone())),
        Combinator::Sqrt => map_branches(f, |e| Expr::sqrt(e.clone())),
        Combinator::Add => product(f, second()?, |a, b| Expr::add(a.clone(), b.clone()))?,
        Combinator::Sub => product(f, second()?, |a, b| Expr::sub(a.clone(), b.clone()))?,
        Combinator::Mul => product(f, second()?, |a, b| Expr::mul(a.clone(), b.clone()))?,
        Combinator::Quotient => product(f, second()?, |a, b| Expr::div(a.clone(), b.clone()))?,
        Combinator::Max => product(f, second()?, |a, b| {
            half(Expr::add(Expr::add(a.clone(), b.clone()), Expr::abs(Expr::sub(a.clone(), b.clone()))))
        })?,
        Combinator::Min => product(f, second()?, |a, b| {
            half(Expr::sub(Expr::add(a.clone(), b.clone()), Expr::abs(Expr::sub(a.clone(), b.clone()))))
        })?,
        Combinator::Compose => {
            let outer = second()?;
            if !outer.has_else() {
                return Err(FnError::Unsupported("outer function of a composition needs an else branch".into()));
            }
            let mut branches = Vec::new();
            for bf in &f.branches {
                for bg in &outer.branches {
                    let guard = substitute_region(&bg.region, &bf.expr)?;
                    branches.push(Branch::new(bf.region.and(&guard), bg.expr.substitute(&bf.expr)));
                }
            }
            PiecewiseFn::new_unchecked(f.domain.clone(), branches)
        }
    })
}

/// Piecewise template indexed by `k ≥ 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FnFamily {
    pub param: String,
    pub domain: StructuredSet,
    pub branches: Vec<Branch>,
}

impl FnFamily {
    pub fn instantiate(&self, k: u32) -> Result<PiecewiseFn, FnError> {
        if k == 0 || k > MAX_FAMILY_INDEX {
            return Err(FnError::FamilyIndex(k));
        }
        let branches = self
            .branches
            .iter()
            .map(|b| {
                let atoms = b
                    .region
                    .atoms()
                    .iter()
                    .map(|a| match a {
                        GuardAtom::Cmp { lhs, op, rhs } => GuardAtom::Cmp { lhs: lhs.instantiate(k), op: *op, rhs: rhs.clone() },
                        other => other.clone(),
                    })
                    .collect();
                Branch::new(Region::new(atoms), b.expr.instantiate(k))
            })
            .collect();
        PiecewiseFn::new(self.domain.clone(), branches)
    }
}

/// Evidence that the outer map of a composition is uniformly continuous.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum UniformContinuityCert {
    Lipschitz { constant: FieldElement, scope: StructuredSet },
    SqrtOnNonnegatives,
    /// Checked by sampling in the oracle.
    Declared { budget: u64 },
}

/// Exact check of a Lipschitz certificate: every branch is affine with
/// slope at most the constant in absolute value, and the function is
/// continuous at every branch threshold.
pub fn check_lipschitz(g: &PiecewiseFn, constant: &FieldElement) -> Result<(), FnError> {
    let zero = FieldElement::zero();
    for b in g.branches() {
        for a in b.region.atoms() {
            match a {
                GuardAtom::Cmp { lhs: Expr::Var, .. } => {}
                GuardAtom::In(s) if s.atoms().iter().all(|x| matches!(x, SetAtom::Interval(_))) => {}
                _ => return Err(FnError::Certificate(format!("guard `{a}` is not an interval condition"))),
            }
        }
        let p = path_at_scale(&b.expr, &zero, Side::Right, &FieldElement::one())?;
        let r = p.as_rat().ok_or_else(|| FnError::Certificate("branch is not affine".into()))?;
        if r.denom().len() != 1 || r.numer().len() > 2 {
            return Err(FnError::Certificate(format!("branch `{}` is not affine", b.expr)));
        }
        let slope = r.numer().get(1).cloned().unwrap_or_else(FieldElement::zero);
        if &slope.abs() > constant {
            return Err(FnError::Certificate(format!("slope {slope} exceeds {constant}")));
        }
    }
    for p in g.special_points() {
        let v = g.evaluate(&p).map_err(|e| FnError::Certificate(format!("value at {p}: {e}")))?;
        for side in [Side::Left, Side::Right] {
            for (lim, _) in side_limits(g, &p, side)? {
                if lim.equals_field(&v) != Some(true) {
                    return Err(FnError::Certificate(format!("jump at {p}")));
                }
            }
        }
    }
    Ok(())
}

/// Effective germ of each branch from one side: the admissible `h` for
/// which that branch is the first match.
pub fn effective_germs(f: &PiecewiseFn, a: &FieldElement, side: Side) -> Result<Vec<HSetDescriptor>, SetError> {
    let dom = set_germ(a, side, &f.domain)?;
    let mut taken = HSetDescriptor::empty();
    let mut out = Vec::with_capacity(f.branches.len());
    for b in &f.branches {
        let r = region_germ(a, side, &b.region)?;
        out.push(dom.intersect(&r)?.difference(&taken)?);
        taken = taken.union(&r)?;
    }
    Ok(out)
}

/// One-sided limits of the feasible branches, with branch indices.
pub fn side_limits(f: &PiecewiseFn, a: &FieldElement, side: Side) -> Result<Vec<(AsymptoticValue, usize)>, FnError> {
    let germs = effective_germs(f, a, side)?;
    let mut out = Vec::new();
    for (i, h) in germs.iter().enumerate() {
        if h.is_feasible() {
            let p = path_at_scale(&f.branches[i].expr, a, side, &FieldElement::one())?;
            out.push((limit(&p), i));
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LocalBound {
    /// `|f(x)| < m` for `x` in the domain with `|x − a| < delta`; `delta`
    /// is `None` when a radius exists but was not computed.
    Bounded { m: FieldElement, delta: Option<FieldElement> },
    Unbounded { side: Side, branch: usize, limit: ExtReal },
    Unknown(String),
}

impl LocalBound {
    pub fn is_bounded(&self) -> Option<bool> {
        match self {
            LocalBound::Bounded { .. } => Some(true),
            LocalBound::Unbounded { .. } => Some(false),
            LocalBound::Unknown(_) => None,
        }
    }
}

fn finite_bound(v: &AsymptoticValue) -> Option<FieldElement> {
    let one = FieldElement::one();
    match v {
        AsymptoticValue::Limit(ExtReal::Finite(l)) => Some(&l.abs() + &one),
        AsymptoticValue::Surd { rational, coeff, radicand } => {
            // √u ≤ (u + 1)/2
            let root = &(radicand + &one) / &FieldElement::from_int(2);
            Some(&(&rational.abs() + &(&coeff.abs() * &root)) + &one)
        }
        _ => None,
    }
}

/// Bound and radius for a path node: `|node(t)| < m` for `0 < t < τ`.
fn node_bound(n: &PathNode) -> Option<(FieldElement, Option<FieldElement>)> {
    let one = FieldElement::one();
    match n {
        PathNode::Rat(r) => {
            let l = r.limit();
            let l = l.finite()?;
            Some((&l.abs() + &one, r.deviation_radius()))
        }
        PathNode::Sqrt(a) => {
            let (m, t) = node_bound(a)?;
            Some((&(&m + &one) / &FieldElement::from_int(2), t))
        }
        PathNode::Abs(a) | PathNode::Neg(a) => node_bound(a),
        PathNode::Add(a, b) | PathNode::Mul(a, b) => {
            let (ma, ta) = node_bound(a)?;
            let (mb, tb) = node_bound(b)?;
            let m = if matches!(n, PathNode::Add(..)) { &ma + &mb } else { &ma * &mb };
            let t = match (ta, tb) {
                (Some(x), Some(y)) => Some(x.min(y)),
                _ => None,
            };
            Some((m, t))
        }
        PathNode::Div(..) => None,
    }
}

/// Decide local boundedness at `a` from the branch limits on each side.
pub fn locally_bounded_at(f: &PiecewiseFn, a: &FieldElement) -> Result<LocalBound, FnError> {
    let mut m = FieldElement::one();
    let mut delta: Option<FieldElement> = Some(FieldElement::one());
    if f.domain.contains(a) {
        let v = match f.evaluate(a) {
            Ok(v) => v.abs(),
            Err(EvalError::NotInField) => {
                let approx = f.evaluate_f64(a).unwrap_or(f64::INFINITY);
                if !approx.is_finite() {
                    return Ok(LocalBound::Unknown(format!("value at {a}")));
                }
                FieldElement::from_int(libm::ceil(libm::fabs(approx)) as i64 + 1)
            }
            Err(e) => return Ok(LocalBound::Unknown(format!("value at {a}: {e}"))),
        };
        m = m.max(&v + &FieldElement::one());
    }
    for side in [Side::Left, Side::Right] {
        let germs = effective_germs(f, a, side)?;
        for (i, h) in germs.iter().enumerate() {
            if let Some(r) = h.radius() {
                delta = delta.map(|d| d.min(r.clone()));
            }
            if !h.is_feasible() {
                continue;
            }
            let p = path_at_scale(&f.branches[i].expr, a, side, &FieldElement::one())?;
            let lim = limit(&p);
            match &lim {
                AsymptoticValue::Limit(v @ (ExtReal::PlusInfinity | ExtReal::MinusInfinity)) => {
                    return Ok(LocalBound::Unbounded { side, branch: i, limit: v.clone() });
                }
                AsymptoticValue::Undecided => return Ok(LocalBound::Unknown(format!("branch {i} limit from the {}", side.name()))),
                _ => {}
            }
            match node_bound(&p.root) {
                Some((mb, tau)) => {
                    m = m.max(mb);
                    delta = match (delta, tau) {
                        (Some(d), Some(t)) => Some(d.min(t)),
                        _ => None,
                    };
                }
                None => {
                    m = m.max(finite_bound(&lim).ok_or_else(|| FnError::Unsupported("bound".into()))?);
                    delta = None;
                }
            }
        }
    }
    Ok(LocalBound::Bounded { m, delta })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sets::{IndexRange, Interval};
    use proptest::prelude::*;

    fn fe(n: i64) -> FieldElement {
        FieldElement::from_int(n)
    }

    fn rt2() -> FieldElement {
        FieldElement::sqrt_radicand(2).unwrap()
    }

    fn gt0() -> GuardAtom {
        GuardAtom::cmp_x(CmpOp::Gt, fe(0))
    }

    fn lt0() -> GuardAtom {
        GuardAtom::cmp_x(CmpOp::Lt, fe(0))
    }

    fn set_a() -> StructuredSet {
        StructuredSet::gen(fe(1), IndexRange::All).unwrap().union(StructuredSet::points(vec![fe(0)]))
    }

    /// 0 on A, 1 for positive x off A, −1 for negative x off A.
    fn example_two_jumps() -> PiecewiseFn {
        PiecewiseFn::new(
            StructuredSet::line(),
            vec![
                Branch::new(Region::new(vec![GuardAtom::In(set_a())]), Expr::int(0)),
                Branch::new(Region::new(vec![gt0()]), Expr::int(1)),
                Branch::otherwise(Expr::int(-1)),
            ],
        )
        .unwrap()
    }

    #[test]
    fn evaluation_follows_first_match() {
        let f = example_two_jumps();
        assert_eq!(f.evaluate(&(&rt2() / &fe(3))).unwrap(), fe(1));
        assert_eq!(f.evaluate(&FieldElement::from_ratio(1, 3)).unwrap(), fe(0));
        assert_eq!(f.evaluate(&(-&rt2())).unwrap(), fe(-1));
    }

    #[test]
    fn constant_program() {
        let f = PiecewiseFn::new(StructuredSet::line(), vec![Branch::otherwise(Expr::int(1))]).unwrap();
        assert_eq!(f.evaluate(&rt2()).unwrap(), fe(1));
    }

    #[test]
    fn missing_else_on_continuum_is_rejected() {
        let r = PiecewiseFn::new(StructuredSet::line(), vec![Branch::new(Region::new(vec![gt0()]), Expr::Var)]);
        assert_eq!(r, Err(FnError::MissingElse));
    }

    #[test]
    fn countable_domain_coverage() {
        let dom = set_a();
        let ok = PiecewiseFn::new(
            dom.clone(),
            vec![
                Branch::new(Region::new(vec![GuardAtom::cmp_x(CmpOp::Ge, fe(0))]), Expr::Var),
                Branch::new(Region::new(vec![lt0()]), Expr::neg(Expr::Var)),
            ],
        );
        assert!(ok.is_ok());
        let gap = PiecewiseFn::new(dom, vec![Branch::new(Region::new(vec![gt0()]), Expr::Var)]);
        assert!(matches!(gap, Err(FnError::NotTotal(_))));
    }

    #[test]
    fn sqrt_leaves_field() {
        let f = PiecewiseFn::new(StructuredSet::line(), vec![Branch::otherwise(Expr::sqrt(Expr::Var))]).unwrap();
        assert_eq!(f.evaluate(&fe(3)), Err(EvalError::NotInField));
        assert_eq!(f.evaluate(&fe(2)).unwrap(), rt2());
        assert_eq!(f.evaluate(&fe(-1)), Err(EvalError::SqrtOfNegative));
    }

    #[test]
    fn scale_by_zero_is_constant() {
        let f = example_two_jumps();
        let z = combine(&Combinator::Scale(fe(0)), &f, None).unwrap();
        assert_eq!(z.branches().len(), 1);
        assert_eq!(z.evaluate(&fe(5)).unwrap(), fe(0));
    }

    #[test]
    fn product_with_reciprocal_abs_is_sign() {
        let f = PiecewiseFn::new(StructuredSet::line(), vec![Branch::otherwise(Expr::Var)]).unwrap();
        let g = PiecewiseFn::new(
            StructuredSet::line(),
            vec![Branch::new(Region::new(vec![GuardAtom::cmp_x(CmpOp::Eq, fe(0))]), Expr::int(0)), Branch::otherwise(Expr::div(Expr::int(1), Expr::abs(Expr::Var)))],
        )
        .unwrap();
        let fg = combine(&Combinator::Mul, &f, Some(&g)).unwrap();
        assert_eq!(fg.evaluate(&fe(3)).unwrap(), fe(1));
        assert_eq!(fg.evaluate(&fe(-3)).unwrap(), fe(-1));
        assert_eq!(fg.evaluate(&fe(0)).unwrap(), fe(0));
        assert_eq!(locally_bounded_at(&g, &fe(0)).unwrap().is_bounded(), Some(false));
        assert_eq!(locally_bounded_at(&f, &fe(0)).unwrap().is_bounded(), Some(true));
    }

    #[test]
    fn local_bound_certificate_holds() {
        let g = PiecewiseFn::new(
            StructuredSet::line(),
            vec![Branch::new(Region::new(vec![gt0()]), Expr::div(Expr::int(3), Expr::add(Expr::pow(Expr::Var, 2), Expr::int(1)))), Branch::otherwise(Expr::sub(Expr::Var, Expr::int(2)))],
        )
        .unwrap();
        let LocalBound::Bounded { m, delta: Some(d) } = locally_bounded_at(&g, &fe(0)).unwrap() else { panic!() };
        let (m, d) = (m.to_f64(), d.to_f64());
        for k in 1..400 {
            let x = d * (f64::from(k) / 200.0 - 1.0);
            let v = g.evaluate_f64(&FieldElement::from_ratio(libm::round(x * 1e6) as i64, 1_000_000)).unwrap();
            assert!(v.abs() < m);
        }
    }

    #[test]
    fn family_instantiation() {
        let fam = FnFamily {
            param: "k".into(),
            domain: StructuredSet::interval(Interval::closed(fe(0), fe(2))),
            branches: vec![
                Branch::new(Region::new(vec![GuardAtom::cmp_x(CmpOp::Le, fe(1))]), Expr::Pow(Box::new(Expr::Var), Exponent::Param)),
                Branch::otherwise(Expr::int(1)),
            ],
        };
        let f3 = fam.instantiate(3).unwrap();
        assert_eq!(f3.evaluate(&FieldElement::from_ratio(1, 2)).unwrap(), FieldElement::from_ratio(1, 8));
        assert!(matches!(fam.instantiate(65), Err(FnError::FamilyIndex(65))));
    }

    #[test]
    fn lipschitz_certificates() {
        let g = PiecewiseFn::new(
            StructuredSet::line(),
            vec![Branch::new(Region::new(vec![GuardAtom::cmp_x(CmpOp::Lt, fe(1))]), Expr::mul(Expr::int(2), Expr::Var)), Branch::otherwise(Expr::add(Expr::Var, Expr::int(1)))],
        )
        .unwrap();
        assert!(check_lipschitz(&g, &fe(2)).is_ok());
        assert!(check_lipschitz(&g, &fe(1)).is_err());
        let jump = PiecewiseFn::new(
            StructuredSet::line(),
            vec![Branch::new(Region::new(vec![GuardAtom::cmp_x(CmpOp::Lt, fe(1))]), Expr::Var), Branch::otherwise(Expr::int(5))],
        )
        .unwrap();
        assert!(check_lipschitz(&jump, &fe(3)).is_err());
    }

    #[test]
    fn composition_substitutes_guards() {
        let f = PiecewiseFn::new(
            StructuredSet::line(),
            vec![Branch::new(Region::new(vec![gt0()]), Expr::add(Expr::Var, Expr::int(1))), Branch::otherwise(Expr::int(-3))],
        )
        .unwrap();
        let g = PiecewiseFn::new(
            StructuredSet::line(),
            vec![Branch::new(Region::new(vec![GuardAtom::cmp_x(CmpOp::Ge, fe(0))]), Expr::Var), Branch::otherwise(Expr::neg(Expr::Var))],
        )
        .unwrap();
        let h = combine(&Combinator::Compose, &f, Some(&g)).unwrap();
        for x in [-2i64, 0, 3] {
            let expected = g.evaluate(&f.evaluate(&fe(x)).unwrap()).unwrap();
            assert_eq!(h.evaluate(&fe(x)).unwrap(), expected);
        }
    }

    fn arb_small_fn() -> impl Strategy<Value = PiecewiseFn> {
        let coef = -4i64..=4;
        (coef.clone(), coef.clone(), coef.clone(), coef, any::<bool>()).prop_map(|(a, b, c, d, use_set)| {
            let guard = if use_set { GuardAtom::In(set_a()) } else { GuardAtom::cmp_x(CmpOp::Gt, fe(c)) };
            PiecewiseFn::new(
                StructuredSet::line(),
                vec![
                    Branch::new(Region::new(vec![guard]), Expr::add(Expr::mul(Expr::int(a), Expr::Var), Expr::int(b))),
                    Branch::otherwise(Expr::sub(Expr::pow(Expr::Var, 2), Expr::int(d))),
                ],
            )
            .unwrap()
        })
    }

    fn arb_point() -> impl Strategy<Value = FieldElement> {
        (-20i64..=20, 1i64..=6, -3i64..=3).prop_map(|(n, d, r)| &FieldElement::from_ratio(n, d) + &(&FieldElement::from_ratio(r, 4) * &rt2()))
    }

    proptest! {
        #[test]
        fn combinators_are_pointwise(f in arb_small_fn(), g in arb_small_fn(), c in -3i64..=3, x in arb_point()) {
            let fx = f.evaluate(&x).unwrap();
            let gx = g.evaluate(&x).unwrap();
            let two = fe(2);
            let cases: Vec<(Combinator, FieldElement)> = vec![
                (Combinator::Add, &fx + &gx),
                (Combinator::Sub, &fx - &gx),
                (Combinator::Mul, &fx * &gx),
                (Combinator::Max, fx.clone().max(gx.clone())),
                (Combinator::Min, fx.clone().min(gx.clone())),
            ];
            for (op, want) in cases {
                let h = combine(&op, &f, Some(&g)).unwrap();
                prop_assert_eq!(h.evaluate(&x).unwrap(), want);
            }
            prop_assert_eq!(combine(&Combinator::Abs, &f, None).unwrap().evaluate(&x).unwrap(), fx.abs());
            prop_assert_eq!(combine(&Combinator::Scale(fe(c)), &f, None).unwrap().evaluate(&x).unwrap(), &fe(c) * &fx);
            if !gx.is_zero() {
                prop_assert_eq!(combine(&Combinator::Quotient, &f, Some(&g)).unwrap().evaluate(&x).unwrap(), &fx / &gx);
                prop_assert_eq!(combine(&Combinator::Recip, &g, None).unwrap().evaluate(&x).unwrap(), &FieldElement::one() / &gx);
            }
            let avg = &(&(&fx + &gx) + &(&fx - &gx).abs()) / &two;
            prop_assert_eq!(avg, fx.clone().max(gx.clone()));
        }

        #[test]
        fn exactly_one_branch_fires(f in arb_small_fn(), x in arb_point()) {
            let i = f.branch_index(&x).unwrap();
            for (j, b) in f.branches().iter().enumerate().take(i) {
                prop_assert!(!b.region.contains(&x).unwrap(), "branch {} also fires", j);
            }
        }
    }
}
