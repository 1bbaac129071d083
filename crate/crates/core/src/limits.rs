//! Exact limits of DSL expressions along `x = a ± c·t`, `t → 0⁺`.
//!
//! Substituting the path turns every square-root-free expression into a
//! rational function of `t`. Square roots that are not exact in `ℚ(√d)[t]`
//! stay as tree nodes and are handled by limit arithmetic on values of the
//! form `p + q·√u`.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;


use crate::field::{ExtReal, FieldElement, FieldError};
use crate::func::{Exponent, Expr};
use crate::sets::{feasible_h_set, HSetDescriptor, Region, SetError, Side, StructuredSet};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum PathError {
    #[error("square root of an expression that is negative near the point")]
    SqrtOfNegative,
    #[error("division by an expression that vanishes identically near the point")]
    DivisionByZero,
    #[error("unbound family parameter in expression")]
    UnboundParameter,
    #[error("square root inside a guard comparison")]
    SqrtInGuard,
    #[error("no admissible approach from this side")]
    Infeasible,
    #[error("field arithmetic: {0}")]
    Field(#[from] FieldError),
}

fn trim(mut p: Vec<FieldElement>) -> Vec<FieldElement> {
    while p.last().is_some_and(FieldElement::is_zero) {
        p.pop();
    }
    p
}

fn low_degree(p: &[FieldElement]) -> Option<usize> {
    p.iter().position(|c| !c.is_zero())
}

fn poly_add(a: &[FieldElement], b: &[FieldElement]) -> Vec<FieldElement> {
    let n = a.len().max(b.len());
    let zero = FieldElement::zero();
    trim((0..n).map(|i| a.get(i).unwrap_or(&zero) + b.get(i).unwrap_or(&zero)).collect())
}

fn poly_neg(a: &[FieldElement]) -> Vec<FieldElement> {
    a.iter().map(|c| -c).collect()
}

fn poly_mul(a: &[FieldElement], b: &[FieldElement]) -> Vec<FieldElement> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![FieldElement::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] = &out[i + j] + &(x * y);
        }
    }
    trim(out)
}

fn poly_eval(p: &[FieldElement], t: &FieldElement) -> FieldElement {
    p.iter().rev().fold(FieldElement::zero(), |acc, c| &(&acc * t) + c)
}

fn poly_eval_f64(p: &[FieldElement], t: f64) -> f64 {
    p.iter().rev().fold(0.0, |acc, c| acc * t + c.to_f64())
}

/// Exact square root in `ℚ(√d)[t]`, positive near `0⁺`, if one exists.
fn poly_sqrt(p: &[FieldElement]) -> Option<Vec<FieldElement>> {
    let Some(v) = low_degree(p) else { return Some(Vec::new()) };
    if v % 2 == 1 {
        return None;
    }
    let r = &p[v..];
    let deg = r.len() - 1;
    if deg % 2 == 1 {
        return None;
    }
    let s0 = r[0].sqrt()?;
    if s0.is_zero() {
        return None;
    }
    let two_s0 = &s0 + &s0;
    let half = deg / 2;
    let mut s = vec![s0];
    for k in 1..=half {
        let mut acc = r[k].clone();
        for i in 1..k {
            acc = &acc - &(&s[i] * &s[k - i]);
        }
        s.push(acc.checked_div(&two_s0).ok()?);
    }
    if poly_mul(&s, &s) != trim(r.to_vec()) {
        return None;
    }
    let mut out = vec![FieldElement::zero(); v / 2];
    out.extend(s);
    Some(out)
}

/// `numer(t) / denom(t)` with field coefficients, low degree first.
///
/// Normalized so that `t` does not divide both parts and the lowest
/// nonzero coefficient of the denominator is 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatFun {
    numer: Vec<FieldElement>,
    denom: Vec<FieldElement>,
}

impl RatFun {
    pub fn new(numer: Vec<FieldElement>, denom: Vec<FieldElement>) -> Result<Self, PathError> {
        let denom = trim(denom);
        if denom.is_empty() {
            return Err(PathError::DivisionByZero);
        }
        Ok(Self::normalized(trim(numer), denom))
    }

    fn normalized(numer: Vec<FieldElement>, denom: Vec<FieldElement>) -> Self {
        let Some(vn) = low_degree(&numer) else {
            return Self { numer: Vec::new(), denom: vec![FieldElement::one()] };
        };
        let vd = low_degree(&denom).unwrap_or(0);
        let k = vn.min(vd);
        let lead = denom[vd].clone();
        let scale = |p: &[FieldElement]| -> Vec<FieldElement> { p[k..].iter().map(|c| c / &lead).collect() };
        Self { numer: scale(&numer), denom: scale(&denom) }
    }

    pub fn constant(c: FieldElement) -> Self {
        Self::normalized(trim(vec![c]), vec![FieldElement::one()])
    }

    /// `a + slope·t`.
    pub fn linear(a: FieldElement, slope: FieldElement) -> Self {
        Self::normalized(trim(vec![a, slope]), vec![FieldElement::one()])
    }

    pub fn numer(&self) -> &[FieldElement] {
        &self.numer
    }

    pub fn denom(&self) -> &[FieldElement] {
        &self.denom
    }

    pub fn is_zero(&self) -> bool {
        self.numer.is_empty()
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = poly_add(&poly_mul(&self.numer, &o.denom), &poly_mul(&o.numer, &self.denom));
        Self::normalized(n, poly_mul(&self.denom, &o.denom))
    }

    pub fn neg(&self) -> Self {
        Self { numer: poly_neg(&self.numer), denom: self.denom.clone() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self::normalized(poly_mul(&self.numer, &o.numer), poly_mul(&self.denom, &o.denom))
    }

    pub fn div(&self, o: &Self) -> Result<Self, PathError> {
        if o.is_zero() {
            return Err(PathError::DivisionByZero);
        }
        Ok(Self::normalized(poly_mul(&self.numer, &o.denom), poly_mul(&self.denom, &o.numer)))
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::constant(FieldElement::one());
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// Sign of the function on some interval `(0, ε)`.
    pub fn sign_near_zero(&self) -> i32 {
        match low_degree(&self.numer) {
            None => 0,
            Some(v) => self.numer[v].signum() * self.denom[low_degree(&self.denom).unwrap_or(0)].signum(),
        }
    }

    pub fn abs(&self) -> Self {
        if self.sign_near_zero() < 0 {
            self.neg()
        } else {
            self.clone()
        }
    }

    pub fn limit(&self) -> ExtReal {
        let Some(vn) = low_degree(&self.numer) else { return ExtReal::Finite(FieldElement::zero()) };
        let vd = low_degree(&self.denom).unwrap_or(0);
        if vn > vd {
            ExtReal::Finite(FieldElement::zero())
        } else if vn == vd {
            ExtReal::Finite(&self.numer[vn] / &self.denom[vd])
        } else if self.sign_near_zero() > 0 {
            ExtReal::PlusInfinity
        } else {
            ExtReal::MinusInfinity
        }
    }

    /// Exact square root as a rational function, when one exists.
    pub fn exact_sqrt(&self) -> Option<Self> {
        let n = poly_sqrt(&self.numer)?;
        let d = poly_sqrt(&self.denom)?;
        Some(Self::normalized(n, d))
    }

    pub fn eval(&self, t: &FieldElement) -> Result<FieldElement, PathError> {
        let d = poly_eval(&self.denom, t);
        poly_eval(&self.numer, t).checked_div(&d).map_err(|_| PathError::DivisionByZero)
    }

    pub fn eval_f64(&self, t: f64) -> f64 {
        poly_eval_f64(&self.numer, t) / poly_eval_f64(&self.denom, t)
    }

    /// Same function of `t` (cross-multiplication).
    pub fn same_function(&self, o: &Self) -> bool {
        poly_mul(&self.numer, &o.denom) == poly_mul(&o.numer, &self.denom)
    }

    /// A `τ ∈ (0, 1]` with `|P(t) − L| < 1` for `0 < t < τ`, when the
    /// limit `L` is finite.
    pub fn deviation_radius(&self) -> Option<FieldElement> {
        let ExtReal::Finite(l) = self.limit() else { return None };
        // finite limit ⇒ denominator has a nonzero constant term, equal to 1
        let one = FieldElement::one();
        let zero = FieldElement::zero();
        let n = self.numer.len().max(self.denom.len());
        let mut s1 = FieldElement::zero();
        let mut s2 = FieldElement::zero();
        for i in 1..n {
            let ni = self.numer.get(i).unwrap_or(&zero);
            let di = self.denom.get(i).unwrap_or(&zero);
            s1 = &s1 + &(ni - &(&l * di)).abs();
            s2 = &s2 + &di.abs();
        }
        Some(&one / &(&(&one + &s1) + &s2))
    }
}

impl fmt::Display for RatFun {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn poly(f: &mut fmt::Formatter<'_>, p: &[FieldElement]) -> fmt::Result {
            let mut first = true;
            for (i, c) in p.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                if !first {
                    f.write_str(" + ")?;
                }
                first = false;
                match i {
                    0 => write!(f, "({c})")?,
                    1 => write!(f, "({c})*t")?,
                    _ => write!(f, "({c})*t^{i}")?,
                }
            }
            if first {
                f.write_str("0")?;
            }
            Ok(())
        }
        f.write_str("[")?;
        poly(f, &self.numer)?;
        f.write_str("] / [")?;
        poly(f, &self.denom)?;
        f.write_str("]")
    }
}

/// Expression along a path, with rational-function leaves.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PathNode {
    Rat(RatFun),
    Sqrt(Box<PathNode>),
    Abs(Box<PathNode>),
    Neg(Box<PathNode>),
    Add(Box<PathNode>, Box<PathNode>),
    Mul(Box<PathNode>, Box<PathNode>),
    Div(Box<PathNode>, Box<PathNode>),
}

impl PathNode {
    pub fn as_rat(&self) -> Option<&RatFun> {
        match self {
            PathNode::Rat(r) => Some(r),
            _ => None,
        }
    }

    fn add(self, o: PathNode) -> PathNode {
        match (self, o) {
            (PathNode::Rat(a), PathNode::Rat(b)) => PathNode::Rat(a.add(&b)),
            (a, b) => PathNode::Add(Box::new(a), Box::new(b)),
        }
    }

    fn neg(self) -> PathNode {
        match self {
            PathNode::Rat(a) => PathNode::Rat(a.neg()),
            PathNode::Neg(a) => *a,
            a => PathNode::Neg(Box::new(a)),
        }
    }

    fn mul(self, o: PathNode) -> PathNode {
        match (self, o) {
            (PathNode::Rat(a), PathNode::Rat(b)) => PathNode::Rat(a.mul(&b)),
            (a, b) => PathNode::Mul(Box::new(a), Box::new(b)),
        }
    }

    fn div(self, o: PathNode) -> Result<PathNode, PathError> {
        Ok(match (self, o) {
            (PathNode::Rat(a), PathNode::Rat(b)) => PathNode::Rat(a.div(&b)?),
            (a, b) => PathNode::Div(Box::new(a), Box::new(b)),
        })
    }

    fn abs(self) -> PathNode {
        match self {
            PathNode::Rat(a) => PathNode::Rat(a.abs()),
            n @ (PathNode::Sqrt(_) | PathNode::Abs(_)) => n,
            n => match limit_node(&n) {
                AsymptoticValue::Undecided => PathNode::Abs(Box::new(n)),
                v => match v.sign() {
                    Some(s) if s > 0 => n,
                    Some(s) if s < 0 => n.neg(),
                    _ => PathNode::Abs(Box::new(n)),
                },
            },
        }
    }

    fn sqrt(self) -> Result<PathNode, PathError> {
        match self {
            PathNode::Rat(a) => {
                if a.sign_near_zero() < 0 {
                    return Err(PathError::SqrtOfNegative);
                }
                Ok(match a.exact_sqrt() {
                    Some(r) => PathNode::Rat(r),
                    None => PathNode::Sqrt(Box::new(PathNode::Rat(a))),
                })
            }
            n => {
                if limit_node(&n).sign() == Some(-1) {
                    return Err(PathError::SqrtOfNegative);
                }
                Ok(PathNode::Sqrt(Box::new(n)))
            }
        }
    }

    pub fn eval_f64(&self, t: f64) -> f64 {
        match self {
            PathNode::Rat(r) => r.eval_f64(t),
            PathNode::Sqrt(a) => libm::sqrt(a.eval_f64(t)),
            PathNode::Abs(a) => libm::fabs(a.eval_f64(t)),
            PathNode::Neg(a) => -a.eval_f64(t),
            PathNode::Add(a, b) => a.eval_f64(t) + b.eval_f64(t),
            PathNode::Mul(a, b) => a.eval_f64(t) * b.eval_f64(t),
            PathNode::Div(a, b) => a.eval_f64(t) / b.eval_f64(t),
        }
    }
}

/// An expression evaluated along `x = a + side·scale·t`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymbolicPath {
    pub scale: FieldElement,
    pub root: PathNode,
}

impl SymbolicPath {
    pub fn sub(&self, other: &SymbolicPath) -> SymbolicPath {
        SymbolicPath { scale: self.scale.clone(), root: self.root.clone().add(other.root.clone().neg()) }
    }

    pub fn eval_f64(&self, t: f64) -> f64 {
        self.root.eval_f64(t)
    }

    pub fn as_rat(&self) -> Option<&RatFun> {
        self.root.as_rat()
    }
}

fn node_of(e: &Expr, x: &RatFun) -> Result<PathNode, PathError> {
    Ok(match e {
        Expr::Const(c) => PathNode::Rat(RatFun::constant(c.clone())),
        Expr::Var => PathNode::Rat(x.clone()),
        Expr::Param => return Err(PathError::UnboundParameter),
        Expr::Add(a, b) => node_of(a, x)?.add(node_of(b, x)?),
        Expr::Sub(a, b) => node_of(a, x)?.add(node_of(b, x)?.neg()),
        Expr::Mul(a, b) => node_of(a, x)?.mul(node_of(b, x)?),
        Expr::Div(a, b) => node_of(a, x)?.div(node_of(b, x)?)?,
        Expr::Neg(a) => node_of(a, x)?.neg(),
        Expr::Abs(a) => node_of(a, x)?.abs(),
        Expr::Sqrt(a) => node_of(a, x)?.sqrt()?,
        Expr::Pow(a, Exponent::Lit(k)) => {
            let base = node_of(a, x)?;
            match base {
                PathNode::Rat(r) => PathNode::Rat(r.pow(*k)),
                n => {
                    let mut acc = PathNode::Rat(RatFun::constant(FieldElement::one()));
                    for _ in 0..*k {
                        acc = acc.mul(n.clone());
                    }
                    acc
                }
            }
        }
        Expr::Pow(_, Exponent::Param) => return Err(PathError::UnboundParameter),
    })
}

/// The expression along `x = a + side·scale·t`.
pub fn path_at_scale(expr: &Expr, a: &FieldElement, side: Side, scale: &FieldElement) -> Result<SymbolicPath, PathError> {
    let slope = if side == Side::Right { scale.clone() } else { -scale };
    let x = RatFun::linear(a.clone(), slope);
    Ok(SymbolicPath { scale: scale.clone(), root: node_of(expr, &x)? })
}

/// The expression along an admissible h-set; `t = h` on a continuum and
/// `t = 1/n` on an indexed class (`h = c·t`).
pub fn path_of(expr: &Expr, a: &FieldElement, side: Side, hset: &HSetDescriptor) -> Result<SymbolicPath, PathError> {
    let scale = if hset.is_generic() {
        FieldElement::one()
    } else {
        hset.classes().first().ok_or(PathError::Infeasible)?.base().clone()
    };
    path_at_scale(expr, a, side, &scale)
}

/// Rational-function form, used for guard comparisons.
pub fn rat_path(expr: &Expr, a: &FieldElement, side: Side, scale: &FieldElement) -> Result<RatFun, PathError> {
    match path_at_scale(expr, a, side, scale)?.root {
        PathNode::Rat(r) => Ok(r),
        _ => Err(PathError::SqrtInGuard),
    }
}

/// Limit of a path value as `t → 0⁺`.
///
/// `Surd` carries finite limits `rational + coeff·√radicand` that leave
/// the field (`radicand` is not a square in it).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AsymptoticValue {
    Limit(ExtReal),
    Surd { rational: FieldElement, coeff: FieldElement, radicand: FieldElement },
    Undecided,
}

fn surd_sign(a: &FieldElement, b: &FieldElement, u: &FieldElement) -> i32 {
    let sa = a.signum();
    let sb = b.signum();
    if sb == 0 {
        return sa;
    }
    if sa == 0 || sa == sb {
        return sb;
    }
    let a2 = a * a;
    let b2u = &(b * b) * u;
    if a2 > b2u {
        sa
    } else {
        sb
    }
}

impl AsymptoticValue {
    pub fn finite(v: FieldElement) -> Self {
        AsymptoticValue::Limit(ExtReal::Finite(v))
    }

    fn surd(rational: FieldElement, coeff: FieldElement, radicand: FieldElement) -> Self {
        if coeff.is_zero() || radicand.is_zero() {
            return Self::finite(rational);
        }
        match radicand.sqrt() {
            Some(s) => Self::finite(&rational + &(&coeff * &s)),
            None => AsymptoticValue::Surd { rational, coeff, radicand },
        }
    }

    /// Sign of the limit, `None` when undecided.
    pub fn sign(&self) -> Option<i32> {
        match self {
            AsymptoticValue::Limit(ExtReal::Finite(v)) => Some(v.signum()),
            AsymptoticValue::Limit(ExtReal::PlusInfinity) => Some(1),
            AsymptoticValue::Limit(ExtReal::MinusInfinity) => Some(-1),
            AsymptoticValue::Surd { rational, coeff, radicand } => Some(surd_sign(rational, coeff, radicand)),
            AsymptoticValue::Undecided => None,
        }
    }

    pub fn is_zero(&self) -> Option<bool> {
        self.sign().map(|s| s == 0)
    }

    pub fn is_finite(&self) -> Option<bool> {
        match self {
            AsymptoticValue::Limit(v) => Some(v.finite().is_some()),
            AsymptoticValue::Surd { .. } => Some(true),
            AsymptoticValue::Undecided => None,
        }
    }

    /// Exact comparison against a field value.
    pub fn equals_field(&self, v: &FieldElement) -> Option<bool> {
        match self {
            AsymptoticValue::Limit(ExtReal::Finite(l)) => Some(l == v),
            AsymptoticValue::Limit(_) | AsymptoticValue::Surd { .. } => Some(false),
            AsymptoticValue::Undecided => None,
        }
    }

    pub fn to_f64(&self) -> Option<f64> {
        match self {
            AsymptoticValue::Limit(v) => Some(v.to_f64()),
            AsymptoticValue::Surd { rational, coeff, radicand } => Some(rational.to_f64() + coeff.to_f64() * libm::sqrt(radicand.to_f64())),
            AsymptoticValue::Undecided => None,
        }
    }

    /// Absolute value as a float, for gap reporting.
    pub fn magnitude(&self) -> Option<f64> {
        self.to_f64().map(libm::fabs)
    }

    fn parts(&self) -> Option<(FieldElement, FieldElement, FieldElement)> {
        match self {
            AsymptoticValue::Limit(ExtReal::Finite(v)) => Some((v.clone(), FieldElement::zero(), FieldElement::zero())),
            AsymptoticValue::Surd { rational, coeff, radicand } => Some((rational.clone(), coeff.clone(), radicand.clone())),
            _ => None,
        }
    }

    fn infinite_sign(&self) -> Option<i32> {
        match self {
            AsymptoticValue::Limit(ExtReal::PlusInfinity) => Some(1),
            AsymptoticValue::Limit(ExtReal::MinusInfinity) => Some(-1),
            _ => None,
        }
    }

    fn infinity(sign: i32) -> Self {
        AsymptoticValue::Limit(if sign > 0 { ExtReal::PlusInfinity } else { ExtReal::MinusInfinity })
    }

    /// Express both values over one radicand, when `u1/u2` is a square.
    fn common(
        x: &(FieldElement, FieldElement, FieldElement),
        y: &(FieldElement, FieldElement, FieldElement),
    ) -> Option<(FieldElement, FieldElement, FieldElement)> {
        let (_, b1, u1) = x;
        let (_, b2, u2) = y;
        if b2.is_zero() {
            return Some((b1.clone(), FieldElement::zero(), u1.clone()));
        }
        if b1.is_zero() {
            return Some((FieldElement::zero(), b2.clone(), u2.clone()));
        }
        let s = (u2 / u1).sqrt()?;
        Some((b1.clone(), b2 * &s, u1.clone()))
    }

    pub fn add(&self, o: &Self) -> Self {
        if let (Some(x), Some(y)) = (self.parts(), o.parts()) {
            let Some((b1, b2, u)) = Self::common(&x, &y) else { return AsymptoticValue::Undecided };
            return Self::surd(&x.0 + &y.0, &b1 + &b2, u);
        }
        match (self.infinite_sign(), o.infinite_sign()) {
            (Some(s), Some(t)) if s == t => Self::infinity(s),
            (Some(_), Some(_)) => AsymptoticValue::Undecided,
            (Some(s), None) | (None, Some(s)) => {
                if self.is_finite().is_some() && o.is_finite().is_some() {
                    Self::infinity(s)
                } else {
                    AsymptoticValue::Undecided
                }
            }
            (None, None) => AsymptoticValue::Undecided,
        }
    }

    pub fn neg(&self) -> Self {
        match self {
            AsymptoticValue::Limit(ExtReal::Finite(v)) => Self::finite(-v),
            AsymptoticValue::Limit(ExtReal::PlusInfinity) => Self::infinity(-1),
            AsymptoticValue::Limit(ExtReal::MinusInfinity) => Self::infinity(1),
            AsymptoticValue::Surd { rational, coeff, radicand } => Self::surd(-rational, -coeff, radicand.clone()),
            AsymptoticValue::Undecided => AsymptoticValue::Undecided,
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        if let (Some(x), Some(y)) = (self.parts(), o.parts()) {
            let Some((b1, b2, u)) = Self::common(&x, &y) else { return AsymptoticValue::Undecided };
            let (a1, a2) = (&x.0, &y.0);
            let rational = &(a1 * a2) + &(&(&b1 * &b2) * &u);
            let coeff = &(a1 * &b2) + &(&b1 * a2);
            return Self::surd(rational, coeff, u);
        }
        match (self.sign(), o.sign()) {
            (Some(0), _) | (_, Some(0)) => AsymptoticValue::Undecided,
            (Some(s), Some(t)) => Self::infinity(s * t),
            _ => AsymptoticValue::Undecided,
        }
    }

    pub fn recip(&self) -> Self {
        match self {
            AsymptoticValue::Limit(ExtReal::PlusInfinity | ExtReal::MinusInfinity) => Self::finite(FieldElement::zero()),
            AsymptoticValue::Limit(ExtReal::Finite(v)) if v.is_zero() => AsymptoticValue::Undecided,
            AsymptoticValue::Limit(ExtReal::Finite(v)) => Self::finite(&FieldElement::one() / v),
            AsymptoticValue::Surd { rational, coeff, radicand } => {
                let n = &(rational * rational) - &(&(coeff * coeff) * radicand);
                Self::surd(rational / &n, &(-coeff) / &n, radicand.clone())
            }
            AsymptoticValue::Undecided => AsymptoticValue::Undecided,
        }
    }

    pub fn abs(&self) -> Self {
        match self.sign() {
            Some(s) if s < 0 => self.neg(),
            Some(_) => self.clone(),
            None => AsymptoticValue::Undecided,
        }
    }

    pub fn sqrt(&self) -> Self {
        match self {
            AsymptoticValue::Limit(ExtReal::PlusInfinity) => self.clone(),
            AsymptoticValue::Limit(ExtReal::Finite(v)) if !v.is_negative() => Self::surd(FieldElement::zero(), FieldElement::one(), v.clone()),
            _ => AsymptoticValue::Undecided,
        }
    }
}

impl fmt::Display for AsymptoticValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AsymptoticValue::Limit(v) => write!(f, "{v}"),
            AsymptoticValue::Surd { rational, coeff, radicand } => {
                if !rational.is_zero() {
                    write!(f, "{rational} + ")?;
                }
                write!(f, "({coeff})*sqrt({radicand})")
            }
            AsymptoticValue::Undecided => f.write_str("undecided"),
        }
    }
}

fn limit_node(n: &PathNode) -> AsymptoticValue {
    match n {
        PathNode::Rat(r) => AsymptoticValue::Limit(r.limit()),
        PathNode::Sqrt(a) => limit_node(a).sqrt(),
        PathNode::Abs(a) => limit_node(a).abs(),
        PathNode::Neg(a) => limit_node(a).neg(),
        PathNode::Add(a, b) => limit_node(a).add(&limit_node(b)),
        PathNode::Mul(a, b) => limit_node(a).mul(&limit_node(b)),
        PathNode::Div(a, b) => limit_node(a).mul(&limit_node(b).recip()),
    }
}

/// Limit of a path as `t → 0⁺`.
pub fn limit(p: &SymbolicPath) -> AsymptoticValue {
    limit_node(&p.root)
}

/// Limit of `expr(x)` as `x → a` from `side` through `region ∩ domain`.
pub fn one_sided_limit(
    expr: &Expr,
    a: &FieldElement,
    side: Side,
    region: &Region,
    domain: &StructuredSet,
) -> Result<AsymptoticValue, LimitError> {
    let h = feasible_h_set(a, side, region, domain)?;
    if h.is_empty() {
        return Err(LimitError::Path(PathError::Infeasible));
    }
    Ok(limit(&path_of(expr, a, side, &h)?))
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum LimitError {
    #[error(transparent)]
    Set(#[from] SetError),
    #[error(transparent)]
    Path(#[from] PathError),
}
