//! Structured subsets of ℝ and exact descriptions of admissible `h`.
//!
//! Domains are finite unions of generated sets `{c/n}`, finite point sets
//! and intervals. Near a point `a`, the set of `h > 0` with `a ± h` in a
//! domain (or in a branch guard) is a finite boolean combination of a
//! continuum and of index sets `{b/n : n ≡ r (mod m)}`. That germ is what
//! [`HSetDescriptor`] stores: it is exact for every `0 < h < radius`.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive};

use crate::field::{ratio_if_rational, FieldElement, Rational};
use crate::func::{eval_expr, EvalError, Expr};
use crate::limits::{rat_path, PathError, RatFun};

/// Largest index modulus the congruence bookkeeping will build.
pub const MAX_MODULUS: u64 = 1 << 20;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum SetError {
    #[error("generator scale must be nonzero")]
    ZeroScale,
    #[error("index congruence modulus exceeds {MAX_MODULUS}")]
    ModulusOverflow,
    #[error("guard is not supported near this point: {0}")]
    UnsupportedGuard(String),
    #[error("guard expression: {0}")]
    Path(#[from] PathError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn sign(self) -> i64 {
        match self {
            Side::Left => -1,
            Side::Right => 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Side::Left => "left",
            Side::Right => "right",
        }
    }

    /// `a + side·h`.
    pub fn step(self, a: &FieldElement, h: &FieldElement) -> FieldElement {
        match self {
            Side::Left => a - h,
            Side::Right => a + h,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum IndexRange {
    All,
    Positive,
    Negative,
}

/// `{scale/n : n in range}`; never contains 0 and accumulates only at 0.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GenSet {
    scale: FieldElement,
    range: IndexRange,
}

impl GenSet {
    pub fn new(scale: FieldElement, range: IndexRange) -> Result<Self, SetError> {
        if scale.is_zero() {
            return Err(SetError::ZeroScale);
        }
        Ok(Self { scale, range })
    }

    pub fn scale(&self) -> &FieldElement {
        &self.scale
    }

    pub fn range(&self) -> IndexRange {
        self.range
    }

    pub fn contains(&self, x: &FieldElement) -> bool {
        if x.is_zero() {
            return false;
        }
        let Ok(Some(n)) = ratio_if_rational(&self.scale, x) else {
            return false;
        };
        if !n.is_integer() {
            return false;
        }
        match self.range {
            IndexRange::All => true,
            IndexRange::Positive => n.is_positive(),
            IndexRange::Negative => n.is_negative(),
        }
    }

    /// Whether members exist with the given sign (+1 or −1).
    pub fn has_members_of_sign(&self, sign: i64) -> bool {
        let s = i64::from(self.scale.signum());
        match self.range {
            IndexRange::All => true,
            IndexRange::Positive => s == sign,
            IndexRange::Negative => s == -sign,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Bound {
    Unbounded,
    Closed(FieldElement),
    Open(FieldElement),
}

impl Bound {
    pub fn value(&self) -> Option<&FieldElement> {
        match self {
            Bound::Unbounded => None,
            Bound::Closed(v) | Bound::Open(v) => Some(v),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Interval {
    pub lo: Bound,
    pub hi: Bound,
}

impl Interval {
    pub fn line() -> Self {
        Self { lo: Bound::Unbounded, hi: Bound::Unbounded }
    }

    pub fn closed(lo: FieldElement, hi: FieldElement) -> Self {
        Self { lo: Bound::Closed(lo), hi: Bound::Closed(hi) }
    }

    pub fn contains(&self, x: &FieldElement) -> bool {
        let lo_ok = match &self.lo {
            Bound::Unbounded => true,
            Bound::Closed(l) => l <= x,
            Bound::Open(l) => l < x,
        };
        let hi_ok = match &self.hi {
            Bound::Unbounded => true,
            Bound::Closed(u) => x <= u,
            Bound::Open(u) => x < u,
        };
        lo_ok && hi_ok
    }

    pub fn is_degenerate(&self) -> bool {
        match (self.lo.value(), self.hi.value()) {
            (Some(l), Some(u)) => l >= u,
            _ => false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum SetAtom {
    Gen(GenSet),
    Points(Vec<FieldElement>),
    Interval(Interval),
}

/// Finite union of atoms.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct StructuredSet {
    atoms: Vec<SetAtom>,
}

impl StructuredSet {
    pub fn new(atoms: Vec<SetAtom>) -> Self {
        Self { atoms }
    }

    pub fn line() -> Self {
        Self::new(vec![SetAtom::Interval(Interval::line())])
    }

    pub fn gen(scale: FieldElement, range: IndexRange) -> Result<Self, SetError> {
        Ok(Self::new(vec![SetAtom::Gen(GenSet::new(scale, range)?)]))
    }

    pub fn points(points: Vec<FieldElement>) -> Self {
        Self::new(vec![SetAtom::Points(points)])
    }

    pub fn interval(iv: Interval) -> Self {
        Self::new(vec![SetAtom::Interval(iv)])
    }

    pub fn atoms(&self) -> &[SetAtom] {
        &self.atoms
    }

    pub fn union(mut self, other: StructuredSet) -> Self {
        self.atoms.extend(other.atoms);
        self
    }

    pub fn contains(&self, x: &FieldElement) -> bool {
        self.atoms.iter().any(|atom| match atom {
            SetAtom::Gen(g) => g.contains(x),
            SetAtom::Points(ps) => ps.iter().any(|p| p == x),
            SetAtom::Interval(iv) => iv.contains(x),
        })
    }

    /// True when some atom is a nondegenerate interval.
    pub fn has_continuum(&self) -> bool {
        self.atoms.iter().any(|a| matches!(a, SetAtom::Interval(iv) if !iv.is_degenerate()))
    }

    pub fn gen_sets(&self) -> impl Iterator<Item = &GenSet> {
        self.atoms.iter().filter_map(|a| match a {
            SetAtom::Gen(g) => Some(g),
            _ => None,
        })
    }

    /// Finite points of interest: listed points and interval endpoints.
    pub fn landmarks(&self) -> Vec<FieldElement> {
        let mut out = Vec::new();
        for atom in &self.atoms {
            match atom {
                SetAtom::Points(ps) => out.extend(ps.iter().cloned()),
                SetAtom::Interval(iv) => {
                    out.extend(iv.lo.value().cloned());
                    out.extend(iv.hi.value().cloned());
                }
                SetAtom::Gen(_) => {}
            }
        }
        out
    }

    /// Whether `a` is an accumulation point of the set.
    pub fn accumulates_at(&self, a: &FieldElement) -> Result<bool, SetError> {
        Ok(!set_germ(a, Side::Left, self)?.is_empty() || !set_germ(a, Side::Right, self)?.is_empty())
    }
}

impl fmt::Display for GenSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self.range {
            IndexRange::All => "seq",
            IndexRange::Positive => "seqpos",
            IndexRange::Negative => "seqneg",
        };
        write!(f, "{name}({})", self.scale)
    }
}

impl fmt::Display for StructuredSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.atoms.is_empty() {
            return f.write_str("points()");
        }
        for (i, atom) in self.atoms.iter().enumerate() {
            if i > 0 {
                f.write_str(" union ")?;
            }
            match atom {
                SetAtom::Gen(g) => write!(f, "{g}")?,
                SetAtom::Points(ps) => {
                    f.write_str("points(")?;
                    for (j, p) in ps.iter().enumerate() {
                        if j > 0 {
                            f.write_str(", ")?;
                        }
                        write!(f, "{p}")?;
                    }
                    f.write_str(")")?;
                }
                SetAtom::Interval(iv) if iv.lo == Bound::Unbounded && iv.hi == Bound::Unbounded => f.write_str("line")?,
                SetAtom::Interval(iv) => {
                    match &iv.lo {
                        Bound::Unbounded => f.write_str("interval(-inf")?,
                        Bound::Closed(v) => write!(f, "interval[{v}")?,
                        Bound::Open(v) => write!(f, "interval({v}")?,
                    }
                    match &iv.hi {
                        Bound::Unbounded => f.write_str(", inf)")?,
                        Bound::Closed(v) => write!(f, ", {v}]")?,
                        Bound::Open(v) => write!(f, ", {v})")?,
                    }
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CmpOp {
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
}

impl CmpOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
            CmpOp::Eq => "=",
            CmpOp::Ne => "!=",
        }
    }

    /// Truth of `v op 0` for a sign `v`.
    pub fn holds_for_sign(self, sign: i32) -> bool {
        match self {
            CmpOp::Lt => sign < 0,
            CmpOp::Le => sign <= 0,
            CmpOp::Gt => sign > 0,
            CmpOp::Ge => sign >= 0,
            CmpOp::Eq => sign == 0,
            CmpOp::Ne => sign != 0,
        }
    }

    pub fn negate(self) -> CmpOp {
        match self {
            CmpOp::Lt => CmpOp::Ge,
            CmpOp::Le => CmpOp::Gt,
            CmpOp::Gt => CmpOp::Le,
            CmpOp::Ge => CmpOp::Lt,
            CmpOp::Eq => CmpOp::Ne,
            CmpOp::Ne => CmpOp::Eq,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum GuardAtom {
    In(StructuredSet),
    NotIn(StructuredSet),
    /// `lhs(x) op rhs`; plain sign constraints use `lhs = x`.
    Cmp { lhs: Expr, op: CmpOp, rhs: FieldElement },
}

impl GuardAtom {
    pub fn cmp_x(op: CmpOp, rhs: FieldElement) -> Self {
        GuardAtom::Cmp { lhs: Expr::Var, op, rhs }
    }

    pub fn holds(&self, x: &FieldElement) -> Result<bool, EvalError> {
        match self {
            GuardAtom::In(s) => Ok(s.contains(x)),
            GuardAtom::NotIn(s) => Ok(!s.contains(x)),
            GuardAtom::Cmp { lhs, op, rhs } => {
                let v = eval_expr(lhs, x)?;
                let diff = v.checked_sub(rhs).map_err(EvalError::Field)?;
                Ok(op.holds_for_sign(diff.signum()))
            }
        }
    }
}

/// Conjunction of guard atoms; the empty conjunction is `true`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Region {
    atoms: Vec<GuardAtom>,
}

impl Region {
    pub fn new(atoms: Vec<GuardAtom>) -> Self {
        Self { atoms }
    }

    pub fn always() -> Self {
        Self::default()
    }

    pub fn atoms(&self) -> &[GuardAtom] {
        &self.atoms
    }

    pub fn is_always(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn and(&self, other: &Region) -> Region {
        let mut atoms = self.atoms.clone();
        for a in &other.atoms {
            if !atoms.contains(a) {
                atoms.push(a.clone());
            }
        }
        Region { atoms }
    }

    pub fn contains(&self, x: &FieldElement) -> Result<bool, EvalError> {
        for atom in &self.atoms {
            if !atom.holds(x)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

impl fmt::Display for GuardAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GuardAtom::In(s) => write!(f, "x in {s}"),
            GuardAtom::NotIn(s) => write!(f, "x notin {s}"),
            GuardAtom::Cmp { lhs, op, rhs } => write!(f, "{lhs} {} {rhs}", op.symbol()),
        }
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.atoms.is_empty() {
            return f.write_str("else");
        }
        for (i, a) in self.atoms.iter().enumerate() {
            if i > 0 {
                f.write_str(" & ")?;
            }
            write!(f, "{a}")?;
        }
        Ok(())
    }
}

/// `{base/n : n ≥ 1, n mod modulus ∈ residues}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IndexClass {
    base: FieldElement,
    modulus: u64,
    residues: Vec<bool>,
}

impl IndexClass {
    fn full(base: FieldElement, included: bool) -> Self {
        Self { base, modulus: 1, residues: vec![included] }
    }

    pub fn base(&self) -> &FieldElement {
        &self.base
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn residues(&self) -> Vec<u64> {
        self.residues.iter().enumerate().filter(|(_, b)| **b).map(|(i, _)| i as u64).collect()
    }

    pub fn admits_index(&self, n: u64) -> bool {
        self.residues[(n % self.modulus) as usize]
    }

    fn has_any(&self) -> bool {
        self.residues.iter().any(|b| *b)
    }

    fn uniform(&self) -> Option<bool> {
        let first = self.residues[0];
        self.residues.iter().all(|b| *b == first).then_some(first)
    }

    fn extend(&self, factor: u64) -> Result<Self, SetError> {
        let modulus = self.modulus.checked_mul(factor).filter(|m| *m <= MAX_MODULUS).ok_or(SetError::ModulusOverflow)?;
        let residues = (0..modulus).map(|r| self.residues[(r % self.modulus) as usize]).collect();
        Ok(Self { base: self.base.clone(), modulus, residues })
    }

    /// Re-express over the base `base·t`; indices not divisible by `t`
    /// belong to the generic cell before the rebase.
    fn rebase(&self, t: u64, generic: bool) -> Result<Self, SetError> {
        if t == 1 {
            return Ok(self.clone());
        }
        let modulus = self.modulus.checked_mul(t).filter(|m| *m <= MAX_MODULUS).ok_or(SetError::ModulusOverflow)?;
        let residues = (0..modulus)
            .map(|r| if r % t == 0 { self.residues[((r / t) % self.modulus) as usize] } else { generic })
            .collect();
        Ok(Self { base: &self.base * &FieldElement::from_int(t as i64), modulus, residues })
    }

    /// Smallest admissible index `n` with `base/n < radius`.
    pub fn first_index(&self, radius: Option<&FieldElement>) -> Option<u64> {
        if !self.has_any() {
            return None;
        }
        let n0 = match radius {
            None => 1,
            Some(r) => (&self.base / r).floor().to_u64()?.checked_add(1)?,
        };
        (n0..n0 + self.modulus).find(|n| self.admits_index(*n))
    }

    fn canonical(mut self, generic: bool) -> Self {
        loop {
            let mut changed = false;
            for p in small_prime_factors(self.modulus) {
                let m = self.modulus / p;
                if (0..self.modulus).all(|r| self.residues[r as usize] == self.residues[(r % m) as usize]) {
                    self.residues.truncate(m as usize);
                    self.modulus = m;
                    changed = true;
                    break;
                }
                let generic_ok = (0..self.modulus).filter(|r| r % p != 0).all(|r| self.residues[r as usize] == generic);
                if generic_ok {
                    let residues = (0..m).map(|r| self.residues[(r * p) as usize]).collect();
                    self.residues = residues;
                    self.modulus = m;
                    self.base = &self.base / &FieldElement::from_int(p as i64);
                    changed = true;
                    break;
                }
            }
            if !changed {
                return self;
            }
        }
    }
}

fn small_prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            out.push(p);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn lcm(a: u64, b: u64) -> Result<u64, SetError> {
    let g = a.gcd(&b);
    (a / g).checked_mul(b).filter(|m| *m <= MAX_MODULUS).ok_or(SetError::ModulusOverflow)
}

fn small_u64(r: &BigInt) -> Result<u64, SetError> {
    r.to_u64().filter(|v| *v <= MAX_MODULUS).ok_or(SetError::ModulusOverflow)
}

/// Bring two classes of the same rational class onto one base and one
/// modulus.
fn align(a: &IndexClass, ga: bool, b: &IndexClass, gb: bool, ratio: &Rational) -> Result<(IndexClass, IndexClass), SetError> {
    // a.base / b.base = p/q  ⇒  common base a.base·q = b.base·p
    let p = small_u64(ratio.numer())?;
    let q = small_u64(ratio.denom())?;
    let a2 = a.rebase(q, ga)?;
    let b2 = b.rebase(p, gb)?;
    let m = lcm(a2.modulus, b2.modulus)?;
    Ok((a2.extend(m / a2.modulus)?, b2.extend(m / b2.modulus)?))
}

fn positive_ratio(x: &FieldElement, y: &FieldElement) -> Option<Rational> {
    ratio_if_rational(x, y).ok().flatten().filter(|r| r.is_positive())
}

fn min_radius(a: &Option<FieldElement>, b: &Option<FieldElement>) -> Option<FieldElement> {
    match (a, b) {
        (None, None) => None,
        (Some(x), None) | (None, Some(x)) => Some(x.clone()),
        (Some(x), Some(y)) => Some(x.clone().min(y.clone())),
    }
}

/// Exact germ at `0⁺` of an admissible-`h` set.
///
/// For every `0 < h < radius`, `h` belongs to the set iff it lies in one
/// of the listed index classes (with an admitted residue), or it lies in
/// none of the listed classes' full index sets and `generic` is set.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HSetDescriptor {
    radius: Option<FieldElement>,
    generic: bool,
    classes: Vec<IndexClass>,
}

impl HSetDescriptor {
    pub fn empty() -> Self {
        Self { radius: None, generic: false, classes: Vec::new() }
    }

    pub fn all() -> Self {
        Self { radius: None, generic: true, classes: Vec::new() }
    }

    /// `{|c|/m : m ≥ 1}`.
    pub fn indexed(scale: &FieldElement) -> Self {
        Self { radius: None, generic: false, classes: vec![IndexClass::full(scale.abs(), true)] }
    }

    pub fn with_radius(mut self, radius: Option<FieldElement>) -> Self {
        self.radius = min_radius(&self.radius, &radius);
        self
    }

    pub fn radius(&self) -> Option<&FieldElement> {
        self.radius.as_ref()
    }

    pub fn is_generic(&self) -> bool {
        self.generic
    }

    pub fn classes(&self) -> &[IndexClass] {
        &self.classes
    }

    /// No admissible `h` near 0 (finitely many are ignored).
    pub fn is_empty(&self) -> bool {
        !self.generic && self.classes.iter().all(|c| !c.has_any())
    }

    /// 0 is an accumulation point of the denoted set.
    pub fn is_feasible(&self) -> bool {
        !self.is_empty()
    }

    fn combine(&self, other: &Self, op: impl Fn(bool, bool) -> bool) -> Result<Self, SetError> {
        let generic = op(self.generic, other.generic);
        let mut classes = Vec::new();
        let mut used = vec![false; other.classes.len()];
        for ca in &self.classes {
            let found = other
                .classes
                .iter()
                .enumerate()
                .find_map(|(j, cb)| positive_ratio(&ca.base, &cb.base).map(|r| (j, r)));
            let (cb, ratio) = match found {
                Some((j, r)) => {
                    used[j] = true;
                    (other.classes[j].clone(), r)
                }
                None => (IndexClass::full(ca.base.clone(), other.generic), Rational::one()),
            };
            let (a2, b2) = align(ca, self.generic, &cb, other.generic, &ratio)?;
            let residues = a2.residues.iter().zip(&b2.residues).map(|(x, y)| op(*x, *y)).collect();
            classes.push(IndexClass { base: a2.base, modulus: a2.modulus, residues });
        }
        for (j, cb) in other.classes.iter().enumerate() {
            if used[j] {
                continue;
            }
            let ca = IndexClass::full(cb.base.clone(), self.generic);
            let residues = cb.residues.iter().map(|y| op(self.generic, *y)).collect();
            let _ = ca;
            classes.push(IndexClass { base: cb.base.clone(), modulus: cb.modulus, residues });
        }
        Ok(Self { radius: min_radius(&self.radius, &other.radius), generic, classes }.canonical())
    }

    pub fn intersect(&self, other: &Self) -> Result<Self, SetError> {
        self.combine(other, |a, b| a && b)
    }

    pub fn union(&self, other: &Self) -> Result<Self, SetError> {
        self.combine(other, |a, b| a || b)
    }

    pub fn difference(&self, other: &Self) -> Result<Self, SetError> {
        self.combine(other, |a, b| a && !b)
    }

    pub fn complement(&self) -> Self {
        let classes = self
            .classes
            .iter()
            .map(|c| IndexClass { base: c.base.clone(), modulus: c.modulus, residues: c.residues.iter().map(|b| !b).collect() })
            .collect();
        Self { radius: self.radius.clone(), generic: !self.generic, classes }.canonical()
    }

    /// Same denotation near 0, ignoring radii.
    pub fn same_germ(&self, other: &Self) -> Result<bool, SetError> {
        Ok(self.combine(other, |a, b| a != b)?.is_empty())
    }

    fn canonical(self) -> Self {
        let generic = self.generic;
        let mut classes: Vec<IndexClass> = self
            .classes
            .into_iter()
            .map(|c| c.canonical(generic))
            .filter(|c| c.uniform() != Some(generic))
            .collect();
        classes.sort_by(|a, b| a.base.cmp(&b.base));
        Self { radius: self.radius, generic, classes }
    }

    /// Exact membership of a particular `h > 0` below the radius.
    pub fn contains_h(&self, h: &FieldElement) -> bool {
        if !h.is_positive() {
            return false;
        }
        if let Some(r) = &self.radius {
            if h >= r {
                return false;
            }
        }
        for c in &self.classes {
            if let Some(n) = positive_ratio(&c.base, h) {
                if n.is_integer() {
                    return match n.to_integer().to_u64() {
                        Some(n) => c.admits_index(n),
                        None => false,
                    };
                }
            }
        }
        self.generic
    }

    /// A scale whose multiples `c/n` avoid every listed class.
    pub fn generic_scale(&self, radicand: u32) -> FieldElement {
        let mut candidates = vec![FieldElement::one()];
        if let Ok(rt) = FieldElement::sqrt_radicand(radicand) {
            for k in 0..(self.classes.len() as i64 + 2) {
                candidates.push(&FieldElement::from_int(k) + &rt);
            }
        }
        candidates
            .into_iter()
            .find(|c| self.classes.iter().all(|cl| ratio_if_rational(c, &cl.base).ok().flatten().is_none()))
            .unwrap_or_else(FieldElement::one)
    }

    /// A concrete admissible sequence `h_n = scale/(first + k·step)`.
    pub fn witness_sequence(&self, radicand: u32) -> Option<ReplaySequence> {
        if self.generic {
            let scale = self.generic_scale(radicand);
            let first = IndexClass::full(scale.clone(), true).first_index(self.radius.as_ref())?;
            return Some(ReplaySequence { scale, first_index: first, step: 1 });
        }
        self.classes.iter().find_map(|c| {
            let first = c.first_index(self.radius.as_ref())?;
            Some(ReplaySequence { scale: c.base.clone(), first_index: first, step: c.modulus })
        })
    }

    /// First `count` terms of the admissible sequences this set supports,
    /// one stream per listed class plus one generic stream.
    pub fn sample(&self, count: usize, radicand: u32) -> Vec<FieldElement> {
        let mut out = Vec::new();
        let mut streams: Vec<(FieldElement, IndexClass)> =
            self.classes.iter().filter(|c| c.has_any()).map(|c| (c.base.clone(), c.clone())).collect();
        if self.generic {
            let scale = self.generic_scale(radicand);
            streams.push((scale.clone(), IndexClass::full(scale, true)));
        }
        for (scale, class) in streams {
            let Some(mut n) = class.first_index(self.radius.as_ref()) else { continue };
            let mut taken = 0;
            while taken < count {
                if class.admits_index(n) {
                    out.push(&scale / &FieldElement::from_int(n as i64));
                    taken += 1;
                }
                n += 1;
            }
        }
        out
    }
}

impl fmt::Display for HSetDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("empty");
        }
        let classes: Vec<String> = self
            .classes
            .iter()
            .map(|c| {
                let res: Vec<String> = c.residues().iter().map(|r| format!("{r}")).collect();
                format!("{}/n, n mod {} in {{{}}}", c.base, c.modulus, res.join(","))
            })
            .collect();
        if self.generic {
            f.write_str("continuum")?;
            if !classes.is_empty() {
                write!(f, " except outside [{}]", classes.join("; "))?;
            }
        } else {
            write!(f, "indexed [{}]", classes.join("; "))?;
        }
        if let Some(r) = &self.radius {
            write!(f, " below {r}")?;
        }
        Ok(())
    }
}

/// `h_k = scale / (first_index + k·step)` for `k = 0, 1, …`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReplaySequence {
    pub scale: FieldElement,
    pub first_index: u64,
    pub step: u64,
}

impl ReplaySequence {
    pub fn term(&self, k: u64) -> FieldElement {
        &self.scale / &FieldElement::from_int((self.first_index + k * self.step) as i64)
    }
}

/// The admissible one-sided approach points `a ± h`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SideWitness {
    pub side: Side,
    pub hset: HSetDescriptor,
}

impl SideWitness {
    pub fn is_feasible(&self) -> bool {
        self.hset.is_feasible()
    }
}

/// Distance from `a` to the nearest value in `values` strictly on `side`.
fn nearest_on_side<'a>(a: &FieldElement, side: Side, values: impl Iterator<Item = &'a FieldElement>) -> Option<FieldElement> {
    values
        .filter_map(|v| {
            let d = v - a;
            let s = i64::from(d.signum());
            (s == side.sign()).then(|| d.abs())
        })
        .min()
}

fn interval_germ(a: &FieldElement, side: Side, iv: &Interval) -> HSetDescriptor {
    let lo_le = |strict: bool| match iv.lo.value() {
        None => true,
        Some(l) => {
            if strict {
                l < a
            } else {
                l <= a
            }
        }
    };
    let hi_ge = |strict: bool| match iv.hi.value() {
        None => true,
        Some(u) => {
            if strict {
                u > a
            } else {
                u >= a
            }
        }
    };
    let inside = match side {
        Side::Right => lo_le(false) && hi_ge(true),
        Side::Left => lo_le(true) && hi_ge(false),
    };
    let radius = nearest_on_side(a, side, iv.lo.value().into_iter().chain(iv.hi.value()));
    let base = if inside { HSetDescriptor::all() } else { HSetDescriptor::empty() };
    base.with_radius(radius)
}

/// Germ of a generated set near a nonzero point: no members accumulate
/// there, so the germ is empty below the distance to the nearest member.
fn gen_radius(a: &FieldElement, side: Side, g: &GenSet) -> Option<FieldElement> {
    let sa = i64::from(a.signum());
    let abs_a = a.abs();
    let c = g.scale.abs();
    let q = &c / &abs_a;
    let same_sign = g.has_members_of_sign(sa);
    if side.sign() == sa {
        // moving away from 0: largest member |c|/m beyond |a|
        if !same_sign {
            return None;
        }
        let m = q.ceil() - BigInt::one();
        if m < BigInt::one() {
            return None;
        }
        let member = &c / &FieldElement::from_rational(Rational::from_integer(m));
        Some(&member - &abs_a)
    } else {
        if !same_sign {
            return Some(abs_a);
        }
        let m = q.floor() + BigInt::one();
        let member = &c / &FieldElement::from_rational(Rational::from_integer(m));
        Some(&abs_a - &member)
    }
}

fn gen_germ(a: &FieldElement, side: Side, g: &GenSet) -> HSetDescriptor {
    if a.is_zero() {
        if g.has_members_of_sign(side.sign()) {
            HSetDescriptor::indexed(&g.scale)
        } else {
            HSetDescriptor::empty()
        }
    } else {
        HSetDescriptor::empty().with_radius(gen_radius(a, side, g))
    }
}

/// Germ of `{h > 0 : a + side·h ∈ s}`.
pub fn set_germ(a: &FieldElement, side: Side, s: &StructuredSet) -> Result<HSetDescriptor, SetError> {
    let mut acc = HSetDescriptor::empty();
    for atom in &s.atoms {
        let g = match atom {
            SetAtom::Gen(g) => gen_germ(a, side, g),
            SetAtom::Points(ps) => HSetDescriptor::empty().with_radius(nearest_on_side(a, side, ps.iter())),
            SetAtom::Interval(iv) => interval_germ(a, side, iv),
        };
        acc = acc.union(&g)?;
    }
    Ok(acc)
}

/// Positive lower bound on the first positive root of a polynomial whose
/// lowest nonzero coefficient sits at `low`.
fn root_free_radius(coeffs: &[FieldElement]) -> Option<FieldElement> {
    let low = coeffs.iter().position(|c| !c.is_zero())?;
    let lead = coeffs[low].abs();
    let rest = coeffs[low + 1..].iter().map(FieldElement::abs).max()?;
    if rest.is_zero() {
        return None;
    }
    Some(&lead / &(&lead + &rest))
}

fn rat_sign_and_radius(r: &RatFun) -> (i32, Option<FieldElement>) {
    let sign = r.sign_near_zero();
    let radius = min_radius(&root_free_radius(r.numer()), &root_free_radius(r.denom()));
    (sign, radius)
}

fn cmp_germ(a: &FieldElement, side: Side, lhs: &Expr, op: CmpOp, rhs: &FieldElement) -> Result<HSetDescriptor, SetError> {
    let (sign, radius) = if *lhs == Expr::Var {
        let delta = a - rhs;
        let s = delta.signum();
        let sign = if s != 0 { s } else { side.sign() as i32 };
        let radius = (s != 0 && i64::from(s) != side.sign()).then(|| delta.abs());
        (sign, radius)
    } else {
        let path = rat_path(lhs, a, side, &FieldElement::one())?;
        let shifted = path.sub(&RatFun::constant(rhs.clone()));
        rat_sign_and_radius(&shifted)
    };
    let base = if op.holds_for_sign(sign) { HSetDescriptor::all() } else { HSetDescriptor::empty() };
    Ok(base.with_radius(radius))
}

/// Germ of `{h > 0 : a + side·h satisfies the region}`.
pub fn region_germ(a: &FieldElement, side: Side, r: &Region) -> Result<HSetDescriptor, SetError> {
    let mut acc = HSetDescriptor::all();
    for atom in &r.atoms {
        let g = match atom {
            GuardAtom::In(s) => set_germ(a, side, s)?,
            GuardAtom::NotIn(s) => set_germ(a, side, s)?.complement(),
            GuardAtom::Cmp { lhs, op, rhs } => cmp_germ(a, side, lhs, *op, rhs)?,
        };
        acc = acc.intersect(&g)?;
        if acc.is_empty() && acc.radius.is_none() {
            break;
        }
    }
    Ok(acc)
}

/// `{h > 0 : a + side·h ∈ region ∩ domain}` near 0.
pub fn feasible_h_set(a: &FieldElement, side: Side, region: &Region, domain: &StructuredSet) -> Result<HSetDescriptor, SetError> {
    set_germ(a, side, domain)?.intersect(&region_germ(a, side, region)?)
}

/// Admissible symmetric steps: `{h > 0 : a + h ∈ A and a − h ∈ A}`.
pub fn s_space(a: &FieldElement, domain: &StructuredSet) -> Result<HSetDescriptor, SetError> {
    set_germ(a, Side::Right, domain)?.intersect(&set_germ(a, Side::Left, domain)?)
}

/// Left and right approach witnesses (increasing and decreasing sequences).
pub fn lu_spaces(a: &FieldElement, domain: &StructuredSet) -> Result<(SideWitness, SideWitness), SetError> {
    Ok((
        SideWitness { side: Side::Left, hset: set_germ(a, Side::Left, domain)? },
        SideWitness { side: Side::Right, hset: set_germ(a, Side::Right, domain)? },
    ))
}

/// Boxed set for use inside guard atoms.
pub fn boxed(s: StructuredSet) -> Box<StructuredSet> {
    Box::new(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rt2() -> FieldElement {
        FieldElement::sqrt_radicand(2).unwrap()
    }

    fn q(n: i64, d: i64) -> FieldElement {
        FieldElement::from_ratio(n, d)
    }

    fn seq(c: FieldElement) -> StructuredSet {
        StructuredSet::gen(c, IndexRange::All).unwrap()
    }

    #[test]
    fn membership() {
        let a = seq(FieldElement::one());
        assert!(a.contains(&q(1, 7)));
        assert!(!a.contains(&(&rt2() / &FieldElement::from_int(3))));
        let b = StructuredSet::gen(rt2(), IndexRange::Negative).unwrap();
        assert!(b.contains(&(-&(&rt2() / &FieldElement::from_int(5)))));
        assert!(!b.contains(&(&rt2() / &FieldElement::from_int(5))));
        assert!(!a.contains(&FieldElement::zero()));
    }

    #[test]
    fn example_domain_right_of_zero_is_indexed() {
        let a = seq(FieldElement::one()).union(StructuredSet::points(vec![FieldElement::zero()]));
        let h = feasible_h_set(&FieldElement::zero(), Side::Right, &Region::new(vec![GuardAtom::In(a.clone())]), &StructuredSet::line())
            .unwrap();
        assert!(!h.is_generic());
        assert_eq!(h.classes().len(), 1);
        assert_eq!(h.classes()[0].base(), &FieldElement::one());
        assert_eq!(h.classes()[0].residues(), vec![0]);
    }

    #[test]
    fn generated_set_does_not_accumulate_off_zero() {
        let h = feasible_h_set(&q(1, 2), Side::Right, &Region::new(vec![GuardAtom::In(seq(FieldElement::one()))]), &StructuredSet::line())
            .unwrap();
        assert!(h.is_empty());
        // nearest member to the right of 1/2 is 1
        assert_eq!(h.radius(), Some(&q(1, 2)));
        let left = set_germ(&q(1, 2), Side::Left, &seq(FieldElement::one())).unwrap();
        assert_eq!(left.radius(), Some(&q(1, 6)));
    }

    #[test]
    fn irrational_ratio_intersection_is_empty() {
        let r = Region::new(vec![GuardAtom::In(seq(FieldElement::one())), GuardAtom::In(seq(rt2()))]);
        let h = feasible_h_set(&FieldElement::zero(), Side::Right, &r, &StructuredSet::line()).unwrap();
        assert!(h.is_empty());
    }

    #[test]
    fn rational_ratio_intersection_is_a_congruence() {
        // {1/n} ∩ {(3/2)/m} = {3/(2·3k)}… = {1/(2k)}·… : h = 1/n with 2 | n? check by brute force
        let r = Region::new(vec![GuardAtom::In(seq(FieldElement::one())), GuardAtom::In(seq(q(3, 2)))]);
        let h = feasible_h_set(&FieldElement::zero(), Side::Right, &r, &StructuredSet::line()).unwrap();
        assert!(h.is_feasible());
        for n in 1..200i64 {
            for scale in [FieldElement::one(), q(3, 2)] {
                let x = &scale / &FieldElement::from_int(n);
                let expected = r.contains(&x).unwrap();
                assert_eq!(h.contains_h(&x), expected, "h = {x}");
            }
        }
    }

    #[test]
    fn s_space_examples() {
        let zero = FieldElement::zero();
        let a = seq(FieldElement::one()).union(StructuredSet::points(vec![zero.clone()]));
        let ab = a.clone().union(seq(rt2()));
        assert!(s_space(&zero, &ab).unwrap().is_feasible());
        assert!(s_space(&rt2(), &ab).unwrap().is_empty());
        let line = s_space(&zero, &StructuredSet::line()).unwrap();
        assert!(line.is_generic() && line.radius().is_none());
    }

    #[test]
    fn lu_examples() {
        let zero = FieldElement::zero();
        let (l, r) = lu_spaces(&zero, &StructuredSet::line()).unwrap();
        assert!(l.is_feasible() && r.is_feasible());
        let pos = StructuredSet::gen(FieldElement::one(), IndexRange::Positive).unwrap().union(StructuredSet::points(vec![zero.clone()]));
        let (l, r) = lu_spaces(&zero, &pos).unwrap();
        assert!(!l.is_feasible());
        assert!(r.is_feasible());
    }

    #[test]
    fn interval_endpoints_are_one_sided() {
        let iv = StructuredSet::interval(Interval::closed(FieldElement::zero(), FieldElement::from_int(2)));
        let (l, r) = lu_spaces(&FieldElement::zero(), &iv).unwrap();
        assert!(!l.is_feasible());
        assert!(r.is_feasible());
        assert_eq!(r.hset.radius(), Some(&FieldElement::from_int(2)));
        assert!(s_space(&FieldElement::zero(), &iv).unwrap().is_empty());
    }

    #[test]
    fn complement_round_trip() {
        let h = HSetDescriptor::indexed(&FieldElement::one()).union(&HSetDescriptor::indexed(&q(3, 2))).unwrap();
        assert!(h.complement().complement().same_germ(&h).unwrap());
        assert!(h.intersect(&h.complement()).unwrap().is_empty());
        assert!(h.union(&h.complement()).unwrap().same_germ(&HSetDescriptor::all()).unwrap());
    }

    #[test]
    fn witness_sequence_avoids_excluded_class() {
        let h = HSetDescriptor::all().difference(&HSetDescriptor::indexed(&FieldElement::one())).unwrap();
        let seq = h.witness_sequence(2).unwrap();
        assert_eq!(seq.scale, rt2());
        assert!(h.contains_h(&seq.term(0)));
    }
}
