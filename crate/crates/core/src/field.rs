//! Exact arithmetic in a real quadratic field ℚ(√d).
//!
//! Every number handled by the decision procedures is an element
//! `a + b·√d` with `a`, `b` arbitrary-precision rationals and `d` a
//! squarefree integer greater than one. Equality, sign and floor are all
//! decided with integer arithmetic; floating point only appears in
//! [`FieldElement::to_f64`].

use alloc::string::String;
use core::cmp::Ordering;
use core::fmt;
use core::hash::{Hash, Hasher};
use core::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Arbitrary-precision rational, always kept in lowest terms.
pub type Rational = BigRational;

/// Radicand used when a program does not declare one.
pub const DEFAULT_RADICAND: u32 = 2;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum FieldError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("radicands {0} and {1} cannot be mixed in one field")]
    RadicandMismatch(u32, u32),
    #[error("radicand {0} is not a squarefree integer greater than one")]
    InvalidRadicand(u32),
}

/// Arithmetic operation selector for [`field_arith`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldOp {
    Add,
    Sub,
    Mul,
    Div,
    Neg,
}

/// `rat + irr·√radicand`.
///
/// Elements with a zero irrational part are plain rationals and combine
/// with elements of any radicand. Two elements with nonzero irrational
/// parts must share the radicand.
#[derive(Clone, Debug)]
pub struct FieldElement {
    rat: Rational,
    irr: Rational,
    radicand: u32,
}

pub fn is_squarefree(d: u32) -> bool {
    if d < 2 {
        return false;
    }
    let mut p = 2u32;
    while p.saturating_mul(p) <= d {
        if d.is_multiple_of(p * p) {
            return false;
        }
        p += 1;
    }
    true
}

/// Splits `k` as `s²·d'` with `d'` squarefree; returns `(s, d')`.
pub fn squarefree_split(k: u32) -> (u32, u32) {
    let mut s = 1u32;
    let mut rest = k;
    let mut p = 2u32;
    while p.saturating_mul(p) <= rest {
        while rest.is_multiple_of(p * p) {
            rest /= p * p;
            s *= p;
        }
        p += 1;
    }
    (s, rest)
}

fn rat_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

fn rational_sqrt(r: &Rational) -> Option<Rational> {
    if r.is_negative() {
        return None;
    }
    let n = r.numer().magnitude();
    let d = r.denom().magnitude();
    let sn = n.sqrt();
    let sd = d.sqrt();
    if &(&sn * &sn) == n && &(&sd * &sd) == d {
        Some(Rational::new(
            BigInt::from_biguint(Sign::Plus, sn),
            BigInt::from_biguint(Sign::Plus, sd),
        ))
    } else {
        None
    }
}

fn sign_of(r: &Rational) -> i32 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}

impl FieldElement {
    pub fn new(rat: Rational, irr: Rational, radicand: u32) -> Result<Self, FieldError> {
        if !is_squarefree(radicand) {
            return Err(FieldError::InvalidRadicand(radicand));
        }
        Ok(Self { rat, irr, radicand })
    }

    pub fn from_rational(r: Rational) -> Self {
        Self { rat: r, irr: Rational::zero(), radicand: DEFAULT_RADICAND }
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(rat_int(n))
    }

    pub fn from_ratio(n: i64, d: i64) -> Self {
        Self::from_rational(Rational::new(BigInt::from(n), BigInt::from(d)))
    }

    pub fn zero() -> Self {
        Self::from_int(0)
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    /// √d itself.
    pub fn sqrt_radicand(radicand: u32) -> Result<Self, FieldError> {
        Self::new(Rational::zero(), Rational::one(), radicand)
    }

    /// `rat + irr·√d` for small integer-ratio parts; handy in tests.
    pub fn quadratic(rat: (i64, i64), irr: (i64, i64), radicand: u32) -> Result<Self, FieldError> {
        Self::new(
            Rational::new(BigInt::from(rat.0), BigInt::from(rat.1)),
            Rational::new(BigInt::from(irr.0), BigInt::from(irr.1)),
            radicand,
        )
    }

    pub fn rat_part(&self) -> &Rational {
        &self.rat
    }

    pub fn irr_part(&self) -> &Rational {
        &self.irr
    }

    pub fn radicand(&self) -> u32 {
        self.radicand
    }

    pub fn is_zero(&self) -> bool {
        self.rat.is_zero() && self.irr.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.irr.is_zero()
    }

    /// The integer value, if this element is a rational integer.
    pub fn to_integer(&self) -> Option<BigInt> {
        if self.is_rational() && self.rat.is_integer() {
            Some(self.rat.to_integer())
        } else {
            None
        }
    }

    fn joint_radicand(&self, other: &Self) -> Result<u32, FieldError> {
        match (self.irr.is_zero(), other.irr.is_zero()) {
            (true, true) => Ok(self.radicand),
            (false, true) => Ok(self.radicand),
            (true, false) => Ok(other.radicand),
            (false, false) if self.radicand == other.radicand => Ok(self.radicand),
            (false, false) => Err(FieldError::RadicandMismatch(self.radicand, other.radicand)),
        }
    }

    fn d(&self) -> Rational {
        rat_int(i64::from(self.radicand))
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, FieldError> {
        let radicand = self.joint_radicand(other)?;
        Ok(Self { rat: &self.rat + &other.rat, irr: &self.irr + &other.irr, radicand })
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, FieldError> {
        let radicand = self.joint_radicand(other)?;
        Ok(Self { rat: &self.rat - &other.rat, irr: &self.irr - &other.irr, radicand })
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, FieldError> {
        let radicand = self.joint_radicand(other)?;
        let d = rat_int(i64::from(radicand));
        let rat = &self.rat * &other.rat + &self.irr * &other.irr * d;
        let irr = &self.rat * &other.irr + &self.irr * &other.rat;
        Ok(Self { rat, irr, radicand })
    }

    pub fn checked_inv(&self) -> Result<Self, FieldError> {
        if self.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        if self.irr.is_zero() {
            return Ok(Self { rat: self.rat.recip(), irr: Rational::zero(), radicand: self.radicand });
        }
        // (a + b√d)⁻¹ = (a − b√d)/(a² − d b²); the norm vanishes only at zero.
        let norm = self.norm();
        Ok(Self {
            rat: &self.rat / &norm,
            irr: -(&self.irr / &norm),
            radicand: self.radicand,
        })
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self, FieldError> {
        let inv = other.checked_inv()?;
        self.checked_mul(&inv)
    }

    /// Field norm `a² − d·b²`.
    pub fn norm(&self) -> Rational {
        &self.rat * &self.rat - &self.irr * &self.irr * self.d()
    }

    pub fn conjugate(&self) -> Self {
        Self { rat: self.rat.clone(), irr: -self.irr.clone(), radicand: self.radicand }
    }

    /// Exact sign of the real value: compares `a²` with `d·b²`.
    pub fn signum(&self) -> i32 {
        let sa = sign_of(&self.rat);
        let sb = sign_of(&self.irr);
        if sb == 0 {
            return sa;
        }
        if sa == 0 || sa == sb {
            return if sa == 0 { sb } else { sa };
        }
        let a2 = &self.rat * &self.rat;
        let db2 = &self.irr * &self.irr * self.d();
        if a2 > db2 {
            sa
        } else {
            sb
        }
    }

    pub fn is_positive(&self) -> bool {
        self.signum() > 0
    }

    pub fn is_negative(&self) -> bool {
        self.signum() < 0
    }

    pub fn abs(&self) -> Self {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one();
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn min(self, other: Self) -> Self {
        if self <= other {
            self
        } else {
            other
        }
    }

    pub fn max(self, other: Self) -> Self {
        if self >= other {
            self
        } else {
            other
        }
    }

    /// Largest integer not exceeding the value.
    pub fn floor(&self) -> BigInt {
        if self.irr.is_zero() {
            return self.rat.floor().to_integer();
        }
        // Integer estimate of b√d, then correct with exact comparisons.
        let b2d = &self.irr * &self.irr * self.d();
        let root = b2d.floor().to_integer().magnitude().sqrt();
        let root = BigInt::from_biguint(Sign::Plus, root);
        let irr_est = if self.irr.is_negative() { -root } else { root };
        let mut k = self.rat.floor().to_integer() + irr_est;
        loop {
            let below = self - &Self::from_rational(Rational::from_integer(k.clone()));
            if below.is_negative() {
                k -= 1;
                continue;
            }
            let above = self - &Self::from_rational(Rational::from_integer(&k + 1));
            if above.signum() >= 0 {
                k += 1;
                continue;
            }
            return k;
        }
    }

    pub fn ceil(&self) -> BigInt {
        -(-self).floor()
    }

    /// Square root inside the field, when it exists; the result is the
    /// nonnegative root.
    pub fn sqrt(&self) -> Option<Self> {
        if self.is_negative() {
            return None;
        }
        if self.is_zero() {
            return Some(Self::zero());
        }
        let d = self.d();
        if self.irr.is_zero() {
            if let Some(r) = rational_sqrt(&self.rat) {
                return Some(Self { rat: r, irr: Rational::zero(), radicand: self.radicand });
            }
            // p = d·s²  ⇒  √p = s·√d
            let over_d = &self.rat / &d;
            return rational_sqrt(&over_d).map(|s| Self { rat: Rational::zero(), irr: s, radicand: self.radicand });
        }
        // (x + y√d)² = p + q√d  ⇒  x² = (p ± √(p² − d q²))/2, y = q/(2x).
        let n = rational_sqrt(&self.norm())?;
        let two = rat_int(2);
        for cand in [(&self.rat + &n) / &two, (&self.rat - &n) / &two] {
            if let Some(x) = rational_sqrt(&cand) {
                if x.is_zero() {
                    continue;
                }
                let y = &self.irr / (&two * &x);
                let root = Self { rat: x, irr: y, radicand: self.radicand };
                return Some(if root.is_negative() { -root } else { root });
            }
        }
        None
    }

    /// Double-precision approximation with relative error of at most a
    /// couple of ulps, including under heavy cancellation.
    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        if self.irr.is_zero() {
            return rational_to_f64(&self.rat);
        }
        // value = (A + B√d)/D with integers A, B, D.
        let den = self.rat.denom() * self.irr.denom();
        let a = self.rat.numer() * self.irr.denom();
        let b = self.irr.numer() * self.rat.denom();
        let d = BigInt::from(self.radicand);
        let mut k: u64 = 80 + den.bits();
        loop {
            let scaled_a: BigInt = &a << k;
            let b2d4k: BigInt = (&b * &b * &d) << (2 * k);
            let root = BigInt::from_biguint(Sign::Plus, b2d4k.magnitude().sqrt());
            let num = if b.is_negative() { scaled_a - root } else { scaled_a + root };
            let q = num.div_floor(&den);
            if q.bits() >= 64 {
                return scale_pow2(q.to_f64().unwrap_or(f64::NAN), -(k as i64));
            }
            k += 64 + (64 - q.bits());
        }
    }
}

fn rational_to_f64(r: &Rational) -> f64 {
    let n = r.numer();
    let d = r.denom();
    // Shift so the integer quotient carries at least 64 significant bits.
    let shift = 64i64 + d.bits() as i64 - n.bits() as i64;
    let q = if shift >= 0 { (n << shift as u64).div_floor(d) } else { (n >> (-shift) as u64).div_floor(d) };
    scale_pow2(q.to_f64().unwrap_or(f64::NAN), -shift)
}

fn scale_pow2(x: f64, e: i64) -> f64 {
    let e = e.clamp(-4000, 4000) as i32;
    libm::scalbn(x, e)
}

/// One arithmetic operation with errors reported
/// as values.
pub fn field_arith(op: FieldOp, x: &FieldElement, y: &FieldElement) -> Result<FieldElement, FieldError> {
    match op {
        FieldOp::Add => x.checked_add(y),
        FieldOp::Sub => x.checked_sub(y),
        FieldOp::Mul => x.checked_mul(y),
        FieldOp::Div => x.checked_div(y),
        FieldOp::Neg => Ok(-x),
    }
}

pub fn field_sign(x: &FieldElement) -> i32 {
    x.signum()
}

/// `x / y` when the quotient is rational.
pub fn ratio_if_rational(x: &FieldElement, y: &FieldElement) -> Result<Option<Rational>, FieldError> {
    let q = x.checked_div(y)?;
    Ok(if q.is_rational() { Some(q.rat) } else { None })
}

impl PartialEq for FieldElement {
    fn eq(&self, other: &Self) -> bool {
        self.rat == other.rat && self.irr == other.irr && (self.irr.is_zero() || self.radicand == other.radicand)
    }
}

impl Eq for FieldElement {}

impl Hash for FieldElement {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.rat.hash(state);
        self.irr.hash(state);
        if !self.irr.is_zero() {
            self.radicand.hash(state);
        }
    }
}

impl PartialOrd for FieldElement {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for FieldElement {
    /// Real-value order. Panics if the operands live in different fields.
    fn cmp(&self, other: &Self) -> Ordering {
        match (self - other).signum() {
            s if s < 0 => Ordering::Less,
            0 => Ordering::Equal,
            _ => Ordering::Greater,
        }
    }
}

impl Default for FieldElement {
    fn default() -> Self {
        Self::zero()
    }
}

impl From<i64> for FieldElement {
    fn from(n: i64) -> Self {
        Self::from_int(n)
    }
}

impl From<Rational> for FieldElement {
    fn from(r: Rational) -> Self {
        Self::from_rational(r)
    }
}

fn write_rational(f: &mut fmt::Formatter<'_>, r: &Rational) -> fmt::Result {
    if r.is_integer() {
        write!(f, "{}", r.numer())
    } else {
        write!(f, "{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for FieldElement {
    /// Renders as `p/q + r/s*rt(d)`; the output parses back as a DSL
    /// constant.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.irr.is_zero() {
            return write_rational(f, &self.rat);
        }
        if self.rat.is_zero() {
            write_rational(f, &self.irr)?;
            return write!(f, "*rt({})", self.radicand);
        }
        write_rational(f, &self.rat)?;
        if self.irr.is_negative() {
            f.write_str(" - ")?;
            write_rational(f, &-self.irr.clone())?;
        } else {
            f.write_str(" + ")?;
            write_rational(f, &self.irr)?;
        }
        write!(f, "*rt({})", self.radicand)
    }
}

impl FieldElement {
    pub fn render(&self) -> String {
        alloc::format!("{self}")
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl<'a> $tr<&'a FieldElement> for &'a FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: &'a FieldElement) -> FieldElement {
                match self.$checked(rhs) {
                    Ok(v) => v,
                    Err(e) => panic!("field arithmetic failed: {e}"),
                }
            }
        }
        impl $tr<FieldElement> for FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: FieldElement) -> FieldElement {
                (&self).$method(&rhs)
            }
        }
        impl<'a> $tr<&'a FieldElement> for FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: &'a FieldElement) -> FieldElement {
                (&self).$method(rhs)
            }
        }
        impl<'a> $tr<FieldElement> for &'a FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: FieldElement) -> FieldElement {
                self.$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, checked_add);
forward_binop!(Sub, sub, checked_sub);
forward_binop!(Mul, mul, checked_mul);
forward_binop!(Div, div, checked_div);

impl Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        FieldElement { rat: -self.rat.clone(), irr: -self.irr.clone(), radicand: self.radicand }
    }
}

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        FieldElement { rat: -self.rat, irr: -self.irr, radicand: self.radicand }
    }
}

/// Extended reals over the field.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ExtReal {
    MinusInfinity,
    Finite(FieldElement),
    PlusInfinity,
}

impl ExtReal {
    pub fn finite(&self) -> Option<&FieldElement> {
        match self {
            ExtReal::Finite(x) => Some(x),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, ExtReal::Finite(x) if x.is_zero())
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            ExtReal::MinusInfinity => f64::NEG_INFINITY,
            ExtReal::PlusInfinity => f64::INFINITY,
            ExtReal::Finite(x) => x.to_f64(),
        }
    }
}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtReal {
    fn cmp(&self, other: &Self) -> Ordering {
        use ExtReal::*;
        match (self, other) {
            (Finite(a), Finite(b)) => a.cmp(b),
            (MinusInfinity, MinusInfinity) | (PlusInfinity, PlusInfinity) => Ordering::Equal,
            (MinusInfinity, _) | (_, PlusInfinity) => Ordering::Less,
            (PlusInfinity, _) | (_, MinusInfinity) => Ordering::Greater,
        }
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::MinusInfinity => f.write_str("-inf"),
            ExtReal::PlusInfinity => f.write_str("+inf"),
            ExtReal::Finite(x) => write!(f, "{x}"),
        }
    }
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

    #[test]
    fn rationalizing_a_surd() {
        let r = field_arith(FieldOp::Div, &FieldElement::one(), &rt2()).unwrap();
        assert_eq!(r, FieldElement::quadratic((0, 1), (1, 2), 2).unwrap());
    }

    #[test]
    fn radicand_squares_to_itself() {
        assert_eq!(&rt2() * &rt2(), FieldElement::from_int(2));
    }

    #[test]
    fn three_minus_two_root_two() {
        let x = &FieldElement::from_int(3) - &(&FieldElement::from_int(2) * &rt2());
        assert!(!x.is_zero());
        assert_eq!(field_sign(&x), 1);
        assert_eq!(field_sign(&FieldElement::zero()), 0);
        assert_eq!(field_sign(&(&FieldElement::one() - &rt2())), -1);
    }

    #[test]
    fn division_by_zero_is_an_error_value() {
        assert_eq!(
            field_arith(FieldOp::Div, &FieldElement::one(), &FieldElement::zero()),
            Err(FieldError::DivisionByZero)
        );
        assert_eq!(ratio_if_rational(&FieldElement::one(), &FieldElement::zero()), Err(FieldError::DivisionByZero));
    }

    #[test]
    fn ratios() {
        let two_rt2 = &FieldElement::from_int(2) * &rt2();
        assert_eq!(ratio_if_rational(&rt2(), &two_rt2).unwrap(), Some(Rational::new(1.into(), 2.into())));
        assert_eq!(ratio_if_rational(&FieldElement::one(), &rt2()).unwrap(), None);
        assert_eq!(ratio_if_rational(&q(3, 5), &q(6, 5)).unwrap(), Some(Rational::new(1.into(), 2.into())));
    }

    #[test]
    fn mixed_radicands_rejected() {
        let rt3 = FieldElement::sqrt_radicand(3).unwrap();
        assert_eq!(rt2().checked_add(&rt3), Err(FieldError::RadicandMismatch(2, 3)));
        // rationals mix with anything
        assert!(FieldElement::one().checked_add(&rt3).is_ok());
        assert_eq!(FieldElement::new(Rational::zero(), Rational::one(), 4), Err(FieldError::InvalidRadicand(4)));
    }

    #[test]
    fn floors() {
        assert_eq!(rt2().floor(), BigInt::from(1));
        assert_eq!((-rt2()).floor(), BigInt::from(-2));
        let x = &FieldElement::from_int(3) - &(&FieldElement::from_int(2) * &rt2());
        assert_eq!(x.floor(), BigInt::from(0));
        assert_eq!(q(7, 2).floor(), BigInt::from(3));
        assert_eq!(q(-7, 2).floor(), BigInt::from(-4));
        assert_eq!(FieldElement::from_int(5).ceil(), BigInt::from(5));
        // 1/(√2/3) = 3/√2 ≈ 2.1213
        assert_eq!((&FieldElement::one() / &(&rt2() / &FieldElement::from_int(3))).floor(), BigInt::from(2));
    }

    #[test]
    fn square_roots() {
        assert_eq!(FieldElement::from_int(2).sqrt(), Some(rt2()));
        assert_eq!(q(9, 4).sqrt(), Some(q(3, 2)));
        assert_eq!(FieldElement::from_int(3).sqrt(), None);
        // (1 + √2)² = 3 + 2√2
        let s = FieldElement::quadratic((3, 1), (2, 1), 2).unwrap();
        assert_eq!(s.sqrt(), Some(FieldElement::quadratic((1, 1), (1, 1), 2).unwrap()));
        // (1 − √2)² = 3 − 2√2, principal root is √2 − 1
        let s = FieldElement::quadratic((3, 1), (-2, 1), 2).unwrap();
        assert_eq!(s.sqrt(), Some(FieldElement::quadratic((-1, 1), (1, 1), 2).unwrap()));
        assert_eq!(FieldElement::from_int(-4).sqrt(), None);
    }

    fn ulps(a: f64, b: f64) -> u64 {
        (a.to_bits() as i64 - b.to_bits() as i64).unsigned_abs()
    }

    #[test]
    fn float_conversion() {
        assert_eq!(q(1, 2).to_f64(), 0.5);
        assert!(ulps(rt2().to_f64(), core::f64::consts::SQRT_2) <= 4);
        // 3 − 2√2 = 0.17157287525380990239662255158... (50-digit reference)
        let x = FieldElement::quadratic((3, 1), (-2, 1), 2).unwrap();
        assert!(ulps(x.to_f64(), 0.171_572_875_253_809_9) <= 4);
        // 99 − 70√2 = 0.0050506338833465838817... (severe cancellation)
        let y = FieldElement::quadratic((99, 1), (-70, 1), 2).unwrap();
        assert!(ulps(y.to_f64(), 0.005_050_633_883_346_584) <= 4, "{}", y.to_f64());
    }

    #[test]
    fn display_is_parseable_shape() {
        assert_eq!(FieldElement::quadratic((3, 1), (-2, 1), 2).unwrap().render(), "3 - 2*rt(2)");
        assert_eq!(FieldElement::quadratic((0, 1), (1, 2), 2).unwrap().render(), "1/2*rt(2)");
        assert_eq!(q(-3, 4).render(), "-3/4");
        assert_eq!(ExtReal::PlusInfinity.to_string(), "+inf");
    }

    #[test]
    fn ext_real_order() {
        let a = ExtReal::Finite(q(1, 2));
        assert!(ExtReal::MinusInfinity < a);
        assert!(a < ExtReal::PlusInfinity);
        assert!(ExtReal::Finite(rt2()) > ExtReal::Finite(FieldElement::one()));
    }
}
