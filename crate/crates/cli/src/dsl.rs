//! Parser for `.cont` programs.
//!
//! The grammar is documented in the README. Every error carries the line
//! and column of the offending token.

use std::collections::BTreeMap;
use std::fmt;

use symcont_core::checker::Property;
use symcont_core::field::squarefree_split;
use symcont_core::func::{eval_expr, Exponent, FnError};
use symcont_core::sets::{Bound, CmpOp, GenSet, IndexRange, Interval, SetAtom};
use symcont_core::{combine, Branch, Combinator, Expr, FieldElement, FnFamily, PiecewiseFn, Region, StructuredSet};
use symcont_core::sets::GuardAtom;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{line}:{col}: {msg}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckDirective {
    pub function: String,
    pub properties: Vec<Property>,
    pub point: FieldElement,
    pub line: usize,
}

/// `uniform fk -> f at a bound <expr in k> upto K`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniformDirective {
    pub family: String,
    pub limit: String,
    pub point: FieldElement,
    pub bound: Expr,
    pub upto: u32,
    pub line: usize,
}

impl UniformDirective {
    /// Declared error bound for each `k` in `1..=upto`.
    pub fn bounds(&self) -> Result<Vec<FieldElement>, String> {
        (1..=self.upto).map(|k| eval_expr(&self.bound.instantiate(k), &FieldElement::zero()).map_err(|e| format!("bound at k={k}: {e}"))).collect()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Program {
    /// `1` when the program uses only rationals.
    pub radicand: u32,
    pub sets: BTreeMap<String, StructuredSet>,
    /// In declaration order.
    pub functions: Vec<(String, PiecewiseFn)>,
    pub families: Vec<(String, FnFamily)>,
    pub checks: Vec<CheckDirective>,
    pub uniform: Vec<UniformDirective>,
}

impl Program {
    pub fn function(&self, name: &str) -> Option<&PiecewiseFn> {
        self.functions.iter().find(|(n, _)| n == name).map(|(_, f)| f)
    }

    pub fn family(&self, name: &str) -> Option<&FnFamily> {
        self.families.iter().find(|(n, _)| n == name).map(|(_, f)| f)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Int(i64),
    Ident(String),
    Sym(&'static str),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Int(n) => write!(f, "`{n}`"),
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Sym(s) => write!(f, "`{s}`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

const SYMBOLS: [&str; 22] = ["->", "<=", ">=", "==", "!=", "(", ")", "[", "]", "{", "}", ",", "=", "+", "-", "*", "/", "^", "&", "<", ">", ";"];

fn lex(text: &str) -> Result<Vec<(Tok, usize, usize)>, ParseError> {
    let mut out = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("");
        let chars: Vec<char> = line.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let col = i + 1;
            if c.is_whitespace() {
                i += 1;
            } else if c.is_ascii_digit() {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                let n = s.parse::<i64>().map_err(|_| ParseError { line: ln + 1, col, msg: format!("integer literal `{s}` is too large") })?;
                out.push((Tok::Int(n), ln + 1, col));
            } else if c.is_alphabetic() || c == '_' {
                let start = i;
                while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                out.push((Tok::Ident(chars[start..i].iter().collect()), ln + 1, col));
            } else {
                let rest: String = chars[i..].iter().take(2).collect();
                let sym = SYMBOLS.iter().find(|s| rest.starts_with(**s)).ok_or_else(|| ParseError { line: ln + 1, col, msg: format!("unexpected character `{c}`") })?;
                out.push((Tok::Sym(sym), ln + 1, col));
                i += sym.len();
            }
        }
    }
    let last = text.lines().count().max(1);
    out.push((Tok::Eof, last, 1));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize, usize)>,
    pos: usize,
    radicand: Option<u32>,
    /// Accept `k` as the family index inside expressions.
    in_family: bool,
    prog: Program,
}

type PResult<T> = Result<T, ParseError>;

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].0
    }

    fn here(&self) -> (usize, usize) {
        let (_, l, c) = &self.toks[self.pos];
        (*l, *c)
    }

    fn err<T>(&self, msg: impl Into<String>) -> PResult<T> {
        let (line, col) = self.here();
        Err(ParseError { line, col, msg: msg.into() })
    }

    fn next(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(x) if *x == s)
    }

    fn is_kw(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Ident(x) if x == s)
    }

    fn eat_sym(&mut self, s: &str) -> bool {
        if self.is_sym(s) {
            self.next();
            true
        } else {
            false
        }
    }

    fn expect_sym(&mut self, s: &str) -> PResult<()> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            self.err(format!("expected `{s}`, found {}", self.peek()))
        }
    }

    fn expect_kw(&mut self, s: &str) -> PResult<()> {
        if self.is_kw(s) {
            self.next();
            Ok(())
        } else {
            self.err(format!("expected `{s}`, found {}", self.peek()))
        }
    }

    fn ident(&mut self) -> PResult<String> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.next();
                Ok(s)
            }
            t => self.err(format!("expected a name, found {t}")),
        }
    }

    fn int(&mut self) -> PResult<i64> {
        match self.peek().clone() {
            Tok::Int(n) => {
                self.next();
                Ok(n)
            }
            t => self.err(format!("expected an integer, found {t}")),
        }
    }

    fn program(&mut self) -> PResult<()> {
        loop {
            while self.eat_sym(";") {}
            match self.peek().clone() {
                Tok::Eof => return Ok(()),
                Tok::Ident(k) => match k.as_str() {
                    "radicand" => self.radicand_decl()?,
                    "set" => self.set_decl()?,
                    "fn" => self.fn_decl()?,
                    "family" => self.family_decl()?,
                    "check" => self.check_decl()?,
                    "uniform" => self.uniform_decl()?,
                    _ => return self.err(format!("expected a declaration, found `{k}`")),
                },
                t => return self.err(format!("expected a declaration, found {t}")),
            }
        }
    }

    fn set_radicand(&mut self, d: u32) -> PResult<()> {
        self.set_radicand_at(d, self.here())
    }

    fn set_radicand_at(&mut self, d: u32, (line, col): (usize, usize)) -> PResult<()> {
        match self.radicand {
            Some(r) if r != d => Err(ParseError { line, col, msg: format!("mixed radicands: rt({d}) in a program over rt({r})") }),
            _ => {
                self.radicand = Some(d);
                Ok(())
            }
        }
    }

    fn radicand_decl(&mut self) -> PResult<()> {
        self.next();
        let n = self.int()?;
        let Ok(n) = u32::try_from(n) else {
            return self.err("radicand out of range");
        };
        if n == 1 {
            return Ok(());
        }
        let (_, d) = squarefree_split(n);
        if d < 2 {
            return self.err(format!("radicand {n} is a perfect square"));
        }
        self.set_radicand(d)
    }

    fn set_decl(&mut self) -> PResult<()> {
        self.next();
        let name = self.ident()?;
        self.expect_sym("=")?;
        let s = self.set_expr()?;
        self.prog.sets.insert(name, s);
        Ok(())
    }

    fn set_expr(&mut self) -> PResult<StructuredSet> {
        let mut s = self.set_atom()?;
        while self.is_kw("union") {
            self.next();
            s = s.union(self.set_atom()?);
        }
        Ok(s)
    }

    fn set_atom(&mut self) -> PResult<StructuredSet> {
        let name = self.ident()?;
        let range = match name.as_str() {
            "line" => return Ok(StructuredSet::line()),
            "seq" => Some(IndexRange::All),
            "seqpos" => Some(IndexRange::Positive),
            "seqneg" => Some(IndexRange::Negative),
            _ => None,
        };
        if let Some(range) = range {
            self.expect_sym("(")?;
            let c = self.constant()?;
            self.expect_sym(")")?;
            let g = GenSet::new(c, range).or_else(|e| self.err(format!("{e}")))?;
            return Ok(StructuredSet::new(vec![SetAtom::Gen(g)]));
        }
        match name.as_str() {
            "points" => {
                self.expect_sym("(")?;
                let mut ps = Vec::new();
                if !self.is_sym(")") {
                    ps.push(self.constant()?);
                    while self.eat_sym(",") {
                        ps.push(self.constant()?);
                    }
                }
                self.expect_sym(")")?;
                ps.sort();
                ps.dedup();
                Ok(StructuredSet::points(ps))
            }
            "interval" => {
                let lo_closed = if self.eat_sym("[") {
                    true
                } else {
                    self.expect_sym("(")?;
                    false
                };
                let lo = self.bound(lo_closed, "-")?;
                self.expect_sym(",")?;
                let hi_pending = self.bound_value("")?;
                let hi_closed = if self.eat_sym("]") {
                    true
                } else {
                    self.expect_sym(")")?;
                    false
                };
                let hi = match hi_pending {
                    None => Bound::Unbounded,
                    Some(v) if hi_closed => Bound::Closed(v),
                    Some(v) => Bound::Open(v),
                };
                if let (Some(l), Some(h)) = (lo.value(), hi.value()) {
                    if l > h {
                        return self.err("interval bounds are reversed");
                    }
                }
                Ok(StructuredSet::interval(Interval { lo, hi }))
            }
            other => match self.prog.sets.get(other) {
                Some(s) => Ok(s.clone()),
                None => self.err(format!("unknown set `{other}`")),
            },
        }
    }

    fn bound(&mut self, closed: bool, inf_sign: &str) -> PResult<Bound> {
        Ok(match self.bound_value(inf_sign)? {
            None => Bound::Unbounded,
            Some(v) if closed => Bound::Closed(v),
            Some(v) => Bound::Open(v),
        })
    }

    /// A constant, or `inf` / `-inf` for an unbounded end.
    fn bound_value(&mut self, _inf_sign: &str) -> PResult<Option<FieldElement>> {
        if self.is_kw("inf") || (self.is_sym("-") && matches!(self.peek_at(1), Tok::Ident(s) if s == "inf")) {
            self.eat_sym("-");
            self.next();
            return Ok(None);
        }
        self.constant().map(Some)
    }

    /// An `x`-free expression folded to a field element.
    fn constant(&mut self) -> PResult<FieldElement> {
        let (line, col) = self.here();
        let e = self.expr()?;
        match fold(&e) {
            Some(v) => Ok(v),
            None => Err(ParseError { line, col, msg: format!("`{e}` is not a constant of the field") }),
        }
    }

    fn fn_decl(&mut self) -> PResult<()> {
        let (line, col) = self.here();
        self.next();
        let name = self.ident()?;
        if self.prog.function(&name).is_some() {
            return self.err(format!("function `{name}` is already defined"));
        }
        let f = if self.is_kw("on") {
            self.next();
            let domain = self.set_expr()?;
            self.expect_sym("=")?;
            let branches = self.piecewise()?;
            PiecewiseFn::new(domain, branches).map_err(|e| ParseError { line, col, msg: format!("function `{name}`: {e}") })?
        } else {
            self.expect_sym("=")?;
            self.combinator()?
        };
        self.prog.functions.push((name, f));
        Ok(())
    }

    fn fn_ref(&mut self) -> PResult<PiecewiseFn> {
        let (line, col) = self.here();
        let n = self.ident()?;
        self.prog.function(&n).cloned().ok_or(ParseError { line, col, msg: format!("unknown function `{n}`") })
    }

    fn combinator(&mut self) -> PResult<PiecewiseFn> {
        let (line, col) = self.here();
        let op = self.ident()?;
        self.expect_sym("(")?;
        let at = |e: FnError| ParseError { line, col, msg: format!("{op}: {e}") };
        let res = match op.as_str() {
            "abs" | "recip" | "sqrt" => {
                let f = self.fn_ref()?;
                let c = match op.as_str() {
                    "abs" => Combinator::Abs,
                    "recip" => Combinator::Recip,
                    _ => Combinator::Sqrt,
                };
                combine(&c, &f, None)
            }
            "scale" => {
                let c = self.constant()?;
                self.expect_sym(",")?;
                let f = self.fn_ref()?;
                combine(&Combinator::Scale(c), &f, None)
            }
            "add" | "sub" | "max" | "min" | "mul" | "quotient" => {
                let f = self.fn_ref()?;
                self.expect_sym(",")?;
                let g = self.fn_ref()?;
                let c = match op.as_str() {
                    "add" => Combinator::Add,
                    "sub" => Combinator::Sub,
                    "max" => Combinator::Max,
                    "min" => Combinator::Min,
                    "mul" => Combinator::Mul,
                    _ => Combinator::Quotient,
                };
                combine(&c, &f, Some(&g))
            }
            "compose" => {
                // compose(g, f) is g ∘ f
                let g = self.fn_ref()?;
                self.expect_sym(",")?;
                let f = self.fn_ref()?;
                combine(&Combinator::Compose, &f, Some(&g))
            }
            _ => return Err(ParseError { line, col, msg: format!("unknown combinator `{op}`") }),
        };
        self.expect_sym(")")?;
        res.map_err(at)
    }

    fn piecewise(&mut self) -> PResult<Vec<Branch>> {
        self.expect_kw("piecewise")?;
        self.expect_sym("{")?;
        let mut out = Vec::new();
        let mut seen_else = false;
        while !self.is_sym("}") {
            if seen_else {
                return self.err("no branch may follow `else`");
            }
            let region = if self.is_kw("else") {
                self.next();
                seen_else = true;
                Region::always()
            } else {
                self.guard()?
            };
            self.expect_sym("->")?;
            let e = self.expr()?;
            out.push(Branch::new(region, e));
            if !self.eat_sym(",") {
                break;
            }
        }
        self.expect_sym("}")?;
        if out.is_empty() {
            return self.err("piecewise body has no branches");
        }
        Ok(out)
    }

    fn guard(&mut self) -> PResult<Region> {
        let mut atoms = vec![self.guard_atom()?];
        while self.eat_sym("&") || (self.is_kw("and") && {
            self.next();
            true
        }) {
            atoms.push(self.guard_atom()?);
        }
        Ok(Region::new(atoms))
    }

    fn guard_atom(&mut self) -> PResult<GuardAtom> {
        if self.is_kw("x") {
            if let Tok::Ident(k) = self.peek_at(1).clone() {
                if k == "in" || k == "notin" {
                    self.next();
                    self.next();
                    let s = self.set_expr()?;
                    return Ok(if k == "in" { GuardAtom::In(s) } else { GuardAtom::NotIn(s) });
                }
            }
        }
        let (line, col) = self.here();
        let lhs = self.expr()?;
        if !mentions_x(&lhs) {
            return Err(ParseError { line, col, msg: "the left side of a comparison must depend on x".into() });
        }
        let op = match self.next() {
            Tok::Sym("<") => CmpOp::Lt,
            Tok::Sym("<=") => CmpOp::Le,
            Tok::Sym(">") => CmpOp::Gt,
            Tok::Sym(">=") => CmpOp::Ge,
            Tok::Sym("=") | Tok::Sym("==") => CmpOp::Eq,
            Tok::Sym("!=") => CmpOp::Ne,
            t => return Err(ParseError { line, col, msg: format!("expected a comparison, found {t}") }),
        };
        let rhs = self.constant()?;
        Ok(GuardAtom::Cmp { lhs, op, rhs })
    }

    fn expr(&mut self) -> PResult<Expr> {
        let mut e = self.term()?;
        loop {
            if self.eat_sym("+") {
                let r = self.term()?;
                e = self.bin(Expr::add(e, r))?;
            } else if self.eat_sym("-") {
                let r = self.term()?;
                e = self.bin(Expr::sub(e, r))?;
            } else {
                return Ok(e);
            }
        }
    }

    fn term(&mut self) -> PResult<Expr> {
        let mut e = self.unary()?;
        loop {
            if self.eat_sym("*") {
                let r = self.unary()?;
                e = self.bin(Expr::mul(e, r))?;
            } else if self.eat_sym("/") {
                let r = self.unary()?;
                e = self.bin(Expr::div(e, r))?;
            } else {
                return Ok(e);
            }
        }
    }

    /// Fold literal arithmetic so `3/2*rt(2)` becomes one constant.
    fn bin(&self, e: Expr) -> PResult<Expr> {
        let both = match &e {
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => matches!((&**a, &**b), (Expr::Const(_), Expr::Const(_))),
            Expr::Neg(a) => matches!(&**a, Expr::Const(_)),
            _ => false,
        };
        if !both {
            return Ok(e);
        }
        match eval_expr(&e, &FieldElement::zero()) {
            Ok(v) => Ok(Expr::Const(v)),
            Err(err) => self.err(format!("`{e}`: {err}")),
        }
    }

    fn unary(&mut self) -> PResult<Expr> {
        if self.eat_sym("-") {
            let a = self.unary()?;
            return self.bin(Expr::neg(a));
        }
        if self.eat_sym("+") {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> PResult<Expr> {
        let base = self.primary()?;
        if !self.eat_sym("^") {
            return Ok(base);
        }
        if self.in_family && self.is_kw("k") {
            self.next();
            return Ok(Expr::Pow(Box::new(base), Exponent::Param));
        }
        let n = self.int()?;
        let k = u32::try_from(n).or_else(|_| self.err("exponent out of range"))?;
        let e = Expr::pow(base, k);
        if let Expr::Pow(b, _) = &e {
            if let Expr::Const(_) = **b {
                return Ok(Expr::Const(eval_expr(&e, &FieldElement::zero()).or_else(|err| self.err(format!("{err}")))?));
            }
        }
        Ok(e)
    }

    fn primary(&mut self) -> PResult<Expr> {
        match self.peek().clone() {
            Tok::Int(n) => {
                self.next();
                Ok(Expr::int(n))
            }
            Tok::Sym("(") => {
                self.next();
                let e = self.expr()?;
                self.expect_sym(")")?;
                Ok(e)
            }
            Tok::Ident(s) => match s.as_str() {
                "x" => {
                    self.next();
                    Ok(Expr::Var)
                }
                "k" if self.in_family => {
                    self.next();
                    Ok(Expr::Param)
                }
                "rt" => {
                    let at = self.here();
                    self.next();
                    if self.eat_sym("(") {
                        let n = self.int()?;
                        self.expect_sym(")")?;
                        let n = u32::try_from(n).or_else(|_| self.err("rt argument out of range"))?;
                        let (c, d) = squarefree_split(n);
                        if d < 2 {
                            return Ok(Expr::int(c as i64));
                        }
                        self.set_radicand_at(d, at)?;
                        let r = FieldElement::sqrt_radicand(d).or_else(|e| self.err(format!("{e}")))?;
                        Ok(Expr::Const(&r * &FieldElement::from_int(c as i64)))
                    } else {
                        match self.radicand {
                            Some(d) => Ok(Expr::Const(FieldElement::sqrt_radicand(d).or_else(|e| self.err(format!("{e}")))?)),
                            None => self.err("bare `rt` needs a `radicand` declaration or an earlier rt(n)"),
                        }
                    }
                }
                "abs" | "sqrt" => {
                    self.next();
                    self.expect_sym("(")?;
                    let a = self.expr()?;
                    self.expect_sym(")")?;
                    if s == "abs" {
                        self.unary_fold(Expr::abs(a))
                    } else {
                        self.unary_fold(Expr::sqrt(a))
                    }
                }
                _ => self.err(format!("unexpected `{s}` in expression")),
            },
            t => self.err(format!("expected an expression, found {t}")),
        }
    }

    fn unary_fold(&self, e: Expr) -> PResult<Expr> {
        if let Expr::Abs(a) | Expr::Sqrt(a) = &e {
            if let Expr::Const(_) = **a {
                if let Ok(v) = eval_expr(&e, &FieldElement::zero()) {
                    return Ok(Expr::Const(v));
                }
            }
        }
        Ok(e)
    }

    fn family_decl(&mut self) -> PResult<()> {
        let (line, col) = self.here();
        self.next();
        let name = self.ident()?;
        self.expect_sym("(")?;
        let param = self.ident()?;
        if param != "k" {
            return self.err("the family index must be named `k`");
        }
        self.expect_sym(")")?;
        self.expect_kw("on")?;
        let domain = self.set_expr()?;
        self.expect_sym("=")?;
        self.in_family = true;
        let branches = self.piecewise();
        self.in_family = false;
        let fam = FnFamily { param, domain, branches: branches? };
        fam.instantiate(1).map_err(|e| ParseError { line, col, msg: format!("family `{name}`: {e}") })?;
        self.prog.families.push((name, fam));
        Ok(())
    }

    fn check_decl(&mut self) -> PResult<()> {
        let (line, _) = self.here();
        self.next();
        let (fl, fc) = self.here();
        let function = self.ident()?;
        if self.prog.function(&function).is_none() {
            return Err(ParseError { line: fl, col: fc, msg: format!("unknown function `{function}`") });
        }
        let p = self.ident()?;
        let properties = match parse_properties(&p) {
            Some(v) => v,
            None => return self.err(format!("unknown property `{p}`")),
        };
        self.expect_kw("at")?;
        let point = self.constant()?;
        self.prog.checks.push(CheckDirective { function, properties, point, line });
        Ok(())
    }

    fn uniform_decl(&mut self) -> PResult<()> {
        let (line, _) = self.here();
        self.next();
        let family = self.ident()?;
        if self.prog.family(&family).is_none() {
            return self.err(format!("unknown family `{family}`"));
        }
        self.expect_sym("->")?;
        let limit = self.ident()?;
        if self.prog.function(&limit).is_none() {
            return self.err(format!("unknown function `{limit}`"));
        }
        self.expect_kw("at")?;
        let point = self.constant()?;
        self.expect_kw("bound")?;
        self.in_family = true;
        let bound = self.expr();
        self.in_family = false;
        let bound = bound?;
        if mentions_x(&bound) {
            return self.err("the error bound may depend on k only");
        }
        self.expect_kw("upto")?;
        let n = self.int()?;
        let upto = u32::try_from(n).ok().filter(|k| (1..=symcont_core::func::MAX_FAMILY_INDEX).contains(k)).map_or_else(|| self.err("upto must lie in 1..=64"), Ok)?;
        self.prog.uniform.push(UniformDirective { family, limit, point, bound, upto, line });
        Ok(())
    }
}

/// `sc`, `wc`, `wsc` or `all`.
pub fn parse_properties(s: &str) -> Option<Vec<Property>> {
    if s == "all" {
        Some(Property::ALL.to_vec())
    } else {
        Property::parse(s).map(|p| vec![p])
    }
}

fn mentions_x(e: &Expr) -> bool {
    match e {
        Expr::Var => true,
        Expr::Const(_) | Expr::Param => false,
        Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => mentions_x(a) || mentions_x(b),
        Expr::Neg(a) | Expr::Pow(a, _) | Expr::Abs(a) | Expr::Sqrt(a) => mentions_x(a),
    }
}

fn fold(e: &Expr) -> Option<FieldElement> {
    if mentions_x(e) || e.mentions_param() {
        return None;
    }
    eval_expr(e, &FieldElement::zero()).ok()
}

pub fn parse_program(text: &str) -> Result<Program, ParseError> {
    let mut p = Parser { toks: lex(text)?, pos: 0, radicand: None, in_family: false, prog: Program::default() };
    p.program()?;
    p.prog.radicand = p.radicand.unwrap_or(1);
    Ok(p.prog)
}

/// A single constant such as `0`, `-1/2` or `3/2*rt(2)`. A program's
/// radicand, when given, is the only one accepted.
pub fn parse_constant(text: &str, radicand: u32) -> Result<FieldElement, ParseError> {
    let mut p = Parser { toks: lex(text)?, pos: 0, radicand: (radicand > 1).then_some(radicand), in_family: false, prog: Program::default() };
    let v = p.constant()?;
    if p.peek() != &Tok::Eof {
        return p.err(format!("unexpected {} after constant", p.peek()));
    }
    Ok(v)
}
