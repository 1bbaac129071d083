//! Floating-point falsifier used to cross-check the exact deciders.
//!
//! Steps are `h = c/n` for a spread of scales `c` and indices `n` up to a
//! budget. Membership and branch choice are exact; only function values
//! are converted to floats. A family's persistent gap is extrapolated
//! from its last three decades of indices, which filters the transient
//! part of a gap that decays like a power of `1/n`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::checker::{Certificate, Holds, Property, Verdict};
use crate::field::FieldElement;
use crate::func::PiecewiseFn;
use crate::sets::{GuardAtom, SetAtom, Side, StructuredSet};

/// Gaps at or below this are treated as numerical zero.
pub const REFUTATION_THRESHOLD: f64 = 1e-6;

const SCALE_SEED: u64 = 0x5eed_cafe;

/// Indices `1..=100` followed by a geometric grid up to `budget`.
pub fn index_grid(budget: u64) -> Vec<u64> {
    let mut out: Vec<u64> = (1..=budget.min(100)).collect();
    let mut x = 100.0f64;
    let step = libm::pow(10.0, 1.0 / 50.0);
    while (x as u64) < budget {
        x *= step;
        let n = (libm::round(x) as u64).min(budget);
        if out.last().is_none_or(|l| *l < n) {
            out.push(n);
        }
    }
    // Decade statistics need exact powers of ten.
    let mut p = 1000u64;
    while p <= budget {
        out.push(p);
        p *= 10;
    }
    out.sort_unstable();
    out.dedup();
    out
}

fn decade(n: u64, budget: u64) -> u32 {
    let cap = libm::floor(libm::log10((budget.max(2) - 1) as f64)) as u32;
    (libm::floor(libm::log10(n as f64)) as u32).min(cap)
}

/// Limit estimate from three decade statistics: the smaller of the Aitken
/// and the two-level Richardson extrapolations.
fn extrapolate(g: &[f64]) -> f64 {
    let Some(&last) = g.last() else { return 0.0 };
    if g.len() < 3 || !last.is_finite() {
        return libm::fmax(last, 0.0);
    }
    let (g1, g2, g3) = (g[g.len() - 3], g[g.len() - 2], g[g.len() - 1]);
    let (d1, d2) = (g1 - g2, g2 - g3);
    let aitken = if d1 > 0.0 && d2 >= 0.0 && d2 < d1 {
        let r = d2 / d1;
        g3 - d2 * r / (1.0 - r)
    } else {
        g3
    };
    // Richardson elimination of 1/n and 1/n^2 terms across decades. Aitken
    // alone is exact only for a single geometric rate.
    let (r1, r2) = ((10.0 * g2 - g1) / 9.0, (10.0 * g3 - g2) / 9.0);
    let richardson = (100.0 * r2 - r1) / 99.0;
    libm::fmax(libm::fmin(aitken, libm::fmax(richardson, 0.0)), 0.0)
}

/// One sequence family `h_n = scale/n` (on one side for weak continuity).
#[derive(Clone, Debug, PartialEq)]
pub struct FamilyGap {
    pub scale: FieldElement,
    pub side: Option<Side>,
    pub samples: usize,
    /// Admissible indices in the last decade.
    pub tail_samples: usize,
    /// Extrapolated gap along the worst admissible subsequence.
    pub upper: f64,
    /// Extrapolated gap along the best admissible subsequence.
    pub lower: f64,
}

impl FamilyGap {
    pub fn admissible(&self) -> bool {
        self.tail_samples > 0
    }
}

/// A replayable numeric refutation: the family and the gap it keeps.
#[derive(Clone, Debug, PartialEq)]
pub struct Refutation {
    pub scale: FieldElement,
    pub side: Option<Side>,
    pub gap: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProbeReport {
    pub property: Property,
    pub point: FieldElement,
    pub budget: u64,
    pub samples_used: usize,
    pub families: Vec<FamilyGap>,
    /// SC: largest gap over families. WSC: smallest over admissible
    /// families. WC: per side the smallest, then the larger side.
    pub gap: f64,
    pub refutation: Option<Refutation>,
}

impl ProbeReport {
    pub fn admissible(&self) -> bool {
        self.families.iter().any(FamilyGap::admissible)
    }
}

fn push_unique(out: &mut Vec<FieldElement>, c: FieldElement) {
    let c = c.abs();
    if !c.is_zero() && !out.contains(&c) {
        out.push(c);
    }
}

fn collect_gen_scales(s: &StructuredSet, out: &mut Vec<FieldElement>) {
    for a in s.atoms() {
        if let SetAtom::Gen(g) = a {
            push_unique(out, g.scale().clone());
        }
    }
}

/// Scales probed by default: generator scales of the function, a few
/// fixed rational and irrational scales, and seeded random ones.
pub fn default_scales(f: &PiecewiseFn) -> Vec<FieldElement> {
    let mut out = Vec::new();
    collect_gen_scales(f.domain(), &mut out);
    for b in f.branches() {
        for atom in b.region.atoms() {
            if let GuardAtom::In(s) | GuardAtom::NotIn(s) = atom {
                collect_gen_scales(s, &mut out);
            }
        }
    }
    let d = f.radicand();
    let rt = FieldElement::sqrt_radicand(d).unwrap_or_else(|_| FieldElement::one());
    push_unique(&mut out, FieldElement::one());
    push_unique(&mut out, rt.clone());
    push_unique(&mut out, &FieldElement::one() + &rt);
    push_unique(&mut out, &FieldElement::from_int(2) + &rt);
    push_unique(&mut out, FieldElement::from_ratio(3, 2));
    let mut rng = ChaCha8Rng::seed_from_u64(SCALE_SEED);
    for _ in 0..4 {
        let p = rng.gen_range(1..=9);
        let q = rng.gen_range(1..=7);
        let r = rng.gen_range(0..=5);
        push_unique(&mut out, &FieldElement::from_ratio(p, q) + &(&FieldElement::from_ratio(r, q) * &rt));
    }
    out
}

struct Series {
    decades: Vec<(u32, f64, f64)>,
    samples: usize,
    tail: usize,
}

impl Series {
    fn new() -> Self {
        Self { decades: Vec::new(), samples: 0, tail: 0 }
    }

    fn push(&mut self, dec: u32, gap: f64, last: u32) {
        self.samples += 1;
        if dec == last {
            self.tail += 1;
        }
        match self.decades.last_mut() {
            Some((d, hi, lo)) if *d == dec => {
                *hi = libm::fmax(*hi, gap);
                *lo = libm::fmin(*lo, gap);
            }
            _ => self.decades.push((dec, gap, gap)),
        }
    }

    fn finish(self, scale: FieldElement, side: Option<Side>) -> FamilyGap {
        let hi: Vec<f64> = self.decades.iter().map(|d| d.1).collect();
        let lo: Vec<f64> = self.decades.iter().map(|d| d.2).collect();
        FamilyGap { scale, side, samples: self.samples, tail_samples: self.tail, upper: extrapolate(&hi), lower: extrapolate(&lo) }
    }
}

fn symmetric_family(f: &PiecewiseFn, a: &FieldElement, scale: &FieldElement, grid: &[u64], budget: u64) -> FamilyGap {
    let last = decade(budget, budget);
    let mut s = Series::new();
    for &n in grid {
        let h = scale / &FieldElement::from_int(n as i64);
        let (up, down) = (a + &h, a - &h);
        if !f.domain().contains(&up) || !f.domain().contains(&down) {
            continue;
        }
        let (Ok(u), Ok(d)) = (f.evaluate_f64(&up), f.evaluate_f64(&down)) else { continue };
        s.push(decade(n, budget), libm::fabs(u - d), last);
    }
    s.finish(scale.clone(), None)
}

fn side_family(f: &PiecewiseFn, a: &FieldElement, fa: f64, side: Side, scale: &FieldElement, grid: &[u64], budget: u64) -> FamilyGap {
    let last = decade(budget, budget);
    let mut s = Series::new();
    for &n in grid {
        let x = side.step(a, &(scale / &FieldElement::from_int(n as i64)));
        if !f.domain().contains(&x) {
            continue;
        }
        let Ok(v) = f.evaluate_f64(&x) else { continue };
        s.push(decade(n, budget), libm::fabs(v - fa), last);
    }
    s.finish(scale.clone(), Some(side))
}

pub fn probe(f: &PiecewiseFn, a: &FieldElement, property: Property, budget: u64) -> ProbeReport {
    probe_with_scales(f, a, property, budget, &[])
}

/// [`probe`] with extra scales added to the defaults.
pub fn probe_with_scales(f: &PiecewiseFn, a: &FieldElement, property: Property, budget: u64, extra: &[FieldElement]) -> ProbeReport {
    let budget = budget.max(10);
    let grid = index_grid(budget);
    let mut scales = default_scales(f);
    for c in extra {
        push_unique(&mut scales, c.clone());
    }
    let mut families = Vec::new();
    let (gap, refutation) = match property {
        Property::Sc | Property::Wsc => {
            for c in &scales {
                families.push(symmetric_family(f, a, c, &grid, budget));
            }
            let admissible: Vec<&FamilyGap> = families.iter().filter(|g| g.admissible()).collect();
            if property == Property::Sc {
                let best = admissible.iter().max_by(|x, y| x.upper.total_cmp(&y.upper));
                let gap = best.map_or(0.0, |g| g.upper);
                (gap, best.filter(|_| gap > REFUTATION_THRESHOLD).map(|g| Refutation { scale: g.scale.clone(), side: None, gap }))
            } else {
                let best = admissible.iter().min_by(|x, y| x.lower.total_cmp(&y.lower));
                let gap = best.map_or(0.0, |g| g.lower);
                (gap, best.filter(|_| gap > REFUTATION_THRESHOLD).map(|g| Refutation { scale: g.scale.clone(), side: None, gap }))
            }
        }
        Property::Wc => {
            let fa = if f.domain().contains(a) { f.evaluate_f64(a).unwrap_or(f64::NAN) } else { f64::NAN };
            let mut worst: Option<Refutation> = None;
            for side in [Side::Left, Side::Right] {
                let start = families.len();
                for c in &scales {
                    families.push(side_family(f, a, fa, side, c, &grid, budget));
                }
                let best = families[start..].iter().filter(|g| g.admissible()).min_by(|x, y| x.lower.total_cmp(&y.lower));
                if let Some(g) = best {
                    if worst.as_ref().is_none_or(|w| g.lower > w.gap) {
                        worst = Some(Refutation { scale: g.scale.clone(), side: Some(side), gap: g.lower });
                    }
                }
            }
            let gap = worst.as_ref().map_or(0.0, |w| w.gap);
            (gap, worst.filter(|w| w.gap > REFUTATION_THRESHOLD))
        }
    };
    let samples_used = families.iter().map(|g| g.samples).sum();
    ProbeReport { property, point: a.clone(), budget, samples_used, families, gap, refutation }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CrossCheck {
    pub consistent: bool,
    pub numeric_gap: f64,
    pub detail: String,
}

fn certificate_scales(v: &Verdict) -> Vec<FieldElement> {
    match &v.certificate {
        Certificate::Witness { sequence: Some(s), .. } => alloc::vec![s.scale.clone()],
        Certificate::Sides { sides, .. } => sides.iter().filter_map(|s| s.sequence.as_ref().map(|q| q.scale.clone())).collect(),
        Certificate::PatternTable(rows) => rows.iter().flat_map(|r| r.pair.hset.classes().iter().map(|c| c.base().clone())).collect(),
        _ => Vec::new(),
    }
}

/// Check a verdict against the numeric falsifier: positive verdicts must
/// not be refuted, negative ones must be matched by a numeric gap of at
/// least half the exact one, vacuous ones must see no admissible step.
pub fn cross_validate(f: &PiecewiseFn, v: &Verdict, budget: u64) -> CrossCheck {
    if v.holds == Holds::Unknown {
        return CrossCheck { consistent: true, numeric_gap: f64::NAN, detail: "unknown verdict".into() };
    }
    let report = probe_with_scales(f, &v.point, v.property, budget, &certificate_scales(v));
    if v.is_vacuous() {
        let ok = !report.admissible();
        return CrossCheck { consistent: ok, numeric_gap: report.gap, detail: format!("admissible steps found: {}", report.admissible()) };
    }
    match v.holds {
        Holds::True => {
            let ok = report.refutation.is_none();
            CrossCheck { consistent: ok, numeric_gap: report.gap, detail: format!("numeric gap {:e}", report.gap) }
        }
        _ => {
            let exact = v.exact_gap().and_then(|g| g.to_f64()).unwrap_or(f64::NAN);
            let need = if exact.is_finite() { exact / 2.0 } else { 1.0 };
            let ok = report.gap >= need && report.refutation.is_some();
            CrossCheck { consistent: ok, numeric_gap: report.gap, detail: format!("numeric gap {} vs exact {}", report.gap, exact) }
        }
    }
}

/// Sampling check of a declared uniform-continuity claim: the sampled
/// modulus of continuity must shrink with the step and end small.
pub fn validate_declared_uc(g: &PiecewiseFn, budget: u64) -> bool {
    let n = budget.clamp(64, 4096) as i64;
    let grid: Vec<FieldElement> = (-n..=n).map(|k| FieldElement::from_ratio(8 * k, n)).filter(|x| g.domain().contains(x)).collect();
    let mut prev = f64::INFINITY;
    for shift in [2i64, 8, 32, 128, 512] {
        let d = FieldElement::from_ratio(1, shift);
        let mut omega: f64 = 0.0;
        for x in &grid {
            let y = x + &d;
            if !g.domain().contains(&y) {
                continue;
            }
            if let (Ok(u), Ok(v)) = (g.evaluate_f64(x), g.evaluate_f64(&y)) {
                omega = libm::fmax(omega, libm::fabs(u - v));
            }
        }
        if !omega.is_finite() || omega > prev + 1e-12 {
            return false;
        }
        prev = omega;
    }
    prev < 0.1
}

/// Largest sampled `|f(x) − g(x)|` over points in both domains.
pub fn sup_distance(f: &PiecewiseFn, g: &PiecewiseFn, points: &[FieldElement]) -> f64 {
    points
        .iter()
        .filter(|x| f.domain().contains(x) && g.domain().contains(x))
        .filter_map(|x| Some(libm::fabs(f.evaluate_f64(x).ok()? - g.evaluate_f64(x).ok()?)))
        .fold(0.0, libm::fmax)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::checker::{check, check_sym_cont};
    use crate::func::{Branch, Expr};
    use crate::sets::{CmpOp, IndexRange, Region};

    fn fe(n: i64) -> FieldElement {
        FieldElement::from_int(n)
    }

    fn jumps() -> PiecewiseFn {
        let a = StructuredSet::gen(fe(1), IndexRange::All).unwrap().union(StructuredSet::points(vec![fe(0)]));
        PiecewiseFn::new(
            StructuredSet::line(),
            vec![
                Branch::new(Region::new(vec![GuardAtom::In(a)]), Expr::int(0)),
                Branch::new(Region::new(vec![GuardAtom::cmp_x(CmpOp::Gt, fe(0))]), Expr::int(1)),
                Branch::otherwise(Expr::int(-1)),
            ],
        )
        .unwrap()
    }

    #[test]
    fn grid_shape() {
        let g = index_grid(10_000);
        assert_eq!(g[..3], [1, 2, 3]);
        assert_eq!(*g.last().unwrap(), 10_000);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
        assert!(g.len() < 400);
    }

    #[test]
    fn extrapolation_removes_power_decay() {
        assert!(extrapolate(&[2.0 + 1e-1, 2.0 + 1e-2, 2.0 + 1e-3]) - 2.0 < 1e-9);
        assert!(extrapolate(&[1e-1, 1e-2, 1e-3]) < 1e-9);
        assert!(extrapolate(&[0.3, 0.1, 0.03]) < 1e-2);
        let mixed: Vec<f64> = [100.0, 1000.0, 10_000.0].iter().map(|n: &f64| 3.0 / n + 9.0 / (n * n)).collect();
        assert!(extrapolate(&mixed) < 1e-9);
        assert!((extrapolate(&[1.0 + 0.1f64.sqrt(), 1.0 + 0.01f64.sqrt(), 1.0 + 0.001f64.sqrt()]) - 1.0).abs() < 1e-3);
    }

    #[test]
    fn oracle_refutes_symmetric_continuity() {
        let r = probe(&jumps(), &fe(0), Property::Sc, 10_000);
        assert!((r.gap - 2.0).abs() < 1e-3);
        assert!(r.refutation.is_some());
    }

    #[test]
    fn constant_has_no_gap() {
        let f = PiecewiseFn::constant(StructuredSet::line(), fe(3));
        for p in Property::ALL {
            let r = probe(&f, &fe(1), p, 10_000);
            assert!(r.refutation.is_none());
            assert!(r.gap < 1e-12);
        }
    }

    #[test]
    fn smooth_function_is_not_refuted() {
        let f = PiecewiseFn::new(StructuredSet::line(), vec![Branch::otherwise(Expr::add(Expr::Var, Expr::sqrt(Expr::abs(Expr::Var))))]).unwrap();
        let r = probe(&f, &fe(0), Property::Sc, 10_000);
        assert!(r.refutation.is_none(), "gap {}", r.gap);
    }

    #[test]
    fn cross_validation_flags_corruption() {
        let f = jumps();
        let v = check_sym_cont(&f, &fe(0)).unwrap();
        assert!(cross_validate(&f, &v, 10_000).consistent);
        let mut flipped = v.clone();
        flipped.holds = Holds::True;
        assert!(!cross_validate(&f, &flipped, 10_000).consistent);
        for p in Property::ALL {
            let v = check(&f, &fe(0), p).unwrap();
            assert!(cross_validate(&f, &v, 10_000).consistent, "{p}");
        }
    }

    #[test]
    fn declared_uniform_continuity() {
        let lip = PiecewiseFn::new(StructuredSet::line(), vec![Branch::otherwise(Expr::abs(Expr::Var))]).unwrap();
        assert!(validate_declared_uc(&lip, 1000));
        assert!(!validate_declared_uc(&jumps(), 1000));
    }
}
