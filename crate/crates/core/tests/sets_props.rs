use proptest::prelude::*;

use symcont_core::sets::{lu_spaces, s_space, Bound, IndexRange, Interval, SetAtom, StructuredSet};
use symcont_core::FieldElement;

fn rt2() -> FieldElement {
    FieldElement::sqrt_radicand(2).unwrap()
}

fn scale() -> impl Strategy<Value = FieldElement> {
    prop_oneof![
        Just(FieldElement::one()),
        Just(rt2()),
        Just(FieldElement::from_ratio(3, 2)),
        Just(&rt2() * &FieldElement::from_int(2)),
        Just(FieldElement::from_ratio(1, 3)),
        Just(&FieldElement::one() + &rt2()),
    ]
}

fn range() -> impl Strategy<Value = IndexRange> {
    prop_oneof![Just(IndexRange::All), Just(IndexRange::Positive), Just(IndexRange::Negative)]
}

fn small() -> impl Strategy<Value = FieldElement> {
    (-8i64..=8, 1i64..=4).prop_map(|(p, q)| FieldElement::from_ratio(p, q))
}

fn bound() -> impl Strategy<Value = Bound> {
    prop_oneof![Just(Bound::Unbounded), small().prop_map(Bound::Closed), small().prop_map(Bound::Open)]
}

fn atom() -> impl Strategy<Value = SetAtom> {
    prop_oneof![
        4 => (scale(), range()).prop_map(|(c, r)| StructuredSet::gen(c, r).unwrap().atoms()[0].clone()),
        1 => proptest::collection::vec(small(), 1..4).prop_map(SetAtom::Points),
        1 => (bound(), bound()).prop_map(|(lo, hi)| SetAtom::Interval(Interval { lo, hi })),
    ]
}

fn domain() -> impl Strategy<Value = StructuredSet> {
    proptest::collection::vec(atom(), 1..4).prop_map(StructuredSet::new)
}

/// Points where the interesting cases live: the origin, generator members,
/// interval endpoints, and plain rationals.
fn point(d: &StructuredSet) -> impl Strategy<Value = FieldElement> {
    let mut special = vec![FieldElement::zero()];
    for a in d.atoms() {
        match a {
            SetAtom::Gen(g) => {
                for n in [1, 2, 3] {
                    special.push(g.scale() / &FieldElement::from_int(n));
                    special.push(-(g.scale() / &FieldElement::from_int(n)));
                }
            }
            SetAtom::Points(ps) => special.extend(ps.iter().cloned()),
            SetAtom::Interval(iv) => special.extend(iv.lo.value().into_iter().chain(iv.hi.value()).cloned()),
        }
    }
    prop_oneof![3 => proptest::sample::select(special), 1 => small()]
}

fn case() -> impl Strategy<Value = (StructuredSet, FieldElement)> {
    domain().prop_flat_map(|d| {
        let p = point(&d);
        (Just(d), p)
    })
}

/// Accumulation computed directly from the atom catalog.
fn accumulates(d: &StructuredSet, a: &FieldElement) -> bool {
    d.atoms().iter().any(|atom| match atom {
        SetAtom::Gen(_) => a.is_zero(),
        SetAtom::Points(_) => false,
        SetAtom::Interval(iv) => {
            !iv.is_degenerate() && iv.lo.value().is_none_or(|lo| lo <= a) && iv.hi.value().is_none_or(|hi| a <= hi)
        }
    })
}

fn scales(d: &StructuredSet) -> Vec<FieldElement> {
    let mut out = vec![FieldElement::one(), FieldElement::from_ratio(1, 7), rt2()];
    out.extend(d.gen_sets().map(|g| g.scale().clone()));
    out
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 1000, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn enumerated_steps_are_admissible((d, a) in case()) {
        let s = s_space(&a, &d).unwrap();
        for h in s.sample(12, 2) {
            prop_assert!(d.contains(&(&a + &h)) && d.contains(&(&a - &h)), "h = {h} from {s} at {a} in {d}");
        }
        let (l, r) = lu_spaces(&a, &d).unwrap();
        for w in [l, r] {
            for h in w.hset.sample(12, 2) {
                prop_assert!(d.contains(&w.side.step(&a, &h)), "{:?} h = {h} at {a} in {d}", w.side);
            }
        }
    }

    #[test]
    fn atom_order_does_not_matter((d, a) in case()) {
        let mut rev = d.atoms().to_vec();
        rev.reverse();
        let r = StructuredSet::new(rev);
        let (x, y) = (s_space(&a, &d).unwrap(), s_space(&a, &r).unwrap());
        prop_assert!(x.same_germ(&y).unwrap(), "{x} vs {y}");
    }

    #[test]
    fn isolated_points_have_empty_spaces((d, a) in case()) {
        let (l, r) = lu_spaces(&a, &d).unwrap();
        if accumulates(&d, &a) {
            prop_assert!(l.is_feasible() || r.is_feasible());
        } else {
            prop_assert!(s_space(&a, &d).unwrap().is_empty());
            prop_assert!(!l.is_feasible() && !r.is_feasible());
        }
    }
}

proptest! {
    // Brute force over ten thousand indices per scale; fewer cases.
    #![proptest_config(ProptestConfig { cases: 48, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn empty_space_at_zero_has_no_small_steps(d in domain()) {
        let zero = FieldElement::zero();
        let s = s_space(&zero, &d).unwrap();
        if s.is_empty() {
            for c in scales(&d) {
                for n in 1..=10_000i64 {
                    let h = &c / &FieldElement::from_int(n);
                    // Germs describe steps below every nonzero landmark; the
                    // generated landmarks are at least 1/4 from the origin.
                    if h >= FieldElement::from_ratio(1, 4) {
                        continue;
                    }
                    prop_assert!(!(d.contains(&h) && d.contains(&-h.clone())), "h = {h} admissible in {d}");
                }
            }
        }
    }
}
