use polarsc::fixedpoint::*;
use proptest::prelude::*;

fn width() -> impl Strategy<Value = QWidth> {
    (1u8..=8).prop_map(|b| QWidth::new(b).unwrap())
}

fn llr_pair() -> impl Strategy<Value = (QLlr, QLlr)> {
    width().prop_flat_map(|w| {
        let m = w.max_mag();
        ((any::<bool>(), 0..=m), (any::<bool>(), 0..=m))
            .prop_map(move |((an, am), (bn, bm))| (QLlr::new(an, am, w).unwrap(), QLlr::new(bn, bm, w).unwrap()))
    })
}

proptest! {
    #[test]
    fn f2_commutes_and_shrinks((a, b) in llr_pair()) {
        let c = f2(a, b);
        prop_assert_eq!(c, f2(b, a));
        prop_assert!(c.mag() <= a.mag().min(b.mag()));
        prop_assert_eq!(c.is_neg(), a.is_neg() ^ b.is_neg());
    }

    #[test]
    fn g2_branches_are_symmetric_around_b((a, b) in llr_pair()) {
        let max = a.width().max_mag() as i32;
        let (s0, s1) = (g2(a, b, 0).value(), g2(a, b, 1).value());
        if (a.value() + b.value()).abs() <= max && (b.value() - a.value()).abs() <= max {
            prop_assert_eq!(s0 + s1, 2 * b.value());
        }
        prop_assert!(s0.abs() <= max && s1.abs() <= max);
    }

    #[test]
    fn g2_is_saturated_integer_sum((a, b) in llr_pair(), z in 0u8..2) {
        let max = a.width().max_mag() as i32;
        let sa = if z == 1 { -a.value() } else { a.value() };
        prop_assert_eq!(g2(a, b, z).value(), (sa + b.value()).clamp(-max, max));
    }

    #[test]
    fn quantize_error_within_half_step(x in -50.0f64..50.0, step in 0.1f64..2.0, w in width()) {
        let q = quantize(x, w, step);
        let limit = w.max_mag() as f64 * step;
        if x.abs() < limit - step / 2.0 {
            prop_assert!((q.value() as f64 * step - x).abs() <= step / 2.0 + 1e-12);
        } else {
            prop_assert!(q.mag() >= w.max_mag().saturating_sub(1));
        }
        prop_assert_eq!(q.hard(), (x < 0.0) as u8);
    }

    #[test]
    fn quantize_is_monotone(a in -20.0f64..20.0, b in -20.0f64..20.0, w in width()) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(quantize(lo, w, 0.5).value() <= quantize(hi, w, 0.5).value());
    }

    #[test]
    fn requantize_is_monotone_and_sign_preserving((a, b) in llr_pair(), drop in 0u8..8) {
        let w = a.width();
        let to = QWidth::new(w.bits().saturating_sub(drop).max(1)).unwrap();
        let (ra, rb) = (requantize(a, to), requantize(b, to));
        if a.value() <= b.value() {
            prop_assert!(ra.value() <= rb.value());
        }
        prop_assert_eq!(ra.is_neg(), a.is_neg());
        prop_assert_eq!(requantize(a, w), a);
    }

    #[test]
    fn stats_merge_is_associative(xs in prop::collection::vec(-16i32..=15, 1..64), cut1 in 0usize..64, cut2 in 0usize..64) {
        let w = QWidth::new(5).unwrap();
        let vals: Vec<QLlr> = xs.iter().map(|&v| QLlr::from_value(v.clamp(-15, 15), w).unwrap()).collect();
        let (i, j) = { let mut c = [cut1 % (vals.len() + 1), cut2 % (vals.len() + 1)]; c.sort(); (c[0], c[1]) };
        let key = EdgeKey::new(0, 4, polarsc::construct::Side::F);
        let part = |s: &[QLlr]| {
            let mut st = LlrStats::new(8, w);
            st.record_root(s);
            st.record_edge(key, s);
            st.frames = 1;
            st
        };
        let (a, b, c) = (part(&vals[..i]), part(&vals[i..j]), part(&vals[j..]));
        let mut left = a.clone();
        left.merge(&b).unwrap();
        left.merge(&c).unwrap();
        let mut bc = b.clone();
        bc.merge(&c).unwrap();
        let mut right = a.clone();
        right.merge(&bc).unwrap();
        prop_assert_eq!(&left, &right);
        prop_assert_eq!(left.root.total(), vals.len() as u64);
    }
}

#[test]
fn stats_csv_round_trips() {
    let w = QWidth::new(4).unwrap();
    let mut st = LlrStats::new(8, w);
    let v: Vec<QLlr> = (-7..=7).map(|x| QLlr::from_value(x, w).unwrap()).collect();
    st.record_root(&v);
    st.record_edge(EdgeKey::new(4, 4, polarsc::construct::Side::G), &v[3..]);
    st.frames = 3;
    assert_eq!(LlrStats::from_csv(&st.to_csv()).unwrap(), st);
}
