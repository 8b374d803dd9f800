use coordline::prob::{divergences, entropy_bits, is_typical, staircase_map, Axis, Pmf, StaircaseTable};
use coordline::{Error, JointPmf};
use proptest::prelude::*;

fn pmf1(w: &[f64]) -> JointPmf {
    Pmf::new(vec![Axis::new("X", w.len())], w.to_vec()).unwrap()
}

fn dsbs(p: f64) -> JointPmf {
    Pmf::new(vec![Axis::new("X1", 2), Axis::new("X2", 2)], vec![(1.0 - p) / 2.0, p / 2.0, p / 2.0, (1.0 - p) / 2.0]).unwrap()
}

fn h2(p: f64) -> f64 {
    -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
}

#[test]
fn rejects_bad_mass_and_duplicate_labels() {
    assert!(Pmf::new(vec![Axis::new("X", 2)], vec![0.5, 0.6]).is_err());
    assert!(Pmf::new(vec![Axis::new("X", 2)], vec![1.5, -0.5]).is_err());
    assert!(Pmf::new(vec![Axis::new("X", 1), Axis::new("X", 1)], vec![1.0]).is_err());
    let r = Pmf::new_renormalized(vec![Axis::new("X", 2)], vec![1.0, 3.0]).unwrap();
    assert_eq!(r.weights(), &[0.25, 0.75]);
}

#[test]
fn product_extension_examples() {
    let u = pmf1(&[0.5, 0.5]).product_extend(2).unwrap();
    assert_eq!(u.weights(), &[0.25; 4]);
    let p = pmf1(&[0.75, 0.25]);
    assert_eq!(p.product_extend(1).unwrap(), p);
    let e = p.product_extend(2).unwrap();
    for (a, b) in e.weights().iter().zip([0.5625, 0.1875, 0.1875, 0.0625]) {
        assert!((a - b).abs() < 1e-15);
    }
}

#[test]
fn marginal_and_condition_examples() {
    let d = dsbs(0.25);
    assert_eq!(d.marginalize(&["X2"]).unwrap().weights(), &[0.5, 0.5]);
    let k = d.condition(&["X1"]).unwrap();
    assert_eq!(k.slice(0), &[0.75, 0.25]);
    assert_eq!(k.slice(1), &[0.25, 0.75]);
    assert!(matches!(d.marginalize(&["Y"]), Err(Error::Usage(_))));

    let copy: JointPmf = Pmf::new(vec![Axis::new("X1", 2), Axis::new("X2", 2)], vec![0.5, 0.0, 0.0, 0.5]).unwrap();
    assert_eq!(copy.condition(&["X1"]).unwrap().as_function(), Some(vec![0, 1]));

    // Zero-mass conditions give flagged uniform slices.
    let skew: JointPmf = Pmf::new(vec![Axis::new("A", 2), Axis::new("B", 3)], vec![0.2, 0.3, 0.5, 0.0, 0.0, 0.0]).unwrap();
    let k = skew.condition(&["A"]).unwrap();
    assert!(k.is_degenerate(1) && !k.is_degenerate(0));
    assert_eq!(k.slice(1), &[1.0 / 3.0; 3]);
}

#[test]
fn information_examples() {
    let d = dsbs(0.25);
    let i = d.mutual_information(&["X1"], &["X2"]).unwrap();
    assert!((i - (1.0 - h2(0.25))).abs() < 1e-12);
    assert!((i - 0.18872).abs() < 1e-5);
    let ind = pmf1(&[0.5, 0.5]).product_extend(1).unwrap();
    assert_eq!(entropy_bits(ind.weights()), 1.0);
    let indep: JointPmf = Pmf::uniform(vec![Axis::new("X", 2), Axis::new("Y", 2)]).unwrap();
    assert_eq!(indep.mutual_information(&["X"], &["Y"]).unwrap(), 0.0);
    let copy: JointPmf = Pmf::new(vec![Axis::new("X1", 2), Axis::new("X2", 2)], vec![0.5, 0.0, 0.0, 0.5]).unwrap();
    assert!((copy.mutual_information(&["X1"], &["X2"]).unwrap() - 1.0).abs() < 1e-12);
    assert!(matches!(d.info_measure(&["X1"], &["X1"], &[]), Err(Error::Usage(_))));
    // Empty B gives H(A|C).
    assert!((d.info_measure(&["X2"], &[], &["X1"]).unwrap() - h2(0.25)).abs() < 1e-12);
}

#[test]
fn divergence_examples() {
    let p = pmf1(&[1.0, 0.0]);
    let q = pmf1(&[0.5, 0.5]);
    let d = divergences(&p, &q).unwrap();
    assert!((d.kl - 1.0).abs() < 1e-12 && (d.tv - 1.0).abs() < 1e-12);
    assert_eq!(divergences(&q, &p).unwrap().kl, f64::INFINITY);
    let same = divergences(&q, &q).unwrap();
    assert_eq!((same.kl, same.tv), (0.0, 0.0));
    assert!(divergences(&q, &dsbs(0.1)).is_err());
}

#[test]
fn typicality_examples() {
    let b = [0.5, 0.5];
    assert!(is_typical(&[0, 1, 0, 1], &b, 0.1));
    assert!(!is_typical(&[0, 0, 0, 0], &b, 0.1));
    assert!(is_typical(&[0, 0, 0, 1, 0, 0, 1, 0], &[0.75, 0.25], 0.1));
    assert!(!is_typical(&[0, 2], &[0.5, 0.5, 0.0], 0.5));
}

#[test]
fn staircase_examples() {
    let t = StaircaseTable::build(&[0.5, 0.3, 0.2], &[0, 1, 2], 10).unwrap();
    assert_eq!(t.cuts(), &[5, 8, 10]);
    assert_eq!(t.certificate(&[0.5, 0.3, 0.2]).l1, 0.0);

    let third = [1.0 / 3.0; 3];
    let t = StaircaseTable::build(&third, &[0, 1, 2], 10).unwrap();
    assert_eq!(t.cuts(), &[3, 6, 10]);
    let ind = t.induced(3);
    for (a, b) in ind.iter().zip([0.3, 0.3, 0.4]) {
        assert!((a - b).abs() < 1e-12);
    }
    let c = t.certificate(&third);
    assert!((c.l1 - 2.0 / 15.0).abs() < 1e-12 && c.l1 <= c.bound && (c.bound - 0.3).abs() < 1e-12);

    let point = pmf1(&[0.0, 1.0, 0.0]);
    for ell in [1, 2, 7] {
        let t = staircase_map(&point, &[1], ell).unwrap();
        assert_eq!(t.certificate(point.weights()).l1, 0.0);
        assert!((1..=ell).all(|s| t.apply(s) == 1));
    }
    let vac = StaircaseTable::build(&third, &[0, 1, 2], 2).unwrap().certificate(&third);
    assert!(vac.vacuous);
    assert!(StaircaseTable::build(&third, &[0, 0], 4).is_err());
}

fn arb_pmf(max: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0f64..1.0, 1..=max).prop_filter_map("mass", |w| {
        let s: f64 = w.iter().sum();
        (s > 1e-6).then(|| w.iter().map(|x| x / s).collect())
    })
}

fn arb_joint() -> impl Strategy<Value = JointPmf> {
    (1usize..4, 1usize..4, 1usize..3).prop_flat_map(|(a, b, c)| {
        prop::collection::vec(0.0f64..1.0, a * b * c).prop_filter_map("mass", move |w| {
            Pmf::new_renormalized(vec![Axis::new("A", a), Axis::new("B", b), Axis::new("C", c)], w).ok()
        })
    })
}

proptest! {
    #[test]
    fn chain_rule_and_nonnegativity(p in arb_joint()) {
        let hab = p.entropy(&["A", "B"]).unwrap();
        let ha = p.entropy(&["A"]).unwrap();
        let hb_a = p.conditional_entropy(&["B"], &["A"]).unwrap();
        prop_assert!((hab - ha - hb_a).abs() < 1e-9);
        prop_assert!(p.info_measure(&["A"], &["B"], &["C"]).unwrap() >= 0.0);
    }

    #[test]
    fn independent_product_has_zero_information(a in arb_pmf(4), b in arb_pmf(4)) {
        let j: JointPmf = Pmf::from_fn(vec![Axis::new("A", a.len()), Axis::new("B", b.len())], |x| a[x[0]] * b[x[1]]).unwrap();
        prop_assert!(j.mutual_information(&["A"], &["B"]).unwrap() < 1e-12);
    }

    #[test]
    fn pinsker(p in arb_pmf(6), q in arb_pmf(6)) {
        let n = p.len().min(q.len());
        let renorm = |v: &[f64]| { let s: f64 = v[..n].iter().sum(); v[..n].iter().map(|x| x / s).collect::<Vec<_>>() };
        let (p, q) = (pmf1(&renorm(&p)), pmf1(&renorm(&q)));
        let d = divergences(&p, &q).unwrap();
        if d.kl.is_finite() {
            prop_assert!(d.tv <= (2.0 * std::f64::consts::LN_2 * d.kl).sqrt() + 1e-9);
        }
    }

    #[test]
    fn marginalize_commutes_with_extension(p in arb_joint(), n in 1usize..3) {
        let a = p.product_extend(n).unwrap().marginalize(&["B"]).unwrap();
        let b = p.marginalize(&["B"]).unwrap().product_extend(n).unwrap();
        prop_assert!(a.l1(&b).unwrap() < 1e-12);
    }

    #[test]
    fn condition_reassembles_joint(p in arb_joint()) {
        let m = p.marginalize(&["A"]).unwrap();
        let k = p.condition(&["A"]).unwrap();
        let mut err: f64 = 0.0;
        p.for_each(|idx, w| {
            let g = idx[0];
            let out = idx[1] * p.axis_size("C").unwrap() + idx[2];
            err = err.max((m.weights()[g] * k.prob(g, out) - w).abs());
        });
        prop_assert!(err < 1e-12);
    }

    #[test]
    fn staircase_bound_exact(q in arb_pmf(64), ell in 16u64..4096, drop in 0usize..4) {
        let mut order: Vec<usize> = (0..q.len()).filter(|&a| q[a] > 0.0).collect();
        let full = StaircaseTable::build(&q, &order, ell).unwrap().certificate(&q);
        prop_assert!(full.covers_support && full.l1 <= full.support_len as f64 / ell as f64 + 1e-12);
        let keep = order.len().saturating_sub(drop).max(1);
        order.truncate(keep);
        let part = StaircaseTable::build(&q, &order, ell).unwrap().certificate(&q);
        prop_assert!(part.l1 <= part.bound + 1e-12);
    }
}
