use coordline::codebooks::{Codebook, Sampling};
use coordline::codec::Scheme;
use coordline::eval::{
    allied_output, coordination_tv, cr_independence, ensemble, exact_induced, exact_tv, mc_coordination_tv, piecing_check,
    target_blocks, EnsembleStat,
};
use coordline::line::{IndexPair, Mode};
use coordline::presets;
use coordline::rates::CodebookRates;
use proptest::prelude::*;

#[test]
fn uniform_targets_coordinate_exactly() {
    for sizes in [vec![2, 2], vec![2, 4, 2]] {
        let p = presets::independent_uniform(&sizes).unwrap();
        for n in 1..=2 {
            let cb = Codebook::build(&p.spec, &p.rates, n, 3, Sampling::Stratified).unwrap();
            let scheme = Scheme::new(&cb, &p.spec, &p.rates, p.mode).unwrap();
            let ex = exact_induced(&scheme).unwrap();
            assert_eq!(coordination_tv(&ex, &p.spec).unwrap(), 0.0, "{sizes:?} n={n}");
            assert_eq!(ex.degenerate_mass, 0.0);
        }
    }
}

#[test]
fn source_blind_output_has_closed_form_tv() {
    // No source index: X2 is a fair bit independent of X1, which is 0.5 away from DSBS(0.25).
    let p = presets::dsbs(0.25, 0.0).unwrap();
    let mut rates = CodebookRates::zeros(2);
    rates.set_mu(IndexPair::new(1, 2), 0.0, 1.0);
    let cb = Codebook::build(&p.spec, &rates, 1, 0, Sampling::Stratified).unwrap();
    let scheme = Scheme::new(&cb, &p.spec, &rates, Mode::Unrestricted).unwrap();
    let ex = exact_induced(&scheme).unwrap();
    for x1 in 0..2 {
        assert_eq!(ex.row(x1), [0.5, 0.5]);
    }
    assert!((exact_tv(&scheme).unwrap() - 0.5).abs() < 1e-12);
}

#[test]
fn induced_rows_are_distributions() {
    let p = presets::markov_bsc(3, 0.25, 0.25).unwrap();
    let cb = Codebook::build(&p.spec, &p.rates, 2, 4, p.sampling).unwrap();
    let scheme = Scheme::new(&cb, &p.spec, &p.rates, p.mode).unwrap();
    let ex = exact_induced(&scheme).unwrap();
    for x1 in 0..ex.block_sizes[0] {
        assert!((ex.row(x1).iter().sum::<f64>() - 1.0).abs() < 1e-9);
    }
    assert!((ex.joint().iter().sum::<f64>() - 1.0).abs() < 1e-9);
    assert!((target_blocks(&p.spec, 2).unwrap().iter().sum::<f64>() - 1.0).abs() < 1e-9);
}

#[test]
fn exact_matches_simulation() {
    let p = presets::dsbs(0.25, 0.25).unwrap();
    let rep = mc_coordination_tv(&p.spec, &p.rates, p.mode, 2, 20_000, &[1, 2], 9, Sampling::Iid, true).unwrap();
    assert_eq!(rep.estimator, "block");
    for e in &rep.estimates {
        let exact = e.exact_tv.unwrap();
        assert!((e.tv - exact).abs() <= 3.0 * e.radius, "mc {} exact {exact} radius {}", e.tv, e.radius);
    }
    let again = mc_coordination_tv(&p.spec, &p.rates, p.mode, 2, 20_000, &[1, 2], 9, Sampling::Iid, true).unwrap();
    assert_eq!(rep.mean_tv, again.mean_tv);
}

#[test]
fn single_common_index_is_independent() {
    let p = presets::dsbs(0.25, 0.25).unwrap();
    let mut rates = p.rates.clone();
    let k = IndexPair::new(1, 2);
    rates.set_mu(k, rates.mu_plus(k) + rates.mu_minus(k), 0.0);
    let cb = Codebook::build(&p.spec, &rates, 2, 0, Sampling::Iid).unwrap();
    let scheme = Scheme::new(&cb, &p.spec, &rates, p.mode).unwrap();
    assert_eq!(cr_independence(&scheme).unwrap(), 0.0);
    let cb = Codebook::build(&p.spec, &p.rates, 2, 0, Sampling::Iid).unwrap();
    let scheme = Scheme::new(&cb, &p.spec, &p.rates, p.mode).unwrap();
    let v = cr_independence(&scheme).unwrap();
    assert!((0.0..=2.0).contains(&v));
}

#[test]
fn piecing_equals_allied_law_on_one_hop() {
    let p = presets::dsbs(0.25, 0.25).unwrap();
    for seed in 0..5 {
        let cb = Codebook::build(&p.spec, &p.rates, 2, seed, Sampling::Iid).unwrap();
        let scheme = Scheme::new(&cb, &p.spec, &p.rates, p.mode).unwrap();
        let allied = allied_output(&scheme).unwrap();
        let target = target_blocks(&p.spec, 2).unwrap();
        let direct: f64 = allied.iter().zip(&target).map(|(a, b)| (a - b).abs()).sum();
        assert!((piecing_check(&cb, &p.spec).unwrap() - direct).abs() < 1e-9);
    }
}

#[test]
fn ensemble_statistics() {
    let s = EnsembleStat::from_values(vec![1.0, 2.0, 3.0]);
    assert_eq!(s.mean, 2.0);
    assert!((s.se - (1.0f64 / 3.0).sqrt()).abs() < 1e-12);
    assert_eq!(EnsembleStat::from_values(vec![4.0]).se, 0.0);
    let p = presets::dsbs(0.25, 0.25).unwrap();
    let a = ensemble(&p.spec, &p.rates, p.mode, 1, &[1, 2, 3], Sampling::Iid, exact_tv).unwrap();
    let b = ensemble(&p.spec, &p.rates, p.mode, 1, &[1, 2, 3], Sampling::Iid, exact_tv).unwrap();
    assert_eq!(a, b);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]
    #[test]
    fn tv_is_bounded(seed in 0u64..10_000, n in 1usize..3) {
        let p = presets::markov_bsc(3, 0.25, 0.25).unwrap();
        let cb = Codebook::build(&p.spec, &p.rates, n, seed, p.sampling).unwrap();
        let scheme = Scheme::new(&cb, &p.spec, &p.rates, p.mode).unwrap();
        let tv = exact_tv(&scheme).unwrap();
        prop_assert!((0.0..=2.0 + 1e-9).contains(&tv));
    }
}
