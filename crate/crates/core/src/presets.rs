//! Ready-made networks, auxiliary choices and rates used by the CLI, tests
//! and the acceptance harness.

use crate::codebooks::Sampling;
use crate::error::{usage, Result};
use crate::line::{
    extend_with_channels, z_label, AuxAssignment, AuxChoice, AuxSpec, IndexPair, Mode, NetworkSpec,
};
use crate::prob::{Axis, Pmf};
use crate::rates::{thm1_rhs, CodebookRates};
use crate::JointPmf;
use serde::Serialize;

pub const PRESET_NAMES: &[&str] = &["dsbs", "copy-chain", "markov-bsc", "independent-uniform", "essential-b"];

/// A complete scheme configuration.
#[derive(Clone, Debug, Serialize)]
pub struct Preset {
    pub name: String,
    pub spec: AuxSpec,
    pub rates: CodebookRates,
    pub mode: Mode,
    pub sampling: Sampling,
    /// Z-variables for the region checks, when the preset has them.
    #[serde(skip)]
    pub zspec: Option<JointPmf>,
}

fn axes(sizes: &[usize]) -> Vec<Axis> {
    sizes.iter().enumerate().map(|(k, &s)| Axis::new(crate::line::x_label(k + 1), s)).collect()
}

/// Doubly symmetric binary source with crossover p.
pub fn dsbs_target(p: f64) -> Result<NetworkSpec> {
    NetworkSpec::new(Pmf::new(axes(&[2, 2]), vec![(1.0 - p) / 2.0, p / 2.0, p / 2.0, (1.0 - p) / 2.0])?)
}

/// Fair bit copied to every node.
pub fn copy_chain_target(h: usize) -> Result<NetworkSpec> {
    let t = Pmf::from_fn(axes(&vec![2; h]), |x| if x.iter().all(|&v| v == x[0]) { 0.5 } else { 0.0 })?;
    NetworkSpec::new(t)
}

/// Uniform bit passed through a BSC(p) on every hop.
pub fn markov_bsc_target(h: usize, p: f64) -> Result<NetworkSpec> {
    let t = Pmf::from_fn(axes(&vec![2; h]), |x| {
        x.windows(2).fold(0.5, |w, e| w * if e[0] == e[1] { 1.0 - p } else { p })
    })?;
    NetworkSpec::new(t)
}

/// Independent uniform actions.
pub fn independent_uniform_target(sizes: &[usize]) -> Result<NetworkSpec> {
    NetworkSpec::new(Pmf::uniform(axes(sizes))?)
}

/// X1 = V1, X2 = (V1,V2) encoded 2·v1 + v2, X3 = V2, for a binary pair pmf `v`.
pub fn essential_b_target(v: [[f64; 2]; 2]) -> Result<NetworkSpec> {
    let t = Pmf::from_fn(axes(&[2, 4, 2]), |x| if x[1] == 2 * x[0] + x[2] { v[x[0]][x[2]] } else { 0.0 })?;
    NetworkSpec::new(t)
}

/// Rates `margin` bits above every codebook-collision and per-hop threshold.
///
/// Pair (1,h) belongs to F∖S for every admissible S, so carrying the A rates
/// on it covers the whole first family; every other pair gets zero rate.
pub fn rates_with_margin(spec: &AuxSpec, margin: f64) -> Result<CodebookRates> {
    let h = spec.h();
    let mut r = CodebookRates::zeros(h);
    let (tot, plus) = thm1_rhs(spec, &[])?;
    let a_live = !spec.all_a_labels().iter().all(|l| spec.is_constant(l).unwrap_or(false));
    if a_live {
        let mp = plus + margin;
        r.set_mu(IndexPair::new(1, h), mp, (tot + margin - mp).max(0.0));
    }
    for node in 2..=h {
        let rows = crate::rates::thm2_check(&CodebookRates::zeros(h), spec, node, 0.0)?.rows;
        let b_const = spec.is_constant(&crate::line::b_label(node - 1))?;
        let (kp, km) = if b_const {
            (0.0, 0.0)
        } else {
            let kp = rows[2].rhs + margin;
            (kp, (rows[1].rhs + margin - kp).max(0.0))
        };
        r.set_kappa(node - 1, kp, km);
        r.set_lambda(node, (rows[0].rhs + margin - kp - km).max(0.0));
    }
    Ok(r)
}

fn build(name: &str, network: NetworkSpec, asg: AuxAssignment, mode: Mode, margin: f64) -> Result<Preset> {
    let spec = AuxSpec::from_assignment(network, &asg)?;
    let rates = rates_with_margin(&spec, margin)?;
    Ok(Preset { name: name.into(), spec, rates, mode, sampling: Sampling::Iid, zspec: None })
}

/// h=2 DSBS(p) with A = X2, unrestricted mode.
pub fn dsbs(p: f64, margin: f64) -> Result<Preset> {
    let mut asg = AuxAssignment::default();
    asg.a.insert(IndexPair::new(1, 2), AuxChoice::EqualsAction(2));
    build("dsbs", dsbs_target(p)?, asg, Mode::Unrestricted, margin)
}

/// Fair-bit copy chain with A_{1,h} = X1, functional mode.
pub fn copy_chain(h: usize, margin: f64) -> Result<Preset> {
    let mut asg = AuxAssignment::default();
    asg.a.insert(IndexPair::new(1, h), AuxChoice::EqualsAction(1));
    let mut p = build("copy-chain", copy_chain_target(h)?, asg, Mode::Functional, margin)?;
    p.zspec = Some(z_copy(&p.spec.network, |k| k)?);
    Ok(p)
}

/// Binary symmetric Markov chain with B_i = Z_i = X_{i+1}, A constant.
pub fn markov_bsc(h: usize, p: f64, margin: f64) -> Result<Preset> {
    let mut asg = AuxAssignment::default();
    for i in 1..h {
        asg.b.insert(i, AuxChoice::EqualsAction(i + 1));
    }
    let mut pre = build("markov-bsc", markov_bsc_target(h, p)?, asg, Mode::Unrestricted, margin)?;
    pre.zspec = Some(z_copy(&pre.spec.network, |k| k + 1)?);
    Ok(pre)
}

/// Independent uniform actions generated purely from local randomness with
/// λ_i = log₂|X_i| and stratified codebooks.
pub fn independent_uniform(sizes: &[usize]) -> Result<Preset> {
    let mut p = build("independent-uniform", independent_uniform_target(sizes)?, AuxAssignment::default(), Mode::Functional, 0.0)?;
    for (k, &s) in sizes.iter().enumerate().skip(1) {
        p.rates.set_lambda(k + 1, (s as f64).log2());
    }
    p.sampling = Sampling::Stratified;
    Ok(p)
}

/// The essentiality-of-B example: A constant, B_{1,2} = V1, B_{2,3} = V2.
pub fn essential_b(v: [[f64; 2]; 2], margin: f64) -> Result<Preset> {
    let net = essential_b_target(v)?;
    let mut asg = AuxAssignment::default();
    asg.b.insert(1, AuxChoice::EqualsAction(1));
    asg.b.insert(2, AuxChoice::EqualsAction(3));
    let mut p = build("essential-b", net, asg, Mode::Unrestricted, margin)?;
    p.zspec = Some(extend_with_channels(
        &p.spec.network,
        &[(z_label(1), AuxChoice::EqualsAction(1)), (z_label(2), AuxChoice::EqualsAction(3))],
    )?);
    Ok(p)
}

/// Z_i = X_{f(i)} for i in 1..h.
fn z_copy(network: &NetworkSpec, f: impl Fn(usize) -> usize) -> Result<JointPmf> {
    let extra: Vec<(String, AuxChoice)> = (1..network.h).map(|i| (z_label(i), AuxChoice::EqualsAction(f(i)))).collect();
    extend_with_channels(network, &extra)
}

/// Preset by name with default parameters.
pub fn by_name(name: &str) -> Result<Preset> {
    match name {
        "dsbs" => dsbs(0.25, 0.25),
        "copy-chain" => copy_chain(3, 0.25),
        "markov-bsc" => markov_bsc(3, 0.25, 0.25),
        "independent-uniform" => independent_uniform(&[2, 2]),
        "essential-b" => essential_b([[0.4, 0.1], [0.1, 0.4]], 0.25),
        _ => Err(usage(format!("unknown preset {name:?}; known: {}", PRESET_NAMES.join(", ")))),
    }
}
