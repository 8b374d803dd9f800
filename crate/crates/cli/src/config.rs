//! Experiment configuration: a JSON document with an explicit schema version.
//!
//! Either `preset` or `network` (plus optional `aux`) describes the problem.
//! Pmf tensors are row-major over the declared `axes`, last axis fastest.

use crate::error::CliError;
use coordline::codebooks::Sampling;
use coordline::line::{extend_with_channels, AuxAssignment, AuxChoice, AuxSpec, IndexPair, Mode, NetworkSpec};
use coordline::presets::{self, Preset};
use coordline::prob::Axis;
use coordline::rates::{CodebookRates, RatePoint, Transfer};
use coordline::JointPmf;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    #[serde(default)]
    pub preset: Option<PresetRef>,
    #[serde(default)]
    pub network: Option<NetworkConfig>,
    /// Auxiliary choices by label (`A1_2`, `B1`, `C2`); unlisted ones take the defaults.
    #[serde(default)]
    pub aux: BTreeMap<String, AuxChoice>,
    /// Z variables for the functional and Markov region checks, by label.
    #[serde(default)]
    pub z: BTreeMap<String, AuxChoice>,
    #[serde(default)]
    pub rates: Option<CodebookRates>,
    #[serde(default)]
    pub mode: Option<Mode>,
    #[serde(default)]
    pub sampling: Option<Sampling>,
    #[serde(default)]
    pub n: Option<Vec<usize>>,
    #[serde(default)]
    pub trials: Option<u64>,
    /// Master seed for trials.
    #[serde(default)]
    pub seed: Option<u64>,
    /// Codebook seeds; defaults to 0..codebooks.
    #[serde(default)]
    pub seeds: Option<Vec<u64>>,
    #[serde(default)]
    pub codebooks: Option<u64>,
    #[serde(default)]
    pub margin: Option<f64>,
    /// Enumeration cap, as an integer or "2^k".
    #[serde(default)]
    pub cap: Option<String>,
    #[serde(default)]
    pub point: Option<RatePoint>,
    #[serde(default)]
    pub transfer: Option<TransferConfig>,
    #[serde(default)]
    pub system: Option<SystemConfig>,
    #[serde(default)]
    pub out: Option<String>,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(untagged)]
pub enum PresetRef {
    Name(String),
    Params(PresetParams),
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct PresetParams {
    pub name: String,
    #[serde(default)]
    pub p: Option<f64>,
    #[serde(default)]
    pub h: Option<usize>,
    #[serde(default)]
    pub sizes: Option<Vec<usize>>,
    #[serde(default)]
    pub v: Option<[[f64; 2]; 2]>,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkConfig {
    /// Axis order of `target`; must be a permutation of X1..Xh.
    pub axes: Vec<String>,
    pub alphabets: Vec<usize>,
    pub target: Vec<f64>,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct TransferConfig {
    pub kind: Transfer,
    pub node: usize,
    pub delta: f64,
}

/// A linear system Σ coeffs·vars ≥ rhs; numbers may be decimals or "p/q" strings.
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SystemConfig {
    pub vars: Vec<String>,
    pub rows: Vec<RowConfig>,
    pub eliminate: Vec<String>,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RowConfig {
    pub coeffs: Vec<Number>,
    pub rhs: Number,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(untagged)]
pub enum Number {
    Float(f64),
    Text(String),
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn parse(text: &str, origin: &str) -> Result<Self, CliError> {
        let cfg: ExperimentConfig = serde_json::from_str(text).map_err(|e| CliError::Config {
            origin: origin.to_string(),
            line: e.line(),
            column: e.column(),
            msg: e.to_string(),
        })?;
        if cfg.schema_version != SCHEMA_VERSION {
            return Err(CliError::Usage(format!(
                "{origin}: schema_version {} is not supported (expected {SCHEMA_VERSION})",
                cfg.schema_version
            )));
        }
        Ok(cfg)
    }

    pub fn from_preset(name: &str) -> Self {
        ExperimentConfig { schema_version: SCHEMA_VERSION, preset: Some(PresetRef::Name(name.into())), ..Default::default() }
    }
}

/// Everything a command needs, after defaults and overrides.
pub struct Experiment {
    pub name: String,
    pub spec: AuxSpec,
    pub rates: CodebookRates,
    pub mode: Mode,
    pub sampling: Sampling,
    pub zspec: Option<JointPmf>,
}

fn build_preset(r: &PresetRef) -> coordline::Result<Preset> {
    match r {
        PresetRef::Name(n) => presets::by_name(n),
        PresetRef::Params(p) => {
            let margin = 0.25;
            match p.name.as_str() {
                "dsbs" => presets::dsbs(p.p.unwrap_or(0.25), margin),
                "copy-chain" => presets::copy_chain(p.h.unwrap_or(3), margin),
                "markov-bsc" => presets::markov_bsc(p.h.unwrap_or(3), p.p.unwrap_or(0.25), margin),
                "independent-uniform" => presets::independent_uniform(p.sizes.as_deref().unwrap_or(&[2, 2])),
                "essential-b" => presets::essential_b(p.v.unwrap_or([[0.4, 0.1], [0.1, 0.4]]), margin),
                other => presets::by_name(other),
            }
        }
    }
}

fn network(cfg: &NetworkConfig) -> Result<NetworkSpec, CliError> {
    if cfg.axes.len() != cfg.alphabets.len() {
        return Err(CliError::Usage("network.axes and network.alphabets differ in length".into()));
    }
    let axes: Vec<Axis> = cfg.axes.iter().zip(&cfg.alphabets).map(|(l, &s)| Axis::new(l.clone(), s)).collect();
    let declared = JointPmf::new(axes, cfg.target.clone())?;
    let h = cfg.axes.len();
    let order: Vec<String> = (1..=h).map(|k| format!("X{k}")).collect();
    let order: Vec<&str> = order.iter().map(String::as_str).collect();
    Ok(NetworkSpec::new(declared.marginalize(&order)?)?)
}

fn parse_label(label: &str) -> Option<(char, usize, usize)> {
    let (head, rest) = label.split_at(1);
    let kind = head.chars().next()?;
    match rest.split_once('_') {
        Some((i, j)) => Some((kind, i.parse().ok()?, j.parse().ok()?)),
        None => Some((kind, rest.parse().ok()?, 0)),
    }
}

fn assignment(aux: &BTreeMap<String, AuxChoice>) -> Result<AuxAssignment, CliError> {
    let mut asg = AuxAssignment::default();
    for (label, choice) in aux {
        match parse_label(label) {
            Some(('A', i, j)) if j > i => {
                asg.a.insert(IndexPair::new(i, j), choice.clone());
            }
            Some(('B', i, 0)) => {
                asg.b.insert(i, choice.clone());
            }
            Some(('C', i, 0)) => {
                asg.c.insert(i, choice.clone());
            }
            _ => return Err(CliError::Usage(format!("aux.{label}: expected a label like A1_2, B1 or C2"))),
        }
    }
    Ok(asg)
}

/// CLI flags that override the configuration.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub mode: Option<Mode>,
    pub margin: Option<f64>,
}

pub fn resolve(cfg: &ExperimentConfig, ov: &Overrides) -> Result<Experiment, CliError> {
    let (name, spec, mut rates, mut mode, mut sampling, mut zspec) = match (&cfg.preset, &cfg.network) {
        (Some(_), Some(_)) => return Err(CliError::Usage("give either preset or network, not both".into())),
        (Some(r), None) => {
            if !cfg.aux.is_empty() {
                return Err(CliError::Usage("aux choices cannot be combined with a preset".into()));
            }
            let p = build_preset(r)?;
            (p.name, p.spec, p.rates, p.mode, p.sampling, p.zspec)
        }
        (None, Some(n)) => {
            let net = network(n)?;
            let spec = AuxSpec::from_assignment(net, &assignment(&cfg.aux)?)?;
            let rates = presets::rates_with_margin(&spec, 0.25)?;
            ("custom".to_string(), spec, rates, Mode::Unrestricted, Sampling::Iid, None)
        }
        (None, None) => return Err(CliError::Usage("config needs a preset or a network".into())),
    };
    if let Some(m) = ov.margin.or(cfg.margin) {
        if !(m.is_finite() && m >= 0.0) {
            return Err(CliError::Usage(format!("margin {m} must be a nonnegative number of bits")));
        }
        rates = presets::rates_with_margin(&spec, m)?;
    }
    if let Some(r) = &cfg.rates {
        rates = r.clone();
    }
    if let Some(m) = ov.mode.or(cfg.mode) {
        mode = m;
    }
    if let Some(s) = cfg.sampling {
        sampling = s;
    }
    if !cfg.z.is_empty() {
        let extra: Vec<(String, AuxChoice)> = cfg.z.iter().map(|(k, v)| (k.clone(), v.clone())).collect();
        zspec = Some(extend_with_channels(&spec.network, &extra)?);
    }
    Ok(Experiment { name, spec, rates, mode, sampling, zspec })
}
