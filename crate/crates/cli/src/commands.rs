//! Subcommand bodies. Each returns a JSON report, optional CSV series rows,
//! and whether every check in it passed.

use crate::config::{Experiment, ExperimentConfig, Number, SystemConfig};
use crate::error::CliError;
use coordline::codebooks::Codebook;
use coordline::codec::Scheme;
use coordline::eval::{cr_independence, exact_tv, mc_coordination_tv, piecing_check, EnsembleStat};
use coordline::line::{z_label, Mode};
use coordline::rates::{
    deterministic_region_check, fme_project, functional_region_check, large_cr_region_check, markov_region_check,
    rate_transfer, rationalize, resource_map, thm1_check, thm2_check_all, zero_local_region_check, Field,
    Inequality, ModeFamily, RatePoint, RationalSystem, Transfer, REGION_TOL,
};
use num_rational::BigRational;
use serde::Serialize;
use serde_json::{json, Value};
use std::str::FromStr;

pub struct Outcome {
    pub report: Value,
    pub series: Vec<SeriesRow>,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SeriesRow {
    pub n: usize,
    pub codebook_seed: Option<u64>,
    pub tv: f64,
    pub se: Option<f64>,
    pub cr_independence: Option<f64>,
    pub piecing: Option<f64>,
    pub estimator: String,
}

/// Run parameters shared by the simulation commands.
pub struct RunParams {
    pub n: Vec<usize>,
    pub trials: u64,
    pub seed: u64,
    pub codebook_seeds: Vec<u64>,
}

impl RunParams {
    pub fn from_config(cfg: &ExperimentConfig) -> Self {
        RunParams {
            n: cfg.n.clone().unwrap_or_else(|| vec![1]),
            trials: cfg.trials.unwrap_or(10_000),
            seed: cfg.seed.unwrap_or(0),
            codebook_seeds: cfg.seeds.clone().unwrap_or_else(|| (0..cfg.codebooks.unwrap_or(1)).collect()),
        }
    }
}

fn header(cmd: &str, exp: &Experiment) -> serde_json::Map<String, Value> {
    let mut m = serde_json::Map::new();
    m.insert("command".into(), json!(cmd));
    m.insert("experiment".into(), json!(exp.name));
    m.insert("h".into(), json!(exp.spec.h()));
    m.insert("mode".into(), json!(exp.mode));
    m
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report values serialize")
}

pub fn validate(exp: &Experiment) -> Result<Outcome, CliError> {
    let report = exp.spec.validate()?;
    let mode_check = exp.spec.check_mode(exp.mode);
    let mut m = header("validate", exp);
    m.insert("validation".into(), to_value(&report));
    m.insert("violations".into(), json!(report.violations().iter().map(|c| &c.name).collect::<Vec<_>>()));
    m.insert("mode_ok".into(), json!(mode_check.is_ok()));
    if let Err(e) = &mode_check {
        m.insert("mode_error".into(), json!(e.to_string()));
    }
    let pass = report.valid && mode_check.is_ok();
    m.insert("pass".into(), json!(pass));
    Ok(Outcome { report: Value::Object(m), series: vec![], pass })
}

pub fn rates(exp: &Experiment) -> Result<Outcome, CliError> {
    exp.rates.validate()?;
    let t1 = thm1_check(&exp.rates, &exp.spec, 0.0)?;
    let t2 = thm2_check_all(&exp.rates, &exp.spec, 0.0)?;
    let point = resource_map(&exp.rates, exp.mode, &exp.spec)?;
    let pass = t1.pass && t2.pass;
    let mut m = header("rates", exp);
    m.insert("rates".into(), to_value(&exp.rates));
    m.insert("collision".into(), to_value(&t1));
    m.insert("per_node".into(), to_value(&t2));
    m.insert("resources".into(), to_value(&point));
    m.insert("pass".into(), json!(pass));
    Ok(Outcome { report: Value::Object(m), series: vec![], pass })
}

fn default_point(exp: &Experiment, given: Option<RatePoint>) -> Result<RatePoint, CliError> {
    let point = match given {
        Some(p) => p,
        None => resource_map(&exp.rates, exp.mode, &exp.spec)?,
    };
    point.validate()?;
    if point.h() != exp.spec.h() {
        return Err(CliError::Usage(format!("rate point has h={}, network has h={}", point.h(), exp.spec.h())));
    }
    Ok(point)
}

pub fn region(exp: &Experiment, theorem: &str, point: Option<RatePoint>, tol: Option<f64>) -> Result<Outcome, CliError> {
    let point = default_point(exp, point)?;
    let tol = tol.unwrap_or(REGION_TOL);
    let net = &exp.spec.network;
    let h = exp.spec.h();
    let zspec = |range: std::ops::RangeInclusive<usize>| {
        let z = exp
            .zspec
            .as_ref()
            .ok_or_else(|| CliError::Usage(format!("region {theorem} needs z choices in the config")))?;
        let need: Vec<String> = range.map(z_label).collect();
        if need.iter().any(|l| !z.axes().iter().any(|a| &a.label == l)) {
            return Err(CliError::Usage(format!("region {theorem} needs z choices {}", need.join(", "))));
        }
        Ok(z)
    };
    let report = match theorem {
        "functional" => functional_region_check(&point, net, zspec(2..=h)?, tol)?,
        "markov" => markov_region_check(&point, net, zspec(1..=h - 1)?, tol)?,
        "large-cr" => large_cr_region_check(&point, net, tol)?,
        "deterministic" => deterministic_region_check(&point, net, tol)?,
        "zero-local" => zero_local_region_check(&point, net, tol)?,
        other => {
            return Err(CliError::Usage(format!(
                "unknown region {other} (expected functional, markov, large-cr, deterministic or zero-local)"
            )))
        }
    };
    let pass = report.applicable && report.pass;
    let mut m = header("region", exp);
    m.insert("point".into(), to_value(&point));
    m.insert("region".into(), to_value(&report));
    m.insert("pass".into(), json!(pass));
    Ok(Outcome { report: Value::Object(m), series: vec![], pass })
}

pub fn transfer(exp: &Experiment, point: Option<RatePoint>, kind: Transfer, node: usize, delta: f64) -> Result<Outcome, CliError> {
    let before = default_point(exp, point)?;
    let family = match exp.mode {
        Mode::Unrestricted => ModeFamily::Unrestricted,
        _ => ModeFamily::FunctionalOrActionDependent,
    };
    let after = rate_transfer(&before, kind, family, node, delta)?;
    let mut m = header("transfer", exp);
    m.insert("kind".into(), to_value(&kind));
    m.insert("family".into(), to_value(&family));
    m.insert("node".into(), json!(node));
    m.insert("delta".into(), json!(delta));
    m.insert("before".into(), to_value(&before));
    m.insert("after".into(), to_value(&after));
    m.insert("pass".into(), json!(true));
    Ok(Outcome { report: Value::Object(m), series: vec![], pass: true })
}

pub fn simulate(exp: &Experiment, run: &RunParams) -> Result<Outcome, CliError> {
    let mut reports = Vec::new();
    let mut series = Vec::new();
    for &n in &run.n {
        let r = mc_coordination_tv(
            &exp.spec,
            &exp.rates,
            exp.mode,
            n,
            run.trials,
            &run.codebook_seeds,
            run.seed,
            exp.sampling,
            false,
        )?;
        for e in &r.estimates {
            series.push(SeriesRow {
                n,
                codebook_seed: Some(e.codebook_seed),
                tv: e.tv,
                se: Some(e.radius),
                cr_independence: None,
                piecing: None,
                estimator: r.estimator.clone(),
            });
        }
        reports.push(r);
    }
    let mut m = header("simulate", exp);
    m.insert("seed".into(), json!(run.seed));
    m.insert("trials".into(), json!(run.trials));
    m.insert("sampling".into(), to_value(&exp.sampling));
    m.insert("results".into(), to_value(&reports));
    m.insert("pass".into(), json!(true));
    Ok(Outcome { report: Value::Object(m), series, pass: true })
}

#[derive(Serialize)]
struct ExactEntry {
    n: usize,
    codebook_seed: u64,
    tv: f64,
    cr_independence: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    piecing: Option<f64>,
    budget_violations: Vec<String>,
}

pub fn exact(exp: &Experiment, run: &RunParams) -> Result<Outcome, CliError> {
    let mut entries = Vec::new();
    let mut summary = Vec::new();
    let mut series = Vec::new();
    for &n in &run.n {
        let mut tvs = Vec::new();
        for &s in &run.codebook_seeds {
            let cb = Codebook::build(&exp.spec, &exp.rates, n, s, exp.sampling)?;
            let scheme = Scheme::new(&cb, &exp.spec, &exp.rates, exp.mode)?;
            let tv = exact_tv(&scheme)?;
            let cri = cr_independence(&scheme)?;
            // Only defined for two-node lines.
            let piecing = if exp.spec.h() == 2 { Some(piecing_check(&cb, &exp.spec)?) } else { None };
            series.push(SeriesRow {
                n,
                codebook_seed: Some(s),
                tv,
                se: None,
                cr_independence: Some(cri),
                piecing,
                estimator: "exact".into(),
            });
            tvs.push(tv);
            entries.push(ExactEntry {
                n,
                codebook_seed: s,
                tv,
                cr_independence: cri,
                piecing,
                budget_violations: scheme.budget_violations(),
            });
        }
        let stat = EnsembleStat::from_values(tvs);
        summary.push(json!({ "n": n, "mean_tv": stat.mean, "se_tv": stat.se }));
    }
    let mut m = header("exact", exp);
    m.insert("sampling".into(), to_value(&exp.sampling));
    m.insert("entries".into(), to_value(&entries));
    m.insert("summary".into(), Value::Array(summary));
    m.insert("pass".into(), json!(true));
    Ok(Outcome { report: Value::Object(m), series, pass: true })
}

fn number(v: &Number) -> Result<BigRational, CliError> {
    match v {
        Number::Float(x) if x.is_finite() => Ok(rationalize(*x)),
        Number::Float(x) => Err(CliError::Usage(format!("non-finite coefficient {x}"))),
        Number::Text(s) => {
            let s = s.trim();
            if s.contains('.') || s.contains('e') {
                let x: f64 = s.parse().map_err(|_| CliError::Usage(format!("bad number {s:?}")))?;
                Ok(rationalize(x))
            } else {
                BigRational::from_str(s).map_err(|_| CliError::Usage(format!("bad number {s:?}")))
            }
        }
    }
}

fn system(cfg: &SystemConfig) -> Result<RationalSystem, CliError> {
    let mut rows = Vec::with_capacity(cfg.rows.len());
    for (k, r) in cfg.rows.iter().enumerate() {
        if r.coeffs.len() != cfg.vars.len() {
            return Err(CliError::Usage(format!("system row {k} has {} coefficients for {} variables", r.coeffs.len(), cfg.vars.len())));
        }
        let coeffs = r.coeffs.iter().map(number).collect::<Result<_, _>>()?;
        rows.push(Inequality { coeffs, rhs: number(&r.rhs)? });
    }
    Ok(RationalSystem { vars: cfg.vars.clone(), rows })
}

fn render(sys: &RationalSystem) -> Value {
    let rows: Vec<Value> = sys
        .rows
        .iter()
        .map(|r| {
            json!({
                "coeffs": r.coeffs.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
                "rhs": r.rhs.to_string(),
                "rhs_f64": Field::to_f64(&r.rhs),
            })
        })
        .collect();
    json!({ "vars": sys.vars, "rows": rows })
}

pub fn fme(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let sc = cfg.system.as_ref().ok_or_else(|| CliError::Usage("fme needs a system in the config".into()))?;
    let sys = system(sc)?;
    let elim: Vec<&str> = sc.eliminate.iter().map(String::as_str).collect();
    let projected = fme_project(&sys, &elim)?;
    let report = json!({
        "command": "fme",
        "input": render(&sys),
        "eliminate": sc.eliminate,
        "projected": render(&projected),
        "pass": true,
    });
    Ok(Outcome { report, series: vec![], pass: true })
}
