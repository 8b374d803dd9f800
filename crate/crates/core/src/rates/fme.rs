use crate::error::{usage, Error, Result};
use crate::line::{x_label, z_label, NetworkSpec};
use crate::JointPmf;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use std::fmt::Debug;

/// Ordered field used for projection arithmetic.
pub trait Field: Clone + PartialOrd + Num + Signed + Debug + Send + Sync {
    fn from_f64(x: f64) -> Option<Self>;
    fn to_f64(&self) -> f64;
}

impl Field for f64 {
    fn from_f64(x: f64) -> Option<Self> {
        x.is_finite().then_some(x)
    }
    fn to_f64(&self) -> f64 {
        *self
    }
}

impl Field for BigRational {
    /// Exact dyadic value of the float.
    fn from_f64(x: f64) -> Option<Self> {
        BigRational::from_float(x)
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

/// Nearest rational with denominator 10^9.
pub fn rationalize(x: f64) -> BigRational {
    let den = BigInt::from(1_000_000_000u64);
    let num = BigInt::from_f64((x * 1e9).round()).expect("finite input");
    BigRational::new(num, den)
}

/// coeffs · x ≥ rhs.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Inequality<S> {
    pub coeffs: Vec<S>,
    pub rhs: S,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LinearSystem<S> {
    pub vars: Vec<String>,
    pub rows: Vec<Inequality<S>>,
}

pub type RationalSystem = LinearSystem<BigRational>;
pub type FloatSystem = LinearSystem<f64>;

/// Default row cap for projection.
pub const FME_ROW_CAP: usize = 200_000;

impl<S: Field> LinearSystem<S> {
    pub fn new(vars: &[&str]) -> Self {
        LinearSystem { vars: vars.iter().map(|v| v.to_string()).collect(), rows: vec![] }
    }

    pub fn var_index(&self, v: &str) -> Result<usize> {
        self.vars.iter().position(|x| x == v).ok_or_else(|| usage(format!("unknown variable {v}")))
    }

    /// Adds Σ c·var ≥ rhs.
    pub fn add(&mut self, terms: &[(&str, S)], rhs: S) -> Result<()> {
        let mut coeffs = vec![S::zero(); self.vars.len()];
        for (v, c) in terms {
            let k = self.var_index(v)?;
            coeffs[k] = coeffs[k].clone() + c.clone();
        }
        self.rows.push(Inequality { coeffs, rhs });
        Ok(())
    }

    pub fn add_nonneg(&mut self, vars: &[&str]) -> Result<()> {
        for v in vars {
            self.add(&[(v, S::one())], S::zero())?;
        }
        Ok(())
    }

    pub fn contains(&self, point: &[S]) -> bool {
        self.rows.iter().all(|r| {
            let lhs = r.coeffs.iter().zip(point).fold(S::zero(), |acc, (a, x)| acc + a.clone() * x.clone());
            lhs >= r.rhs
        })
    }

    pub fn contains_f64(&self, point: &[f64]) -> bool {
        let p: Option<Vec<S>> = point.iter().map(|&x| S::from_f64(x)).collect();
        p.is_some_and(|p| self.contains(&p))
    }
}

/// Scales a row so its first nonzero coefficient has magnitude one.
fn normalize<S: Field>(mut r: Inequality<S>) -> Inequality<S> {
    if let Some(lead) = r.coeffs.iter().find(|c| !c.is_zero()).map(|c| c.abs()) {
        for c in &mut r.coeffs {
            *c = c.clone() / lead.clone();
        }
        r.rhs = r.rhs / lead;
    } else if r.rhs.is_positive() {
        r.rhs = S::one();
    }
    r
}

/// Drops trivial rows and keeps, among rows with equal normalized
/// coefficients, only the one with the largest right-hand side.
fn prune<S: Field>(rows: Vec<Inequality<S>>) -> Vec<Inequality<S>> {
    let mut out: Vec<Inequality<S>> = Vec::new();
    for r in rows.into_iter().map(normalize) {
        if r.coeffs.iter().all(Zero::is_zero) && !r.rhs.is_positive() {
            continue;
        }
        match out.iter_mut().find(|o| o.coeffs == r.coeffs) {
            Some(o) => {
                if r.rhs > o.rhs {
                    o.rhs = r.rhs;
                }
            }
            None => out.push(r),
        }
    }
    out
}

/// Projects out `eliminate`, one variable at a time (fewest generated rows first).
pub fn fme_project<S: Field>(system: &LinearSystem<S>, eliminate: &[&str]) -> Result<LinearSystem<S>> {
    fme_project_capped(system, eliminate, FME_ROW_CAP)
}

pub fn fme_project_capped<S: Field>(system: &LinearSystem<S>, eliminate: &[&str], cap: usize) -> Result<LinearSystem<S>> {
    for v in eliminate {
        system.var_index(v)?;
    }
    let mut vars = system.vars.clone();
    let mut rows = prune(system.rows.clone());
    let mut todo: Vec<String> = eliminate.iter().map(|v| v.to_string()).collect();
    while !todo.is_empty() {
        let cost = |name: &String| {
            let k = vars.iter().position(|x| x == name).unwrap();
            let p = rows.iter().filter(|r| r.coeffs[k].is_positive()).count();
            let n = rows.iter().filter(|r| r.coeffs[k].is_negative()).count();
            p * n
        };
        let (t, _) = todo.iter().enumerate().min_by_key(|(_, v)| cost(v)).unwrap();
        let name = todo.remove(t);
        let k = vars.iter().position(|x| *x == name).unwrap();
        let (pos, rest): (Vec<_>, Vec<_>) = rows.into_iter().partition(|r| r.coeffs[k].is_positive());
        let (neg, zero): (Vec<_>, Vec<_>) = rest.into_iter().partition(|r| r.coeffs[k].is_negative());
        let needed = pos.len() * neg.len() + zero.len();
        if needed > cap {
            return Err(Error::Resource { what: "projection rows".into(), needed: needed as u128, cap: cap as u128 });
        }
        let mut next = zero;
        for p in &pos {
            for n in &neg {
                let (cp, cn) = (p.coeffs[k].clone(), -n.coeffs[k].clone());
                let coeffs = p
                    .coeffs
                    .iter()
                    .zip(&n.coeffs)
                    .map(|(a, b)| cn.clone() * a.clone() + cp.clone() * b.clone())
                    .collect();
                let rhs = cn.clone() * p.rhs.clone() + cp.clone() * n.rhs.clone();
                next.push(Inequality { coeffs, rhs });
            }
        }
        for r in &mut next {
            r.coeffs.remove(k);
        }
        vars.remove(k);
        rows = prune(next);
    }
    Ok(LinearSystem { vars, rows })
}

/// Functional-mode achievable system before eliminating the code parameters
/// μ±_{1,j} and the transfer variables δ_1..δ_h, ε_2..ε_h. Returns the system
/// and the names to eliminate; the kept variables are Rc, R1.., rho1...
pub fn functional_lifted_system(network: &NetworkSpec, zspec: &JointPmf) -> Result<(RationalSystem, Vec<String>)> {
    let h = network.h;
    let s = crate::line::strs;
    let xs: Vec<String> = (1..=h).map(x_label).collect();
    let info = |a: &[String], b: &[String], c: &[String]| zspec.info_measure(&s(a), &s(b), &s(c)).map(rationalize);
    let zt = |i: usize| -> Vec<String> { (i..=h).map(z_label).collect() };

    let mut kept = vec!["Rc".to_string()];
    kept.extend((1..h).map(|i| format!("R{i}")));
    kept.extend((1..=h).map(|i| format!("rho{i}")));
    let mut elim = Vec::new();
    elim.extend((2..=h).map(|j| format!("mup{j}")));
    elim.extend((2..=h).map(|j| format!("mum{j}")));
    elim.extend((1..=h).map(|i| format!("d{i}")));
    elim.extend((2..=h).map(|i| format!("e{i}")));
    let all: Vec<&str> = kept.iter().chain(&elim).map(String::as_str).collect();
    let mut sys = RationalSystem::new(&all);
    let one = BigRational::one;
    let neg = || -BigRational::one();

    let mut t: Vec<(&str, BigRational)> = vec![("Rc", one())];
    let mums: Vec<String> = (2..=h).map(|j| format!("mum{j}")).collect();
    let ds: Vec<String> = (1..=h).map(|i| format!("d{i}")).collect();
    t.extend(mums.iter().chain(&ds).map(|v| (v.as_str(), neg())));
    sys.add(&t, BigRational::zero())?;

    for i in 1..h {
        let ri = format!("R{i}");
        let mut t: Vec<(&str, BigRational)> = vec![(ri.as_str(), one())];
        let names: Vec<String> = (i + 1..=h).flat_map(|j| [format!("mup{j}"), format!("e{j}")]).collect();
        t.extend(names.iter().map(|v| (v.as_str(), neg())));
        sys.add(&t, BigRational::zero())?;
    }

    let i_x1z = info(&xs[..1], &zt(2), &[])?;
    let mut t: Vec<(&str, BigRational)> = vec![("rho1", one()), ("d1", one())];
    let names: Vec<String> = (2..=h).flat_map(|j| [format!("mup{j}"), format!("e{j}")]).collect();
    t.extend(names.iter().map(|v| (v.as_str(), neg())));
    sys.add(&t, -i_x1z)?;

    for i in 2..=h {
        let (rho, d, e) = (format!("rho{i}"), format!("d{i}"), format!("e{i}"));
        let rhs = info(&[x_label(i)], &[], &zt(i))?;
        sys.add(&[(rho.as_str(), one()), (d.as_str(), one()), (e.as_str(), one())], rhs)?;
    }

    for i in 2..=h {
        let names: Vec<String> = (i..=h).flat_map(|k| [format!("mup{k}"), format!("mum{k}")]).collect();
        let t: Vec<(&str, BigRational)> = names.iter().map(|v| (v.as_str(), one())).collect();
        sys.add(&t, info(&xs, &zt(i), &[])?)?;
        let names: Vec<String> = (i..=h).map(|k| format!("mup{k}")).collect();
        let t: Vec<(&str, BigRational)> = names.iter().map(|v| (v.as_str(), one())).collect();
        sys.add(&t, info(&xs[..1], &zt(i), &[])?)?;
    }
    sys.add_nonneg(&all)?;
    Ok((sys, elim))
}
