//! Rate machinery: codebook-rate constraints, per-mode resource maps,
//! rate transfers, region membership checks and Fourier–Motzkin projection.

mod fme;
mod regions;

pub use fme::{
    fme_project, functional_lifted_system, rationalize, Field, FloatSystem, Inequality,
    LinearSystem, RationalSystem,
};
pub use regions::{
    deterministic_region_check, functional_region_check, large_cr_region_check,
    markov_region_check, markov_rows, zero_local_region_check, RegionReport, REGION_TOL,
};

use crate::error::{usage, Result};
use crate::line::{
    a_label, b_label, c_label, j_complement, order_pairs, pair_index, x_label, AuxSpec, IndexPair,
    Mode, ZERO_CMI,
};
use serde::{Deserialize, Serialize};

/// Default slack for the strict codebook-rate inequalities.
pub const DEFAULT_MARGIN: f64 = 1e-6;

/// Per-codebook exponents in bits/symbol.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CodebookRates {
    pub h: usize,
    /// Per pair, generation order.
    pub mu_plus: Vec<f64>,
    pub mu_minus: Vec<f64>,
    /// Per hop 1..h−1.
    pub kappa_plus: Vec<f64>,
    pub kappa_minus: Vec<f64>,
    /// Per node 2..h.
    pub lambda: Vec<f64>,
}

impl CodebookRates {
    pub fn zeros(h: usize) -> Self {
        let np = h * (h - 1) / 2;
        CodebookRates {
            h,
            mu_plus: vec![0.0; np],
            mu_minus: vec![0.0; np],
            kappa_plus: vec![0.0; h - 1],
            kappa_minus: vec![0.0; h - 1],
            lambda: vec![0.0; h - 1],
        }
    }

    pub fn validate(&self) -> Result<()> {
        let h = self.h;
        let np = h * (h - 1) / 2;
        if self.mu_plus.len() != np
            || self.mu_minus.len() != np
            || self.kappa_plus.len() != h - 1
            || self.kappa_minus.len() != h - 1
            || self.lambda.len() != h - 1
        {
            return Err(usage("codebook rate vectors do not match the node count"));
        }
        let all = self.mu_plus.iter().chain(&self.mu_minus).chain(&self.kappa_plus);
        if all.chain(&self.kappa_minus).chain(&self.lambda).any(|r| !(r.is_finite() && *r >= 0.0)) {
            return Err(usage("codebook rates must be finite and nonnegative"));
        }
        Ok(())
    }

    pub fn mu_plus(&self, p: IndexPair) -> f64 {
        self.mu_plus[pair_index(self.h, p)]
    }

    pub fn mu_minus(&self, p: IndexPair) -> f64 {
        self.mu_minus[pair_index(self.h, p)]
    }

    pub fn set_mu(&mut self, p: IndexPair, plus: f64, minus: f64) {
        let k = pair_index(self.h, p);
        self.mu_plus[k] = plus;
        self.mu_minus[k] = minus;
    }

    /// Hop i → i+1, i in 1..h−1.
    pub fn kappa(&self, hop: usize) -> (f64, f64) {
        (self.kappa_plus[hop - 1], self.kappa_minus[hop - 1])
    }

    pub fn set_kappa(&mut self, hop: usize, plus: f64, minus: f64) {
        self.kappa_plus[hop - 1] = plus;
        self.kappa_minus[hop - 1] = minus;
    }

    /// Node i in 2..h.
    pub fn lambda(&self, node: usize) -> f64 {
        self.lambda[node - 2]
    }

    pub fn set_lambda(&mut self, node: usize, v: f64) {
        self.lambda[node - 2] = v;
    }
}

/// (Rc, R_1..R_{h−1}, ρ_1..ρ_h) in bits/symbol.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatePoint {
    pub rc: f64,
    pub r: Vec<f64>,
    pub rho: Vec<f64>,
}

impl RatePoint {
    pub fn zeros(h: usize) -> Self {
        RatePoint { rc: 0.0, r: vec![0.0; h - 1], rho: vec![0.0; h] }
    }

    pub fn h(&self) -> usize {
        self.rho.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.rho.len() < 2 || self.r.len() + 1 != self.rho.len() {
            return Err(usage("rate point needs h−1 communication and h local rates"));
        }
        let ok = std::iter::once(&self.rc).chain(&self.r).chain(&self.rho).all(|v| v.is_finite() && *v >= 0.0);
        if !ok {
            return Err(usage("rate point coordinates must be finite and nonnegative"));
        }
        Ok(())
    }

    /// Coordinates as (Rc, R_1.., ρ_1..).
    pub fn coords(&self) -> Vec<f64> {
        std::iter::once(self.rc).chain(self.r.iter().copied()).chain(self.rho.iter().copied()).collect()
    }

    pub fn from_coords(h: usize, c: &[f64]) -> Self {
        RatePoint { rc: c[0], r: c[1..h].to_vec(), rho: c[h..2 * h].to_vec() }
    }
}

/// One inequality lhs ≥ rhs (+ margin) with its evaluation.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConstraintRow {
    pub label: String,
    pub lhs: f64,
    pub rhs: f64,
    /// lhs − rhs.
    pub slack: f64,
    pub ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub subset: Option<Vec<IndexPair>>,
    pub redundant: bool,
}

impl ConstraintRow {
    pub fn new(label: impl Into<String>, lhs: f64, rhs: f64, margin: f64) -> Self {
        ConstraintRow {
            label: label.into(),
            lhs,
            rhs,
            slack: lhs - rhs,
            ok: lhs - rhs >= margin,
            subset: None,
            redundant: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConstraintReport {
    pub margin: f64,
    pub rows: Vec<ConstraintRow>,
    /// Non-redundant rows with the least slack.
    pub binding: Vec<String>,
    pub pass: bool,
}

impl ConstraintReport {
    fn finish(margin: f64, rows: Vec<ConstraintRow>) -> Self {
        let live = rows.iter().filter(|r| !r.redundant);
        let min = live.clone().map(|r| r.slack).fold(f64::INFINITY, f64::min);
        let binding = live.filter(|r| r.slack <= min + 1e-9).map(|r| r.label.clone()).collect();
        let pass = rows.iter().all(|r| r.ok);
        ConstraintReport { margin, rows, binding, pass }
    }
}

/// Constant auxiliaries need no codebook, so their rows hold at zero rate.
fn all_constant(spec: &AuxSpec, labels: impl IntoIterator<Item = String>) -> Result<bool> {
    for l in labels {
        if !spec.is_constant(&l)? {
            return Ok(false);
        }
    }
    Ok(true)
}

fn fmt_set(s: &[IndexPair]) -> String {
    let parts: Vec<String> = s.iter().map(|p| p.to_string()).collect();
    format!("{{{}}}", parts.join(","))
}

/// Right-hand sides of the two codebook-collision families for one S:
/// (I(X_1..X_h; A_{J_S^c}), I(X_1; A_{J_S^c})).
pub fn thm1_rhs(spec: &AuxSpec, s: &[IndexPair]) -> Result<(f64, f64)> {
    let h = spec.h();
    let jc: Vec<String> = j_complement(h, s).into_iter().map(a_label).collect();
    if jc.is_empty() {
        return Ok((0.0, 0.0));
    }
    let xs = spec.network.x_labels();
    Ok((spec.info(&xs, &jc, &[])?, spec.info(&[x_label(1)], &jc, &[])?))
}

/// Subsets of the pairs, as bitmasks over generation order, that exclude (1,h).
pub fn thm1_subsets(h: usize) -> Vec<u64> {
    let np = h * (h - 1) / 2;
    assert!(np < 64, "too many pairs for subset enumeration");
    (0..1u64 << np).filter(|m| m & 1 == 0).collect()
}

pub fn mask_pairs(h: usize, mask: u64) -> Vec<IndexPair> {
    order_pairs(h).into_iter().enumerate().filter(|(k, _)| mask >> k & 1 == 1).map(|(_, p)| p).collect()
}

/// Codebook-collision constraints for every S ∌ (1,h):
/// Σ_{F∖S}(μ⁺+μ⁻) ≥ I(X_1..X_h; A_{J_S^c}) and Σ_{F∖S} μ⁺ ≥ I(X_1; A_{J_S^c}).
///
/// A row is redundant when adding one more pair to S leaves its right-hand
/// side unchanged; right-hand sides only shrink as S grows, so this is the
/// same as domination by any superset.
pub fn thm1_check(rates: &CodebookRates, spec: &AuxSpec, margin: f64) -> Result<ConstraintReport> {
    rates.validate()?;
    let h = spec.h();
    let np = h * (h - 1) / 2;
    let masks = thm1_subsets(h);
    let mut rhs = std::collections::HashMap::new();
    for &m in &masks {
        rhs.insert(m, thm1_rhs(spec, &mask_pairs(h, m))?);
    }
    let mut rows = Vec::new();
    for &m in &masks {
        let s = mask_pairs(h, m);
        let (mut tot, mut plus) = (0.0, 0.0);
        for k in (0..np).filter(|k| m >> k & 1 == 0) {
            tot += rates.mu_plus[k] + rates.mu_minus[k];
            plus += rates.mu_plus[k];
        }
        let (r_tot, r_plus) = rhs[&m];
        let row_margin = if all_constant(spec, j_complement(h, &s).into_iter().map(a_label))? { 0.0 } else { margin };
        let extensions: Vec<(f64, f64)> = (1..np).filter(|k| m >> k & 1 == 0).map(|k| rhs[&(m | 1 << k)]).collect();
        let mut row = ConstraintRow::new(format!("S={} mu+ + mu-", fmt_set(&s)), tot, r_tot, row_margin);
        row.subset = Some(s.clone());
        row.redundant = extensions.iter().any(|e| (e.0 - r_tot).abs() <= ZERO_CMI);
        rows.push(row);
        let mut row = ConstraintRow::new(format!("S={} mu+", fmt_set(&s)), plus, r_plus, row_margin);
        row.subset = Some(s);
        row.redundant = extensions.iter().any(|e| (e.1 - r_plus).abs() <= ZERO_CMI);
        rows.push(row);
    }
    Ok(ConstraintReport::finish(margin, rows))
}

/// Per-hop constraints for node i (hop i−1 → i).
pub fn thm2_check(rates: &CodebookRates, spec: &AuxSpec, node: usize, margin: f64) -> Result<ConstraintReport> {
    rates.validate()?;
    let h = spec.h();
    if node < 2 || node > h {
        return Err(usage(format!("node {node} has no incoming hop")));
    }
    let a = spec.all_a_labels();
    let pair = [x_label(node - 1), x_label(node)];
    let b = b_label(node - 1);
    let (kp, km) = rates.kappa(node - 1);
    let lam = rates.lambda(node);
    let b_const = spec.is_constant(&b)?;
    let bc_margin = if b_const && spec.is_constant(&c_label(node))? { 0.0 } else { margin };
    let b_margin = if b_const { 0.0 } else { margin };
    let rows = vec![
        ConstraintRow::new(
            format!("node {node}: kappa+ + kappa- + lambda"),
            kp + km + lam,
            spec.info(&pair, &[b.clone(), c_label(node)], &a)?,
            bc_margin,
        ),
        ConstraintRow::new(
            format!("node {node}: kappa+ + kappa-"),
            kp + km,
            spec.info(&pair, std::slice::from_ref(&b), &a)?,
            b_margin,
        ),
        ConstraintRow::new(
            format!("node {node}: kappa+"),
            kp,
            spec.info(&[x_label(node - 1)], &[b], &a)?,
            b_margin,
        ),
    ];
    Ok(ConstraintReport::finish(margin, rows))
}

/// All per-hop constraints, nodes 2..h.
pub fn thm2_check_all(rates: &CodebookRates, spec: &AuxSpec, margin: f64) -> Result<ConstraintReport> {
    let mut rows = Vec::new();
    for node in 2..=spec.h() {
        rows.extend(thm2_check(rates, spec, node, margin)?.rows);
    }
    Ok(ConstraintReport::finish(margin, rows))
}

/// I(X_ℓ; B_{ℓ,ℓ+1} | A), the part of κ_ℓ⁺ recovered from the action at node ℓ.
pub fn hop_recovered(spec: &AuxSpec, hop: usize) -> Result<f64> {
    spec.info(&[x_label(hop)], &[b_label(hop)], &spec.all_a_labels())
}

/// I(X_1; A_{1,2..h}).
pub fn source_recovered(spec: &AuxSpec) -> Result<f64> {
    let a1: Vec<String> = (2..=spec.h()).map(|j| a_label(IndexPair::new(1, j))).collect();
    spec.info(&[x_label(1)], &a1, &[])
}

/// Resources used by the coordination scheme under `mode`.
///
/// In action-dependent mode, R_i also carries κ_i⁺ because hop i forwards k_i⁺.
pub fn resource_map(rates: &CodebookRates, mode: Mode, spec: &AuxSpec) -> Result<RatePoint> {
    rates.validate()?;
    spec.check_mode(mode)?;
    let h = spec.h();
    if rates.h != h {
        return Err(usage("codebook rates and auxiliary system disagree on the node count"));
    }
    let pairs = order_pairs(h);
    let mu_p = |p: IndexPair| rates.mu_plus(p);
    let first: Vec<IndexPair> = (2..=h).map(|j| IndexPair::new(1, j)).collect();
    let sum_first_plus: f64 = first.iter().map(|&p| mu_p(p)).sum();
    let sum_first_minus: f64 = first.iter().map(|&p| rates.mu_minus(p)).sum();
    let mut pt = RatePoint::zeros(h);
    match mode {
        Mode::Functional => {
            if rates.kappa_plus.iter().chain(&rates.kappa_minus).any(|&k| k > 0.0) {
                return Err(usage("functional mode has no B codebooks; kappa must be 0"));
            }
            pt.rc = sum_first_minus;
            for l in 1..h {
                pt.r[l - 1] = first.iter().filter(|p| p.j > l).map(|&p| mu_p(p)).sum();
            }
            pt.rho[0] = sum_first_plus - source_recovered(spec)?;
            for i in 2..=h {
                pt.rho[i - 1] = rates.lambda(i);
            }
        }
        Mode::Unrestricted => {
            pt.rc = rates.kappa_minus.iter().sum::<f64>() + rates.mu_minus.iter().sum::<f64>();
            for i in 1..h {
                pt.r[i - 1] = rates.kappa(i).0
                    + pairs.iter().filter(|p| p.i <= i && i < p.j).map(|&p| mu_p(p)).sum::<f64>();
            }
            let mut a1b: Vec<String> = first.iter().map(|&p| a_label(p)).collect();
            a1b.push(b_label(1));
            pt.rho[0] = sum_first_plus + rates.kappa(1).0 - spec.info(&[x_label(1)], &a1b, &[])?;
            for l in 2..h {
                pt.rho[l - 1] = rates.kappa(l).0 - hop_recovered(spec, l)?
                    + rates.lambda(l)
                    + pairs.iter().filter(|p| p.i == l).map(|&p| mu_p(p)).sum::<f64>();
            }
            pt.rho[h - 1] = rates.lambda(h);
        }
        Mode::ActionDependent => {
            pt.rc = rates.kappa_minus.iter().sum::<f64>() + sum_first_minus;
            let seed = |l: usize| -> Result<f64> { Ok(rates.kappa(l).0 - hop_recovered(spec, l)?) };
            for i in 1..h {
                let mut r = first.iter().filter(|p| p.j > i).map(|&p| mu_p(p)).sum::<f64>() + rates.kappa(i).0;
                for l in i + 1..h {
                    r += seed(l)?;
                }
                pt.r[i - 1] = r;
            }
            let mut rho1 = sum_first_plus - source_recovered(spec)?;
            for l in 1..h {
                rho1 += seed(l)?;
            }
            pt.rho[0] = rho1;
            for i in 2..=h {
                pt.rho[i - 1] = rates.lambda(i);
            }
        }
    }
    for v in std::iter::once(&mut pt.rc).chain(pt.r.iter_mut()).chain(pt.rho.iter_mut()) {
        *v = v.max(0.0);
    }
    Ok(pt)
}

/// Which randomness move a transfer performs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Transfer {
    /// Replace δ of node ℓ's local randomness by common randomness.
    ToCommon,
    /// Ship δ of upstream local randomness to node ℓ over the line.
    Forward,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModeFamily {
    Unrestricted,
    FunctionalOrActionDependent,
}

impl From<Mode> for ModeFamily {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Unrestricted => ModeFamily::Unrestricted,
            _ => ModeFamily::FunctionalOrActionDependent,
        }
    }
}

/// Moves δ bits/symbol of node ℓ's local-randomness requirement.
pub fn rate_transfer(point: &RatePoint, kind: Transfer, family: ModeFamily, node: usize, delta: f64) -> Result<RatePoint> {
    point.validate()?;
    let h = point.h();
    if node < 1 || node > h {
        return Err(usage(format!("node {node} outside 1..{h}")));
    }
    if !(delta >= 0.0) || delta > point.rho[node - 1] + 1e-12 {
        return Err(usage(format!("delta {delta} exceeds rho_{node} = {}", point.rho[node - 1])));
    }
    let mut out = point.clone();
    out.rho[node - 1] = (out.rho[node - 1] - delta).max(0.0);
    match kind {
        Transfer::ToCommon => out.rc += delta,
        Transfer::Forward => {
            if node < 2 {
                return Err(usage("forwarding needs a downstream node (ℓ ≥ 2)"));
            }
            match family {
                ModeFamily::Unrestricted => {
                    out.rho[node - 2] += delta;
                    out.r[node - 2] += delta;
                }
                ModeFamily::FunctionalOrActionDependent => {
                    out.rho[0] += delta;
                    for r in &mut out.r[..node - 1] {
                        *r += delta;
                    }
                }
            }
        }
    }
    Ok(out)
}
