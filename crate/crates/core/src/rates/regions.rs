use crate::error::{usage, Result};
use crate::line::{assemble, x_label, z_label, ChainCheck, NetworkSpec};
use crate::JointPmf;
use serde::Serialize;

use super::{ConstraintRow, RatePoint};

/// Default membership tolerance in bits.
pub const REGION_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RegionReport {
    pub region: String,
    pub applicable: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    pub preconditions: Vec<ChainCheck>,
    pub rows: Vec<ConstraintRow>,
    pub tolerance: f64,
    pub pass: bool,
}

impl RegionReport {
    fn inapplicable(region: &str, reason: String, preconditions: Vec<ChainCheck>, tol: f64) -> Self {
        RegionReport {
            region: region.into(),
            applicable: false,
            reason: Some(reason),
            preconditions,
            rows: vec![],
            tolerance: tol,
            pass: false,
        }
    }

    fn finish(region: &str, preconditions: Vec<ChainCheck>, rows: Vec<ConstraintRow>, tol: f64) -> Self {
        let pass = rows.iter().all(|r| r.ok);
        RegionReport { region: region.into(), applicable: true, reason: None, preconditions, rows, tolerance: tol, pass }
    }

    pub fn row(&self, label: &str) -> Option<&ConstraintRow> {
        self.rows.iter().find(|r| r.label == label)
    }
}

fn check_point(point: &RatePoint, h: usize) -> Result<()> {
    point.validate()?;
    if point.h() != h {
        return Err(usage(format!("rate point is for {} nodes, network has {h}", point.h())));
    }
    Ok(())
}

fn labels(range: impl IntoIterator<Item = usize>, f: fn(usize) -> String) -> Vec<String> {
    range.into_iter().map(f).collect()
}

fn info(p: &JointPmf, a: &[String], b: &[String], c: &[String]) -> Result<f64> {
    let s = crate::line::strs;
    p.info_measure(&s(a), &s(b), &s(c))
}

/// Nonempty-or-empty subsets of `items`.
fn subsets(items: &[usize]) -> Vec<Vec<usize>> {
    (0..1usize << items.len())
        .map(|m| items.iter().enumerate().filter(|(k, _)| m >> k & 1 == 1).map(|(_, &v)| v).collect())
        .collect()
}

fn fmt_nodes(s: &[usize]) -> String {
    let parts: Vec<String> = s.iter().map(|v| v.to_string()).collect();
    format!("{{{}}}", parts.join(","))
}

fn target_check(network: &NetworkSpec, joint: &JointPmf, tol: f64) -> Result<ChainCheck> {
    let xs = network.x_labels();
    let xs: Vec<&str> = xs.iter().map(String::as_str).collect();
    let l1 = joint.marginalize(&xs)?.l1(&network.target)?;
    Ok(ChainCheck { name: "action marginal equals target".into(), cmi: l1, ok: l1 <= tol.max(REGION_TOL) })
}

/// Membership in the functional-mode region for a given Z-spec over
/// (X_1..X_h, Z_2..Z_h), whose joint must factor as
/// Q_Z · Q_{X1|Z} · Π_ℓ Q_{Xℓ|Zℓ..Zh}.
pub fn functional_region_check(point: &RatePoint, network: &NetworkSpec, zspec: &JointPmf, tol: f64) -> Result<RegionReport> {
    let h = network.h;
    check_point(point, h)?;
    let xs = labels(1..=h, x_label);
    let zs = labels(2..=h, z_label);
    let mut pre = vec![target_check(network, zspec, tol)?];
    let s = crate::line::strs;
    let mut kernels = vec![zspec.condition_on(&s(&zs), &[])?, zspec.condition_on(&["X1"], &s(&zs))?];
    for l in 2..=h {
        let tail = labels(l..=h, z_label);
        kernels.push(zspec.condition_on(&[x_label(l).as_str()], &s(&tail))?);
    }
    let mut order = xs.clone();
    order.extend(zs.iter().cloned());
    let ordered = zspec.marginalize(&s(&order))?;
    let rebuilt = assemble(ordered.axes().to_vec(), &kernels)?;
    let l1 = rebuilt.l1(&ordered)?;
    pre.push(ChainCheck { name: "factorization Q_Z Q_X1|Z prod Q_Xl|Zl..Zh".into(), cmi: l1, ok: l1 <= REGION_TOL.max(tol) });
    pre.push(ChainCheck {
        name: "X1 ⫫ X2..Xh | Z".into(),
        cmi: info(zspec, &xs[..1], &xs[1..], &zs)?,
        ok: true,
    });
    if let Some(bad) = pre.iter().find(|c| !c.ok) {
        return Ok(RegionReport::inapplicable("functional", format!("precondition failed: {}", bad.name), pre, tol));
    }
    let mut rows = Vec::new();
    for i in 1..h {
        let ztail = labels(i + 1..=h, z_label);
        rows.push(ConstraintRow::new(
            format!("R{i} >= I(X1; Z{}..Z{h})", i + 1),
            point.r[i - 1],
            info(zspec, &xs[..1], &ztail, &[])?,
            -tol,
        ));
        let i_all = info(zspec, &xs, &ztail, &[])?;
        for sset in subsets(&(i + 1..=h).collect::<Vec<_>>()) {
            let xsub: Vec<String> = sset.iter().map(|&k| x_label(k)).collect();
            let rhs = i_all + info(zspec, &xsub, &[], &ztail)?;
            let lhs = point.rc + point.r[i - 1] + sset.iter().map(|&k| point.rho[k - 1]).sum::<f64>();
            rows.push(ConstraintRow::new(format!("Rc + R{i} + rho{}", fmt_nodes(&sset)), lhs, rhs, -tol));
        }
    }
    let base = info(zspec, &xs[1..], &zs, &xs[..1])?;
    for t in subsets(&(2..=h).collect::<Vec<_>>()) {
        let xt: Vec<String> = t.iter().map(|&k| x_label(k)).collect();
        let mut cond = xs[..1].to_vec();
        cond.extend(zs.iter().cloned());
        let rhs = base + info(zspec, &xt, &[], &cond)?;
        let lhs = point.rc + point.rho[0] + t.iter().map(|&k| point.rho[k - 1]).sum::<f64>();
        rows.push(ConstraintRow::new(format!("Rc + rho1 + rho{}", fmt_nodes(&t)), lhs, rhs, -tol));
    }
    Ok(RegionReport::finish("functional", pre, rows, tol))
}

/// Region when ρ_2..ρ_h are zero and Z_i = X_i.
pub fn zero_local_region_check(point: &RatePoint, network: &NetworkSpec, tol: f64) -> Result<RegionReport> {
    let h = network.h;
    check_point(point, h)?;
    let t = &network.target;
    let xs = labels(1..=h, x_label);
    let mut rows = Vec::new();
    for l in 1..h {
        let tail = labels(l + 1..=h, x_label);
        rows.push(ConstraintRow::new(format!("R{l} >= I(X1; X{}..X{h})", l + 1), point.r[l - 1], info(t, &xs[..1], &tail, &[])?, -tol));
        rows.push(ConstraintRow::new(
            format!("Rc + R{l} >= H(X{}..X{h})", l + 1),
            point.rc + point.r[l - 1],
            info(t, &tail, &[], &[])?,
            -tol,
        ));
    }
    rows.push(ConstraintRow::new(
        format!("Rc + rho1 >= H(X2..X{h} | X1)"),
        point.rc + point.rho[0],
        info(t, &xs[1..], &[], &xs[..1])?,
        -tol,
    ));
    Ok(RegionReport::finish("zero-local", vec![], rows, tol))
}

/// Region with abundant common randomness: Rc > H(X_2..X_h | X_1).
pub fn large_cr_region_check(point: &RatePoint, network: &NetworkSpec, tol: f64) -> Result<RegionReport> {
    let h = network.h;
    check_point(point, h)?;
    let t = &network.target;
    let xs = labels(1..=h, x_label);
    let need = info(t, &xs[1..], &[], &xs[..1])?;
    let pre = vec![ChainCheck { name: format!("Rc > H(X2..X{h} | X1) = {need}"), cmi: need, ok: point.rc > need }];
    if point.rc <= need {
        return Ok(RegionReport::inapplicable("large-cr", "theorem inapplicable: common randomness too small".into(), pre, tol));
    }
    let mut rows = Vec::new();
    for i in 1..=h {
        rows.push(ConstraintRow::new(format!("rho{i} >= 0"), point.rho[i - 1], 0.0, -tol));
    }
    for i in 1..h {
        let tail = labels(i + 1..=h, x_label);
        rows.push(ConstraintRow::new(format!("R{i} >= I(X1; X{}..X{h})", i + 1), point.r[i - 1], info(t, &xs[..1], &tail, &[])?, -tol));
    }
    Ok(RegionReport::finish("large-cr", pre, rows, tol))
}

/// Region for deterministic downstream actions, H(X_2..X_h | X_1) = 0.
pub fn deterministic_region_check(point: &RatePoint, network: &NetworkSpec, tol: f64) -> Result<RegionReport> {
    let h = network.h;
    check_point(point, h)?;
    let t = &network.target;
    let xs = labels(1..=h, x_label);
    let residual = info(t, &xs[1..], &[], &xs[..1])?;
    let pre = vec![ChainCheck { name: format!("H(X2..X{h} | X1) = 0"), cmi: residual, ok: residual <= REGION_TOL }];
    if residual > REGION_TOL {
        return Ok(RegionReport::inapplicable("deterministic", "remark inapplicable: downstream actions are not functions of X1".into(), pre, tol));
    }
    let rows = (1..h)
        .map(|l| {
            let tail = labels(l + 1..=h, x_label);
            Ok(ConstraintRow::new(format!("R{l} >= H(X{}..X{h})", l + 1), point.r[l - 1], info(t, &tail, &[], &[])?, -tol))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RegionReport::finish("deterministic", pre, rows, tol))
}

fn chain_checks(p: &JointPmf, seq: &[String], what: &str, tol: f64) -> Result<Vec<ChainCheck>> {
    let mut out = Vec::new();
    for k in 1..seq.len().saturating_sub(1) {
        let cmi = info(p, &seq[..k], &seq[k + 1..], &seq[k..k + 1])?;
        out.push(ChainCheck { name: format!("{what}: link at {}", seq[k]), cmi, ok: cmi <= tol.max(REGION_TOL) });
    }
    Ok(out)
}

/// Right-hand sides of the zero-common-randomness region for a Markov line,
/// as (label, lhs-coordinates, rhs). Communication rows cover 1 ≤ i ≤ j ≤ h
/// with i < h; local rows cover j = 1..h.
pub fn markov_rows(network: &NetworkSpec, zspec: &JointPmf) -> Result<Vec<(String, Vec<usize>, f64)>> {
    let h = network.h;
    let x = |k: usize| vec![x_label(k)];
    let z = |k: usize| vec![z_label(k)];
    let xr = |a: usize, b: usize| labels(a..=b, x_label);
    let mut out = Vec::new();
    // Coordinates index (Rc, R1.., rho1..) as in RatePoint::coords.
    for i in 1..h {
        for j in i..=h {
            let rhs = if i == j {
                info(zspec, &[x_label(i), x_label(i + 1)], &z(i), &[])?
            } else if j < h {
                info(zspec, &xr(i + 1, j), &[], &x(i))? + info(zspec, &x(i), &z(i), &[])? + info(zspec, &x(j + 1), &z(j), &x(j))?
            } else {
                info(zspec, &xr(i + 1, h), &[], &x(i))? + info(zspec, &x(i), &z(i), &[])?
            };
            let mut coords = vec![i];
            coords.extend((i + 1..=j).map(|k| h - 1 + k));
            out.push((format!("comm i={i} j={j}"), coords, rhs));
        }
    }
    for j in 1..=h {
        let rhs = if j == 1 {
            info(zspec, &x(2), &z(1), &x(1))?
        } else if j < h {
            info(zspec, &xr(2, j), &[], &x(1))? + info(zspec, &x(j + 1), &z(j), &x(j))?
        } else {
            info(zspec, &xr(2, h), &[], &x(1))?
        };
        out.push((format!("local j={j}"), (1..=j).map(|k| h - 1 + k).collect(), rhs));
    }
    Ok(out)
}

/// Zero-common-randomness region for Markov targets with a Z-spec over
/// (X_1..X_h, Z_1..Z_{h−1}) satisfying X1 − Z1 − X2 − … − Z_{h−1} − X_h.
pub fn markov_region_check(point: &RatePoint, network: &NetworkSpec, zspec: &JointPmf, tol: f64) -> Result<RegionReport> {
    let h = network.h;
    check_point(point, h)?;
    let mut pre = vec![target_check(network, zspec, tol)?];
    let mut long = Vec::new();
    for k in 1..=h {
        long.push(x_label(k));
        if k < h {
            long.push(z_label(k));
        }
    }
    pre.extend(chain_checks(zspec, &long, "auxiliary chain", tol)?);
    pre.extend(chain_checks(&network.target, &network.x_labels(), "action chain", tol)?);
    if let Some(bad) = pre.iter().find(|c| !c.ok) {
        return Ok(RegionReport::inapplicable("markov", format!("precondition failed: {} (value {})", bad.name, bad.cmi), pre, tol));
    }
    let c = point.coords();
    let rows = markov_rows(network, zspec)?
        .into_iter()
        .map(|(label, coords, rhs)| ConstraintRow::new(label, coords.iter().map(|&k| c[k]).sum(), rhs, -tol))
        .collect();
    Ok(RegionReport::finish("markov", pre, rows, tol))
}
