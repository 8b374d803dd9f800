//! Exact and Monte Carlo evaluation of the coordination criterion.
//!
//! Exact quantities enumerate x1 blocks, every uniform index and every
//! staircase branch; selection seeds are never enumerated one by one, the
//! branch weights come straight from the staircase seed counts.

use crate::caps;
use crate::codebooks::{Codebook, IndexBundle, Rv, Sampling};
use crate::codec::{Posterior, Scheme};
use crate::error::{check_cap, usage, Result};
use crate::line::{a_label, b_label, c_label, order_pairs, pair_index, x_label, AuxSpec, IndexPair, Mode};
use crate::prob::{block_decode, block_encode};
use crate::rates::CodebookRates;
use crate::rng::{self, Seed};
use rayon::prelude::*;
use serde::Serialize;

/// Induced conditional of x2..xh blocks given the x1 block.
#[derive(Clone, Debug, Serialize)]
pub struct ExactInduced {
    pub n: usize,
    /// Block alphabet size per node.
    pub block_sizes: Vec<usize>,
    /// Q_{X1}^{⊗n}.
    pub x1_weights: Vec<f64>,
    /// Row-major [x1][x2..xh], node 2 most significant.
    pub conditional: Vec<f64>,
    /// Source-weighted mass of branches that hit a degenerate posterior.
    pub degenerate_mass: f64,
}

impl ExactInduced {
    pub fn rest_len(&self) -> usize {
        self.block_sizes[1..].iter().product()
    }

    pub fn row(&self, x1: usize) -> &[f64] {
        let r = self.rest_len();
        &self.conditional[x1 * r..(x1 + 1) * r]
    }

    /// Q_{X1}^{⊗n} · Q_induced as a flat joint over all h blocks.
    pub fn joint(&self) -> Vec<f64> {
        let r = self.rest_len();
        self.conditional.iter().enumerate().map(|(k, w)| self.x1_weights[k / r] * w).collect()
    }
}

fn enumeration_check(what: &str, scheme: &Scheme<'_>, x1_blocks: usize) -> Result<()> {
    let sz = &scheme.cb.sizes;
    let h = scheme.h();
    let first: Vec<usize> = scheme.first_pairs().iter().map(|&p| pair_index(h, p)).collect();
    let mut est: u128 = x1_blocks as u128;
    for &k in &first {
        est = est.saturating_mul(sz.m_minus[k] as u128);
    }
    est = est.saturating_mul(scheme.source_candidates().min(scheme.ell_source).max(1) as u128);
    for i in 1..h {
        est = est.saturating_mul(sz.k_minus[i - 1] as u128);
        if scheme.hop_selects_pub() {
            est = est.saturating_mul(sz.k_plus[i - 1].min(scheme.ell_hop[i - 1]) as u128);
        }
        for p in scheme.local_pairs_of(i + 1) {
            let k = pair_index(h, p);
            est = est.saturating_mul((sz.m_minus[k] * sz.m_plus[k]) as u128);
        }
        est = est.saturating_mul(sz.l[i - 1] as u128);
    }
    check_cap(what, est, caps::enumeration_cap())
}

fn block_sizes(scheme: &Scheme<'_>) -> Result<Vec<usize>> {
    let n = scheme.n() as u32;
    let mut out = Vec::new();
    for a in scheme.spec.network.x_axes() {
        let s = (a.size as u128).saturating_pow(n);
        check_cap("block alphabet", s, caps::tensor_cap())?;
        out.push(s as usize);
    }
    let total = caps::product(out.iter().copied());
    check_cap("block joint", total, caps::tensor_cap())?;
    Ok(out)
}

struct Acc<'s> {
    scheme: &'s Scheme<'s>,
    rest_sizes: &'s [usize],
    rest_alphas: &'s [usize],
    out: Vec<f64>,
    degenerate: f64,
}

impl Acc<'_> {
    /// Hop `i` onward, with actions for nodes 1..=i already in `actions`.
    fn downstream(&mut self, i: usize, b: &mut IndexBundle, actions: &mut Vec<Vec<u16>>, w: f64) -> Result<()> {
        let s = self.scheme;
        let h = s.h();
        if i == h {
            let sym = actions[1..]
                .iter()
                .zip(self.rest_sizes)
                .zip(self.rest_alphas)
                .fold(0usize, |acc, ((a, &bs), &al)| acc * bs + block_encode(&widen(a), al));
            self.out[sym] += w;
            return Ok(());
        }
        let sz = &s.cb.sizes;
        let km = sz.k_minus[i - 1];
        for k in 0..km {
            b.k_minus[i - 1] = k;
            let w1 = w / km as f64;
            if s.hop_selects_pub() {
                let post = Posterior::new(&s.hop_likelihood(i, &actions[i - 1], b), s.ell_hop[i - 1])?;
                if post.degenerate {
                    self.degenerate += w1;
                }
                for (kp, p) in post.induced().into_iter().enumerate() {
                    if p > 0.0 {
                        b.k_plus[i - 1] = kp as u64;
                        self.node(i + 1, b, actions, w1 * p)?;
                    }
                }
            } else {
                self.node(i + 1, b, actions, w1)?;
            }
        }
        Ok(())
    }

    /// Local draws and the action at `node`, then the next hop.
    fn node(&mut self, node: usize, b: &mut IndexBundle, actions: &mut Vec<Vec<u16>>, w: f64) -> Result<()> {
        let s = self.scheme;
        let locals = s.local_pairs_of(node);
        self.locals(node, &locals, 0, b, actions, w)
    }

    fn locals(&mut self, node: usize, locals: &[IndexPair], at: usize, b: &mut IndexBundle, actions: &mut Vec<Vec<u16>>, w: f64) -> Result<()> {
        let s = self.scheme;
        let sz = &s.cb.sizes;
        if at == locals.len() {
            let l = sz.l[node - 2];
            for v in 0..l {
                b.l[node - 2] = v;
                actions.push(s.emit(node, b));
                self.downstream(node, b, actions, w / l as f64)?;
                actions.pop();
            }
            return Ok(());
        }
        let k = pair_index(s.h(), locals[at]);
        let count = sz.m_minus[k] * sz.m_plus[k];
        for v in 0..count {
            b.m_plus[k] = v / sz.m_minus[k];
            b.m_minus[k] = v % sz.m_minus[k];
            self.locals(node, locals, at + 1, b, actions, w / count as f64)?;
        }
        Ok(())
    }
}

fn widen(a: &[u16]) -> Vec<usize> {
    a.iter().map(|&x| x as usize).collect()
}

/// Enumerates all m⁻_{1,·} tuples, calling `f` with the bundle and the weight.
fn for_each_cr_first(scheme: &Scheme<'_>, mut f: impl FnMut(&mut IndexBundle, f64) -> Result<()>) -> Result<()> {
    let h = scheme.h();
    let sz = &scheme.cb.sizes;
    let ks: Vec<usize> = scheme.first_pairs().iter().map(|&p| pair_index(h, p)).collect();
    let total: u64 = ks.iter().map(|&k| sz.m_minus[k]).product();
    let mut b = IndexBundle::zeros(h);
    for mut c in 0..total {
        for &k in ks.iter().rev() {
            b.m_minus[k] = c % sz.m_minus[k];
            c /= sz.m_minus[k];
        }
        f(&mut b, 1.0 / total as f64)?;
    }
    Ok(())
}

fn x1_block_weights(scheme: &Scheme<'_>, blocks: usize) -> Vec<f64> {
    let m = scheme.x1_marginal();
    (0..blocks).map(|x| block_decode(x, m.len(), scheme.n()).iter().map(|&a| m[a]).product()).collect()
}

/// Exact conditional law of the coordination scheme's actions given x1.
pub fn exact_induced(scheme: &Scheme<'_>) -> Result<ExactInduced> {
    let sizes = block_sizes(scheme)?;
    enumeration_check("exact enumeration", scheme, sizes[0])?;
    let n = scheme.n();
    let alpha1 = scheme.x1_marginal().len();
    let rest: Vec<usize> = sizes[1..].to_vec();
    let alphas: Vec<usize> = scheme.spec.network.x_axes().iter().map(|a| a.size).collect();
    let rest_len: usize = rest.iter().product();
    let rows: Vec<(Vec<f64>, f64)> = (0..sizes[0])
        .into_par_iter()
        .map(|x1sym| -> Result<(Vec<f64>, f64)> {
            let x1: Vec<u16> = block_decode(x1sym, alpha1, n).into_iter().map(|a| a as u16).collect();
            let mut acc = Acc { scheme, rest_sizes: &rest, rest_alphas: &alphas[1..], out: vec![0.0; rest_len], degenerate: 0.0 };
            for_each_cr_first(scheme, |b, w| {
                let post = Posterior::new(&scheme.source_likelihood(&x1, b), scheme.ell_source)?;
                if post.degenerate {
                    acc.degenerate += w;
                }
                for (c, p) in post.induced().into_iter().enumerate() {
                    if p > 0.0 {
                        scheme.set_source_candidate(b, c as u64);
                        let mut actions = vec![x1.clone()];
                        acc.downstream(1, b, &mut actions, w * p)?;
                    }
                }
                Ok(())
            })?;
            Ok((acc.out, acc.degenerate))
        })
        .collect::<Result<_>>()?;
    let x1_weights = x1_block_weights(scheme, sizes[0]);
    let degenerate_mass = rows.iter().zip(&x1_weights).map(|((_, d), w)| d * w).sum();
    Ok(ExactInduced {
        n,
        block_sizes: sizes,
        x1_weights,
        conditional: rows.into_iter().flat_map(|(r, _)| r).collect(),
        degenerate_mass,
    })
}

/// Joint law of all h actions in the allied scheme, flat over blocks.
pub fn allied_output(scheme: &Scheme<'_>) -> Result<Vec<f64>> {
    let sizes = block_sizes(scheme)?;
    enumeration_check("allied enumeration", scheme, sizes[0])?;
    let n = scheme.n();
    let alpha1 = scheme.x1_marginal().len();
    let rest: Vec<usize> = sizes[1..].to_vec();
    let alphas: Vec<usize> = scheme.spec.network.x_axes().iter().map(|a| a.size).collect();
    let rest_len: usize = rest.iter().product();
    let mut out = vec![0.0; sizes[0] * rest_len];
    let cands = scheme.source_candidates();
    for_each_cr_first(scheme, |b, w| {
        for c in 0..cands {
            scheme.set_source_candidate(b, c);
            let g = scheme.source_given(b);
            let q = scheme.q_x1();
            for x1sym in 0..sizes[0] {
                let x1 = block_decode(x1sym, alpha1, n);
                let p: f64 = x1.iter().zip(&g).map(|(&x, &gt)| q.prob(gt, x)).product();
                if p == 0.0 {
                    continue;
                }
                let mut acc = Acc { scheme, rest_sizes: &rest, rest_alphas: &alphas[1..], out: vec![0.0; rest_len], degenerate: 0.0 };
                let mut actions = vec![x1.iter().map(|&a| a as u16).collect()];
                acc.downstream(1, &mut b.clone(), &mut actions, w * p / cands as f64)?;
                for (k, v) in acc.out.into_iter().enumerate() {
                    out[x1sym * rest_len + k] += v;
                }
            }
        }
        Ok(())
    })?;
    Ok(out)
}

/// Target law Q^{⊗n} as a flat vector over the h blocks.
pub fn target_blocks(spec: &AuxSpec, n: usize) -> Result<Vec<f64>> {
    Ok(spec.network.target.product_extend(n)?.weights().to_vec())
}

/// ‖Q_{X1}^{⊗n} · Q_induced − Q^{⊗n}‖₁.
pub fn coordination_tv(exact: &ExactInduced, spec: &AuxSpec) -> Result<f64> {
    let target = target_blocks(spec, exact.n)?;
    let joint = exact.joint();
    if target.len() != joint.len() {
        return Err(usage("induced law and target have different shapes"));
    }
    Ok(joint.iter().zip(&target).map(|(a, b)| (a - b).abs()).sum())
}

/// Σ_{m⁻} |M⁻|⁻¹ ‖Q̂_{X̂1|m⁻} − Q̂_{X̂1}‖₁ for the allied node-1 output.
pub fn cr_independence(scheme: &Scheme<'_>) -> Result<f64> {
    let sizes = block_sizes(scheme)?;
    let n = scheme.n();
    let alpha1 = scheme.x1_marginal().len();
    let cands = scheme.source_candidates();
    let mut per: Vec<(Vec<f64>, f64)> = Vec::new();
    let est = (sizes[0] as u128) * (cands as u128);
    check_cap("cr-independence enumeration", est, caps::enumeration_cap())?;
    for_each_cr_first(scheme, |b, w| {
        let mut row = vec![0.0; sizes[0]];
        for c in 0..cands {
            scheme.set_source_candidate(b, c);
            let g = scheme.source_given(b);
            let q = scheme.q_x1();
            for (x1sym, r) in row.iter_mut().enumerate() {
                let x1 = block_decode(x1sym, alpha1, n);
                *r += x1.iter().zip(&g).map(|(&x, &gt)| q.prob(gt, x)).product::<f64>() / cands as f64;
            }
        }
        per.push((row, w));
        Ok(())
    })?;
    let mut mean = vec![0.0; sizes[0]];
    for (row, w) in &per {
        for (m, r) in mean.iter_mut().zip(row) {
            *m += w * r;
        }
    }
    Ok(per.iter().map(|(row, w)| w * row.iter().zip(&mean).map(|(a, b)| (a - b).abs()).sum::<f64>()).sum())
}

/// L1 between Q^{⊗n} and the pieced law built from Q_{X1|A}^{⊗n} and the
/// per-hop resolvability ratios Q̂^{(j,m)}(x_{j−1},x_j)/Q̂^{(j,m)}(x_{j−1}),
/// averaged over all m± uniformly.
pub fn piecing_check(cb: &Codebook, spec: &AuxSpec) -> Result<f64> {
    let h = spec.h();
    let n = cb.n;
    let sz = &cb.sizes;
    let pairs = order_pairs(h);
    let alphas: Vec<usize> = spec.network.x_axes().iter().map(|a| a.size).collect();
    let blocks: Vec<usize> = alphas.iter().map(|&a| a.pow(n as u32)).collect();
    let total_blocks: usize = blocks.iter().product();
    let m_total: u64 = pairs.iter().map(|&p| {
        let k = pair_index(h, p);
        sz.m_plus[k] * sz.m_minus[k]
    }).product();
    let hop_work: u64 = (1..h).map(|i| sz.k_plus[i - 1] * sz.k_minus[i - 1] * sz.l[i - 1]).sum();
    let est = (m_total as u128) * (total_blocks as u128 + (hop_work as u128) * (blocks[0] * blocks[1]) as u128);
    check_cap("piecing enumeration", est, caps::enumeration_cap())?;
    let s = crate::line::strs;
    let a_labels: Vec<String> = pairs.iter().map(|&p| a_label(p)).collect();
    let joint = spec.joint();
    let q1 = joint.condition_on(&[x_label(1).as_str()], &s(&a_labels))?;
    let mut qj = Vec::new();
    for j in 2..=h {
        let mut given = a_labels.clone();
        given.push(b_label(j - 1));
        given.push(c_label(j));
        qj.push(joint.condition_on(&[x_label(j - 1).as_str(), x_label(j).as_str()], &s(&given))?);
    }
    let mut pieced = vec![0.0; total_blocks];
    let mut b = IndexBundle::zeros(h);
    for mut mflat in 0..m_total {
        for &p in pairs.iter().rev() {
            let k = pair_index(h, p);
            let c = sz.m_plus[k] * sz.m_minus[k];
            let v = mflat % c;
            mflat /= c;
            b.m_plus[k] = v / sz.m_minus[k];
            b.m_minus[k] = v % sz.m_minus[k];
        }
        let a_words: Vec<&[u16]> = pairs.iter().map(|&p| cb.lookup_unchecked(Rv::A(p), &b)).collect();
        let a_given = |t: usize| -> usize {
            pairs.iter().zip(&a_words).fold(0, |g, (&p, w)| g * cb.book(Rv::A(p)).alphabet + w[t] as usize)
        };
        let ag: Vec<usize> = (0..n).map(a_given).collect();
        let f1: Vec<f64> = (0..blocks[0])
            .map(|x| block_decode(x, alphas[0], n).iter().zip(&ag).map(|(&xt, &g)| q1.prob(g, xt)).product())
            .collect();
        // Per hop: ratio table over (x_{j−1}, x_j) blocks.
        let mut ratios: Vec<Vec<f64>> = Vec::new();
        for j in 2..=h {
            let (bp, bc) = (blocks[j - 2], blocks[j - 1]);
            let mut t2 = vec![0.0; bp * bc];
            let (kp, km, l) = (sz.k_plus[j - 2], sz.k_minus[j - 2], sz.l[j - 2]);
            let q = &qj[j - 2];
            let bsize = cb.book(Rv::B(j - 1)).alphabet;
            let csize = cb.book(Rv::C(j)).alphabet;
            let xa = alphas[j - 1];
            let count = (kp * km * l) as f64;
            for k in 0..kp * km {
                b.k_plus[j - 2] = k / km;
                b.k_minus[j - 2] = k % km;
                for lv in 0..l {
                    b.l[j - 2] = lv;
                    let bw = cb.lookup_unchecked(Rv::B(j - 1), &b);
                    let cw = cb.lookup_unchecked(Rv::C(j), &b);
                    let g: Vec<usize> = (0..n).map(|t| (ag[t] * bsize + bw[t] as usize) * csize + cw[t] as usize).collect();
                    for xp in 0..bp {
                        let lp = block_decode(xp, alphas[j - 2], n);
                        for xc in 0..bc {
                            let lc = block_decode(xc, xa, n);
                            let p: f64 = (0..n).map(|t| q.prob(g[t], lp[t] * xa + lc[t])).product();
                            t2[xp * bc + xc] += p / count;
                        }
                    }
                }
            }
            for xp in 0..bp {
                let den: f64 = t2[xp * bc..(xp + 1) * bc].iter().sum();
                for v in &mut t2[xp * bc..(xp + 1) * bc] {
                    *v = if den > 0.0 { *v / den } else { 0.0 };
                }
            }
            ratios.push(t2);
        }
        for (flat, out) in pieced.iter_mut().enumerate() {
            let mut rem = flat;
            let mut xs = vec![0usize; h];
            for k in (0..h).rev() {
                xs[k] = rem % blocks[k];
                rem /= blocks[k];
            }
            let mut v = f1[xs[0]];
            for j in 2..=h {
                if v == 0.0 {
                    break;
                }
                v *= ratios[j - 2][xs[j - 2] * blocks[j - 1] + xs[j - 1]];
            }
            *out += v / m_total as f64;
        }
    }
    let target = target_blocks(spec, n)?;
    Ok(pieced.iter().zip(&target).map(|(a, b)| (a - b).abs()).sum())
}

/// Mean and standard error over codebook seeds.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EnsembleStat {
    pub values: Vec<f64>,
    pub mean: f64,
    pub se: f64,
}

impl EnsembleStat {
    pub fn from_values(values: Vec<f64>) -> Self {
        let k = values.len() as f64;
        let mean = values.iter().sum::<f64>() / k;
        let var = if values.len() > 1 { values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1.0) } else { 0.0 };
        EnsembleStat { values, mean, se: (var / k).sqrt() }
    }
}

/// A per-codebook-seed metric averaged over seeds.
pub fn ensemble(
    spec: &AuxSpec,
    rates: &CodebookRates,
    mode: Mode,
    n: usize,
    seeds: &[Seed],
    sampling: Sampling,
    metric: impl Fn(&Scheme<'_>) -> Result<f64> + Sync,
) -> Result<EnsembleStat> {
    let values = seeds
        .par_iter()
        .map(|&s| {
            let cb = Codebook::build(spec, rates, n, s, sampling)?;
            let scheme = Scheme::new(&cb, spec, rates, mode)?;
            metric(&scheme)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EnsembleStat::from_values(values))
}

/// Exact coordination TV of one realized scheme.
pub fn exact_tv(scheme: &Scheme<'_>) -> Result<f64> {
    coordination_tv(&exact_induced(scheme)?, scheme.spec)
}

/// Per-codebook Monte Carlo outcome.
#[derive(Clone, Debug, Serialize)]
pub struct SeedEstimate {
    pub codebook_seed: Seed,
    pub tv: f64,
    /// Σ over cells of sqrt(p̂(1−p̂)/N); an approximate one-sigma scale.
    pub radius: f64,
    pub exact_tv: Option<f64>,
    pub degenerate_trials: u64,
}

/// Resource use of the schedule.
#[derive(Clone, Debug, Serialize)]
pub struct ResourceAudit {
    pub hop_bits: Vec<u64>,
    pub node_bits: Vec<u64>,
    pub rate_point: crate::rates::RatePoint,
    pub budget_violations: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SimReport {
    pub n: usize,
    pub trials: u64,
    /// "block" for the full block histogram, "PROXY per-letter" otherwise.
    pub estimator: String,
    pub estimates: Vec<SeedEstimate>,
    pub mean_tv: f64,
    pub se_tv: f64,
    pub mean_exact_tv: Option<f64>,
    pub audit: Option<ResourceAudit>,
    pub note: String,
}

const BLOCK_HISTOGRAM_CAP: usize = 1 << 20;

/// Plug-in TV of the empirical action histogram against the target,
/// one codebook per seed.
#[allow(clippy::too_many_arguments)]
pub fn mc_coordination_tv(
    spec: &AuxSpec,
    rates: &CodebookRates,
    mode: Mode,
    n: usize,
    trials: u64,
    codebook_seeds: &[Seed],
    seed: Seed,
    sampling: Sampling,
    with_exact: bool,
) -> Result<SimReport> {
    let alphas: Vec<usize> = spec.network.x_axes().iter().map(|a| a.size).collect();
    let block_cells = alphas.iter().fold(1u128, |a, &s| a.saturating_mul((s as u128).saturating_pow(n as u32)));
    let block = block_cells <= BLOCK_HISTOGRAM_CAP as u128;
    let target: Vec<f64> = if block { target_blocks(spec, n)? } else { spec.network.target.weights().to_vec() };
    let mut estimates = Vec::new();
    let mut audit = None;
    for &cs in codebook_seeds {
        let cb = Codebook::build(spec, rates, n, cs, sampling)?;
        let scheme = Scheme::new(&cb, spec, rates, mode)?;
        if audit.is_none() {
            audit = Some(ResourceAudit {
                hop_bits: scheme.hop_bits().to_vec(),
                node_bits: scheme.node_bits().to_vec(),
                rate_point: scheme.budget.clone(),
                budget_violations: scheme.budget_violations(),
            });
        }
        let trial_seed = rng::derive(seed, &[cs]);
        let traces: Vec<(Vec<usize>, u32)> = (0..trials)
            .into_par_iter()
            .map(|k| {
                let t = scheme.run_trial(trial_seed, k)?;
                let cells = if block {
                    let sym = t.actions.iter().zip(&alphas).fold(0usize, |acc, (a, &al)| {
                        acc * al.pow(n as u32) + block_encode(&widen(a), al)
                    });
                    vec![sym]
                } else {
                    (0..n).map(|tt| t.actions.iter().zip(&alphas).fold(0usize, |acc, (a, &al)| acc * al + a[tt] as usize)).collect()
                };
                Ok((cells, t.degenerate))
            })
            .collect::<Result<_>>()?;
        let mut counts = vec![0u64; target.len()];
        let mut degenerate_trials = 0;
        let mut total = 0u64;
        for (cells, d) in &traces {
            degenerate_trials += (*d > 0) as u64;
            for &c in cells {
                counts[c] += 1;
                total += 1;
            }
        }
        let nn = total.max(1) as f64;
        let mut tv = 0.0;
        let mut radius = 0.0;
        for (c, q) in counts.iter().zip(&target) {
            let p = *c as f64 / nn;
            tv += (p - q).abs();
            radius += (p * (1.0 - p) / nn).sqrt();
        }
        let exact_tv = if with_exact && block { Some(exact_tv(&scheme)?) } else { None };
        estimates.push(SeedEstimate { codebook_seed: cs, tv, radius, exact_tv, degenerate_trials });
    }
    let stat = EnsembleStat::from_values(estimates.iter().map(|e| e.tv).collect());
    let exacts: Option<Vec<f64>> = estimates.iter().map(|e| e.exact_tv).collect();
    Ok(SimReport {
        n,
        trials,
        estimator: if block { "block".into() } else { "PROXY per-letter".into() },
        mean_tv: stat.mean,
        se_tv: stat.se,
        mean_exact_tv: exacts.filter(|v| !v.is_empty()).map(|v| v.iter().sum::<f64>() / v.len() as f64),
        estimates,
        audit,
        note: "plug-in TV is biased upward by about the radius when the true TV is near zero; radii use a normal approximation".into(),
    })
}
