//! The allied generation scheme and the line coordination scheme.
//!
//! Every random choice is a keyed draw `(seed, trial, purpose, ...)`, so the
//! allied run and the coordination run share common randomness and selection
//! seeds by construction, and any trial can be replayed from its seed alone.

use crate::codebooks::{Codebook, IndexBundle, IndexSizes, Rv};
use crate::error::{usage, Result};
use crate::line::{a_label, b_label, c_label, order_pairs, pair_index, psi, x_label, AuxSpec, IndexPair, Mode};
use crate::prob::{Kernel, StaircaseCertificate, StaircaseTable};
use crate::rates::{resource_map, CodebookRates, RatePoint};
use crate::rng::{self, bits_for, sample_index, Seed};
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Draw purposes, the second key word of every draw.
pub(crate) mod key {
    pub const CR_M_MINUS: u64 = 1;
    pub const CR_K_MINUS: u64 = 2;
    pub const LOCAL_M_PLUS: u64 = 3;
    pub const LOCAL_L: u64 = 4;
    pub const SOURCE_SEED: u64 = 5;
    pub const HOP_SEED: u64 = 6;
    pub const X1: u64 = 7;
    pub const ALLIED_M_PLUS: u64 = 8;
    pub const ALLIED_X1: u64 = 9;
}

/// Exact posterior over candidates and its staircase table.
#[derive(Clone, Debug)]
pub struct Posterior {
    pub posterior: Vec<f64>,
    pub table: StaircaseTable,
    /// All likelihoods were zero and the uniform prior was used instead.
    pub degenerate: bool,
}

impl Posterior {
    /// Bayes over a uniform prior, then a staircase over the positive-posterior
    /// candidates in ascending posterior order.
    pub fn new(likelihood: &[f64], ell: u64) -> Result<Self> {
        if likelihood.is_empty() {
            return Err(usage("no candidates"));
        }
        let total: f64 = likelihood.iter().sum();
        let degenerate = !(total > 0.0);
        let posterior: Vec<f64> = if degenerate {
            vec![1.0 / likelihood.len() as f64; likelihood.len()]
        } else {
            likelihood.iter().map(|w| w / total).collect()
        };
        let mut order: Vec<usize> = (0..posterior.len()).filter(|&c| posterior[c] > 0.0).collect();
        order.sort_by(|&a, &b| posterior[a].total_cmp(&posterior[b]).then(a.cmp(&b)));
        let table = StaircaseTable::build(&posterior, &order, ell)?;
        Ok(Posterior { posterior, table, degenerate })
    }

    /// Selected candidate for a seed in 1..=ell.
    pub fn select(&self, seed: u64) -> usize {
        self.table.apply(seed)
    }

    /// Probability of each candidate under a uniform seed.
    pub fn induced(&self) -> Vec<f64> {
        self.table.induced(self.posterior.len())
    }

    pub fn certificate(&self) -> StaircaseCertificate {
        self.table.certificate(&self.posterior)
    }
}

/// Selected candidate with its certificate.
#[derive(Clone, Debug, Serialize)]
pub struct Selection {
    pub candidate: usize,
    pub certificate: StaircaseCertificate,
    pub degenerate: bool,
}

/// Picks a candidate from the exact posterior with a seed uniform on 1..=ell.
pub fn posterior_select(likelihood: &[f64], ell: u64, seed: u64) -> Result<Selection> {
    if seed < 1 || seed > ell {
        return Err(usage(format!("seed {seed} outside 1..={ell}")));
    }
    let p = Posterior::new(likelihood, ell)?;
    Ok(Selection { candidate: p.select(seed), certificate: p.certificate(), degenerate: p.degenerate })
}

/// ceil(2^{n·max(0, r)}), snapped like codebook sizes.
pub fn seed_range(n: usize, r: f64) -> Result<u64> {
    crate::codebooks::book_size(n, r.max(0.0))
}

/// One recorded draw.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Draw {
    pub what: String,
    pub node: usize,
    pub range: u64,
    pub value: u64,
}

/// Everything one trial did.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    pub seed: Seed,
    pub trial: u64,
    pub allied: bool,
    pub indices: IndexBundle,
    /// Action block per node.
    pub actions: Vec<Vec<u16>>,
    pub hop_bits: Vec<u64>,
    pub node_bits: Vec<u64>,
    pub draws: Vec<Draw>,
    pub degenerate: u32,
    pub budget_violations: Vec<String>,
}

impl Trace {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("trace serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| usage(format!("trace: {e}")))
    }
}

/// Precomputed pieces of a scheme over a realized codebook.
pub struct Scheme<'a> {
    pub cb: &'a Codebook,
    pub spec: &'a AuxSpec,
    pub mode: Mode,
    pub rates: CodebookRates,
    pub budget: RatePoint,
    h: usize,
    n: usize,
    /// Pairs (1,j) in generation order.
    first: Vec<IndexPair>,
    x1_marginal: Vec<f64>,
    /// X_1 | A_{1,·} with given axes in `first` order.
    q_x1: Kernel<f64>,
    /// Per hop i: X_i | A_Ψ(i), B_i.
    q_hop: Vec<Kernel<f64>>,
    /// Per node 2..h: C_i letter → X_i letter.
    c_to_x: Vec<Vec<usize>>,
    pub ell_source: u64,
    /// Per hop 1..h−1.
    pub ell_hop: Vec<u64>,
    hop_bits: Vec<u64>,
    node_bits: Vec<u64>,
    hop_counts: Vec<u64>,
    node_counts: Vec<u64>,
}

impl<'a> Scheme<'a> {
    pub fn new(cb: &'a Codebook, spec: &'a AuxSpec, rates: &CodebookRates, mode: Mode) -> Result<Self> {
        let h = spec.h();
        let n = cb.n;
        if cb.h() != h || rates.h != h {
            return Err(usage("codebook, rates and auxiliary system disagree on the node count"));
        }
        if IndexSizes::new(rates, n)? != cb.sizes {
            return Err(usage("codebook was built for different rates"));
        }
        let budget = resource_map(rates, mode, spec)?;
        let joint = spec.joint();
        let first: Vec<IndexPair> = psi(h, 1);
        let first_labels: Vec<String> = first.iter().map(|&p| a_label(p)).collect();
        let s = crate::line::strs;
        let q_x1 = joint.condition_on(&[x_label(1).as_str()], &s(&first_labels))?;
        let x1_marginal = joint.marginalize(&[x_label(1).as_str()])?.weights().to_vec();
        let mut q_hop = Vec::new();
        for i in 1..h {
            let mut given: Vec<String> = psi(h, i).into_iter().map(a_label).collect();
            given.push(b_label(i));
            q_hop.push(joint.condition_on(&[x_label(i).as_str()], &s(&given))?);
        }
        let mut c_to_x = Vec::new();
        for i in 2..=h {
            let k = joint.condition_on(&[x_label(i).as_str()], &[c_label(i).as_str()])?;
            c_to_x.push(k.as_function().ok_or_else(|| {
                crate::Error::Precondition(format!("X{i} is not a function of C{i}; the scheme declares X{i} from C{i}"))
            })?);
        }
        let mi = crate::rates::source_recovered(spec)?;
        let ell_source = seed_range(n, first.iter().map(|&p| rates.mu_plus(p)).sum::<f64>() - mi)?;
        let mut ell_hop = Vec::new();
        for i in 1..h {
            ell_hop.push(seed_range(n, rates.kappa(i).0 - crate::rates::hop_recovered(spec, i)?)?);
        }
        let mut scheme = Scheme {
            cb,
            spec,
            mode,
            rates: rates.clone(),
            budget,
            h,
            n,
            first,
            x1_marginal,
            q_x1,
            q_hop,
            c_to_x,
            ell_source,
            ell_hop,
            hop_bits: vec![],
            node_bits: vec![],
            hop_counts: vec![],
            node_counts: vec![],
        };
        scheme.schedule();
        Ok(scheme)
    }

    pub fn h(&self) -> usize {
        self.h
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Pairs whose indices a node draws locally: only in unrestricted mode do
    /// pairs (i,j) with i > 1 carry non-constant auxiliaries.
    fn local_pairs(&self, node: usize) -> Vec<IndexPair> {
        if node == 1 || self.mode != Mode::Unrestricted {
            return vec![];
        }
        order_pairs(self.h).into_iter().filter(|p| p.i == node).collect()
    }

    fn hop_selects(&self) -> bool {
        self.mode != Mode::Functional
    }

    /// Static per-hop and per-node bit counts of the mode's schedule.
    fn schedule(&mut self) {
        let h = self.h;
        let sz = &self.cb.sizes;
        let mp = |p: IndexPair| bits_for(sz.m_plus[pair_index(h, p)]);
        let (mut hop_bits, mut hop_counts) = (vec![0; h - 1], vec![0; h - 1]);
        for i in 1..h {
            let carried: Vec<IndexPair> = match self.mode {
                Mode::Unrestricted => order_pairs(h).into_iter().filter(|p| p.i <= i && i < p.j).collect(),
                _ => self.first.iter().copied().filter(|p| p.j > i).collect(),
            };
            for p in carried {
                hop_bits[i - 1] += mp(p);
                hop_counts[i - 1] += 1;
            }
            if self.hop_selects() {
                hop_bits[i - 1] += bits_for(sz.k_plus[i - 1]);
                hop_counts[i - 1] += 1;
            }
            if self.mode == Mode::ActionDependent {
                for l in i + 1..h {
                    hop_bits[i - 1] += bits_for(self.ell_hop[l - 1]);
                    hop_counts[i - 1] += 1;
                }
            }
        }
        let (mut node_bits, mut node_counts) = (vec![0; h], vec![0; h]);
        node_bits[0] = bits_for(self.ell_source);
        node_counts[0] = 1;
        match self.mode {
            Mode::Functional => {}
            Mode::ActionDependent => {
                for l in 1..h {
                    node_bits[0] += bits_for(self.ell_hop[l - 1]);
                    node_counts[0] += 1;
                }
            }
            Mode::Unrestricted => {
                node_bits[0] += bits_for(self.ell_hop[0]);
                node_counts[0] += 1;
            }
        }
        for i in 2..=h {
            node_bits[i - 1] += bits_for(sz.l[i - 2]);
            node_counts[i - 1] += 1;
            for p in self.local_pairs(i) {
                node_bits[i - 1] += mp(p);
                node_counts[i - 1] += 1;
            }
            if self.mode == Mode::Unrestricted && i < h {
                node_bits[i - 1] += bits_for(self.ell_hop[i - 1]);
                node_counts[i - 1] += 1;
            }
        }
        self.hop_bits = hop_bits;
        self.node_bits = node_bits;
        self.hop_counts = hop_counts;
        self.node_counts = node_counts;
    }

    /// Schedule overruns: bits above n·rate plus one bit per index.
    pub fn budget_violations(&self) -> Vec<String> {
        let n = self.n as f64;
        let mut out = Vec::new();
        for i in 1..self.h {
            let allowed = n * self.budget.r[i - 1] + self.hop_counts[i - 1] as f64 + 1e-9;
            if self.hop_bits[i - 1] as f64 > allowed {
                out.push(format!("hop {i}: {} bits > n*R{i} + {} = {allowed:.4}", self.hop_bits[i - 1], self.hop_counts[i - 1]));
            }
        }
        for i in 1..=self.h {
            let allowed = n * self.budget.rho[i - 1] + self.node_counts[i - 1] as f64 + 1e-9;
            if self.node_bits[i - 1] as f64 > allowed {
                out.push(format!("node {i}: {} bits > n*rho{i} + {} = {allowed:.4}", self.node_bits[i - 1], self.node_counts[i - 1]));
            }
        }
        out
    }

    pub fn hop_bits(&self) -> &[u64] {
        &self.hop_bits
    }

    pub fn node_bits(&self) -> &[u64] {
        &self.node_bits
    }

    /// Number of candidate tuples for node 1's selection.
    pub(crate) fn source_candidates(&self) -> u64 {
        self.first.iter().map(|&p| self.cb.sizes.m_plus[pair_index(self.h, p)]).product()
    }

    /// Writes candidate `c` (mixed radix over `first`, last fastest) into m⁺.
    pub(crate) fn set_source_candidate(&self, bundle: &mut IndexBundle, mut c: u64) {
        for &p in self.first.iter().rev() {
            let k = pair_index(self.h, p);
            let size = self.cb.sizes.m_plus[k];
            bundle.m_plus[k] = c % size;
            c /= size;
        }
    }

    /// Likelihood of x1 under every candidate m⁺_{1,·}, given m⁻_{1,·} in `bundle`.
    pub(crate) fn source_likelihood(&self, x1: &[u16], bundle: &IndexBundle) -> Vec<f64> {
        let mut b = bundle.clone();
        (0..self.source_candidates())
            .map(|c| {
                self.set_source_candidate(&mut b, c);
                let g = self.given_letters(&self.first, None, &b);
                x1.iter().zip(&g).map(|(&x, &gt)| self.q_x1.prob(gt, x as usize)).product()
            })
            .collect()
    }

    /// Per-letter given-index over A codewords of `pairs`, then optionally B_hop.
    fn given_letters(&self, pairs: &[IndexPair], hop: Option<usize>, bundle: &IndexBundle) -> Vec<usize> {
        let mut g = vec![0usize; self.n];
        let mut push = |rv: Rv| {
            let book = self.cb.book(rv);
            let w = self.cb.lookup_unchecked(rv, bundle);
            for t in 0..self.n {
                g[t] = g[t] * book.alphabet + w[t] as usize;
            }
        };
        for &p in pairs {
            push(Rv::A(p));
        }
        if let Some(i) = hop {
            push(Rv::B(i));
        }
        g
    }

    /// Likelihood of x_i under every k_i⁺, given the rest of `bundle`.
    pub(crate) fn hop_likelihood(&self, hop: usize, x: &[u16], bundle: &IndexBundle) -> Vec<f64> {
        let pairs = psi(self.h, hop);
        let mut b = bundle.clone();
        let q = &self.q_hop[hop - 1];
        (0..self.cb.sizes.k_plus[hop - 1])
            .map(|k| {
                b.k_plus[hop - 1] = k;
                let g = self.given_letters(&pairs, Some(hop), &b);
                x.iter().zip(&g).map(|(&xt, &gt)| q.prob(gt, xt as usize)).product()
            })
            .collect()
    }

    /// Action block at node i ≥ 2 from its C codeword.
    pub(crate) fn emit(&self, node: usize, bundle: &IndexBundle) -> Vec<u16> {
        let map = &self.c_to_x[node - 2];
        self.cb.lookup_unchecked(Rv::C(node), bundle).iter().map(|&c| map[c as usize] as u16).collect()
    }

    /// x1 block from Q_{X1|A}^{⊗n} at the codewords selected by `bundle`.
    fn allied_x1(&self, bundle: &IndexBundle, seed: Seed, trial: u64) -> Vec<u16> {
        let g = self.given_letters(&self.first, None, bundle);
        let mut r = rng::stream(seed, &[trial, key::ALLIED_X1]);
        g.iter().map(|&gt| sample_index(self.q_x1.slice(gt), r.gen()) as u16).collect()
    }

    /// Source block drawn i.i.d. from the X1 marginal.
    pub fn draw_x1(&self, seed: Seed, trial: u64) -> Vec<u16> {
        let mut r = rng::stream(seed, &[trial, key::X1]);
        (0..self.n).map(|_| sample_index(&self.x1_marginal, r.gen()) as u16).collect()
    }

    pub fn x1_marginal(&self) -> &[f64] {
        &self.x1_marginal
    }

    /// One coordination trial from a fresh source block.
    pub fn run_trial(&self, seed: Seed, trial: u64) -> Result<Trace> {
        let x1 = self.draw_x1(seed, trial);
        self.run_from(x1, None, seed, trial)
    }

    /// Coordination trial from a given x1. With `replay_source` the node-1
    /// selection is replaced by those m⁺_{1,·} values.
    pub fn run_from(&self, x1: Vec<u16>, replay_source: Option<&[u64]>, seed: Seed, trial: u64) -> Result<Trace> {
        if x1.len() != self.n {
            return Err(usage("source block length differs from n"));
        }
        let mut t = self.empty_trace(seed, trial, false);
        self.draw_cr_first(&mut t);
        match replay_source {
            Some(m) => {
                if m.len() != self.first.len() {
                    return Err(usage("replayed source indices have the wrong length"));
                }
                for (&p, &v) in self.first.iter().zip(m) {
                    t.indices.m_plus[pair_index(self.h, p)] = v;
                }
            }
            None => {
                let post = Posterior::new(&self.source_likelihood(&x1, &t.indices), self.ell_source)?;
                let s = self.draw(&mut t, "source seed", 1, &[key::SOURCE_SEED], self.ell_source) + 1;
                self.set_source_candidate(&mut t.indices, post.select(s) as u64);
                t.degenerate += post.degenerate as u32;
            }
        }
        t.actions.push(x1);
        self.downstream(&mut t)?;
        Ok(t)
    }

    /// Allied trial: every index uniform, x1 generated from the A codewords.
    pub fn allied_generate(&self, seed: Seed, trial: u64) -> Result<Trace> {
        let mut t = self.empty_trace(seed, trial, true);
        self.draw_cr_first(&mut t);
        for &p in &self.first {
            let k = pair_index(self.h, p);
            t.indices.m_plus[k] = self.draw(&mut t, &format!("m+ {p}"), 1, &[key::ALLIED_M_PLUS, k as u64], self.cb.sizes.m_plus[k]);
        }
        let x1 = self.allied_x1(&t.indices, seed, trial);
        t.actions.push(x1);
        self.downstream(&mut t)?;
        Ok(t)
    }

    /// The selected m⁺_{1,·} of a trace, in generation order.
    pub fn source_indices(&self, t: &Trace) -> Vec<u64> {
        self.first.iter().map(|&p| t.indices.m_plus[pair_index(self.h, p)]).collect()
    }

    /// Recomputes a trace from its seed and trial number.
    pub fn replay(&self, t: &Trace) -> Result<Trace> {
        if t.allied {
            self.allied_generate(t.seed, t.trial)
        } else {
            self.run_trial(t.seed, t.trial)
        }
    }

    fn empty_trace(&self, seed: Seed, trial: u64, allied: bool) -> Trace {
        Trace {
            seed,
            trial,
            allied,
            indices: IndexBundle::zeros(self.h),
            actions: Vec::with_capacity(self.h),
            hop_bits: self.hop_bits.clone(),
            node_bits: self.node_bits.clone(),
            draws: Vec::new(),
            degenerate: 0,
            budget_violations: self.budget_violations(),
        }
    }

    fn draw(&self, t: &mut Trace, what: &str, node: usize, k: &[u64], range: u64) -> u64 {
        let mut path = vec![t.trial];
        path.extend_from_slice(k);
        let value = rng::uniform(t.seed, &path, range);
        t.draws.push(Draw { what: what.into(), node, range, value });
        value
    }

    fn draw_cr_first(&self, t: &mut Trace) {
        for &p in &self.first {
            let k = pair_index(self.h, p);
            t.indices.m_minus[k] = self.draw(t, &format!("m- {p}"), 0, &[key::CR_M_MINUS, k as u64], self.cb.sizes.m_minus[k]);
        }
    }

    /// Hops 1..h−1 given x1 and the first-row indices.
    fn downstream(&self, t: &mut Trace) -> Result<()> {
        let sz = &self.cb.sizes;
        for i in 1..self.h {
            t.indices.k_minus[i - 1] = self.draw(t, &format!("k- {i}"), 0, &[key::CR_K_MINUS, i as u64], sz.k_minus[i - 1]);
            if self.hop_selects() {
                let ell = self.ell_hop[i - 1];
                let post = Posterior::new(&self.hop_likelihood(i, &t.actions[i - 1], &t.indices), ell)?;
                let owner = if self.mode == Mode::ActionDependent { 1 } else { i };
                let s = self.draw(t, &format!("hop {i} seed"), owner, &[key::HOP_SEED, i as u64], ell) + 1;
                t.indices.k_plus[i - 1] = post.select(s) as u64;
                t.degenerate += post.degenerate as u32;
            }
            let node = i + 1;
            for p in self.local_pairs(node) {
                let k = pair_index(self.h, p);
                t.indices.m_minus[k] = self.draw(t, &format!("m- {p}"), 0, &[key::CR_M_MINUS, k as u64], sz.m_minus[k]);
                t.indices.m_plus[k] = self.draw(t, &format!("m+ {p}"), node, &[key::LOCAL_M_PLUS, k as u64], sz.m_plus[k]);
            }
            t.indices.l[node - 2] = self.draw(t, &format!("l {node}"), node, &[key::LOCAL_L, node as u64], sz.l[node - 2]);
            let x = self.emit(node, &t.indices);
            t.actions.push(x);
        }
        Ok(())
    }

    pub(crate) fn first_pairs(&self) -> &[IndexPair] {
        &self.first
    }

    pub(crate) fn local_pairs_of(&self, node: usize) -> Vec<IndexPair> {
        self.local_pairs(node)
    }

    pub(crate) fn q_x1(&self) -> &Kernel<f64> {
        &self.q_x1
    }

    pub(crate) fn hop_selects_pub(&self) -> bool {
        self.hop_selects()
    }

    pub(crate) fn source_given(&self, bundle: &IndexBundle) -> Vec<usize> {
        self.given_letters(&self.first, None, bundle)
    }
}

/// Runs `trials` independent coordination trials in parallel.
pub fn run_scheme(scheme: &Scheme<'_>, trials: u64, seed: Seed) -> Result<Vec<Trace>> {
    use rayon::prelude::*;
    (0..trials).into_par_iter().map(|k| scheme.run_trial(seed, k)).collect()
}
