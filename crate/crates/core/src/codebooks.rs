//! Nested random codebooks for the A, B and C auxiliaries.
//!
//! Index conventions are 0-based. A combined index for a pair, hop or node is
//! `plus * minus_size + minus`. Every codeword store lists its index slots
//! with its own slot last, so a store is a sequence of sub-codebooks sharing
//! the same parent indices.

use crate::caps;
use crate::error::{check_cap, usage, Result};
use crate::line::{a_label, b_label, c_label, order_pairs, pair_index, phi, phi_bar, psi, x_label, AuxSpec, IndexPair};
use crate::prob::{block_decode, is_typical, Kernel};
use crate::rates::CodebookRates;
use crate::rng::{self, sample_index, Seed};
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

/// How codewords of one sub-codebook are drawn.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Sampling {
    /// Independent letters from the conditional kernel.
    #[default]
    Iid,
    /// Systematic sampling of the block pmf: each codeword is still marginally
    /// distributed as the block kernel, and a sub-codebook reproduces the block
    /// pmf exactly whenever every block mass is a multiple of 1/size.
    Stratified,
}

/// Auxiliary whose codewords a store holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Rv {
    A(IndexPair),
    /// B on hop i → i+1.
    B(usize),
    /// C at node i.
    C(usize),
}

impl Rv {
    pub fn label(self) -> String {
        match self {
            Rv::A(p) => a_label(p),
            Rv::B(i) => b_label(i),
            Rv::C(i) => c_label(i),
        }
    }

    fn tag(self, h: usize) -> u64 {
        match self {
            Rv::A(p) => (1 << 32) | pair_index(h, p) as u64,
            Rv::B(i) => (2 << 32) | i as u64,
            Rv::C(i) => (3 << 32) | i as u64,
        }
    }
}

/// One coordinate of a composite index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Slot {
    /// Combined m± of the pair at this generation-order position.
    M(usize),
    /// Combined k± of a hop.
    K(usize),
    /// l of a node.
    L(usize),
}

/// ceil(2^{n·rate}), snapping values within 1e−9 of an integer.
pub fn book_size(n: usize, rate: f64) -> Result<u64> {
    let x = (n as f64 * rate).exp2();
    if !x.is_finite() || x > (1u64 << 40) as f64 {
        return Err(crate::Error::Resource { what: "codebook size".into(), needed: u128::MAX, cap: 1 << 40 });
    }
    let r = x.round();
    Ok(if (x - r).abs() <= 1e-9 * x.max(1.0) { r as u64 } else { x.ceil() as u64 }.max(1))
}

/// Index-set sizes for a block length.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexSizes {
    pub h: usize,
    pub n: usize,
    pub m_plus: Vec<u64>,
    pub m_minus: Vec<u64>,
    pub k_plus: Vec<u64>,
    pub k_minus: Vec<u64>,
    /// Per node 2..h.
    pub l: Vec<u64>,
}

impl IndexSizes {
    pub fn new(rates: &CodebookRates, n: usize) -> Result<Self> {
        rates.validate()?;
        let f = |v: &[f64]| v.iter().map(|&r| book_size(n, r)).collect::<Result<Vec<_>>>();
        Ok(IndexSizes {
            h: rates.h,
            n,
            m_plus: f(&rates.mu_plus)?,
            m_minus: f(&rates.mu_minus)?,
            k_plus: f(&rates.kappa_plus)?,
            k_minus: f(&rates.kappa_minus)?,
            l: f(&rates.lambda)?,
        })
    }

    pub fn slot_size(&self, s: Slot) -> u64 {
        match s {
            Slot::M(k) => self.m_plus[k] * self.m_minus[k],
            Slot::K(i) => self.k_plus[i - 1] * self.k_minus[i - 1],
            Slot::L(i) => self.l[i - 2],
        }
    }
}

/// A full realization of every index.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IndexBundle {
    pub m_plus: Vec<u64>,
    pub m_minus: Vec<u64>,
    pub k_plus: Vec<u64>,
    pub k_minus: Vec<u64>,
    /// Per node 2..h.
    pub l: Vec<u64>,
}

impl IndexBundle {
    pub fn zeros(h: usize) -> Self {
        let np = h * (h - 1) / 2;
        IndexBundle {
            m_plus: vec![0; np],
            m_minus: vec![0; np],
            k_plus: vec![0; h - 1],
            k_minus: vec![0; h - 1],
            l: vec![0; h - 1],
        }
    }

    pub fn slot_value(&self, s: Slot, sizes: &IndexSizes) -> u64 {
        match s {
            Slot::M(k) => self.m_plus[k] * sizes.m_minus[k] + self.m_minus[k],
            Slot::K(i) => self.k_plus[i - 1] * sizes.k_minus[i - 1] + self.k_minus[i - 1],
            Slot::L(i) => self.l[i - 2],
        }
    }

    pub fn in_range(&self, sizes: &IndexSizes) -> bool {
        let lt = |a: &[u64], b: &[u64]| a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x < y);
        lt(&self.m_plus, &sizes.m_plus)
            && lt(&self.m_minus, &sizes.m_minus)
            && lt(&self.k_plus, &sizes.k_plus)
            && lt(&self.k_minus, &sizes.k_minus)
            && lt(&self.l, &sizes.l)
    }
}

/// Codewords of one auxiliary, flattened: word `f` is `words[f*n..(f+1)*n]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Book {
    pub rv: Rv,
    pub alphabet: usize,
    pub slots: Vec<Slot>,
    pub dims: Vec<u64>,
    pub words: Vec<u16>,
}

impl Book {
    pub fn count(&self) -> u64 {
        self.dims.iter().product()
    }

    pub fn word(&self, flat: u64, n: usize) -> &[u16] {
        let f = flat as usize * n;
        &self.words[f..f + n]
    }

    pub fn flat_of(&self, bundle: &IndexBundle, sizes: &IndexSizes) -> u64 {
        self.slots.iter().zip(&self.dims).fold(0, |f, (&s, &d)| f * d + bundle.slot_value(s, sizes))
    }

    fn flat_of_values(&self, values: &[u64]) -> u64 {
        values.iter().zip(&self.dims).fold(0, |f, (&v, &d)| f * d + v)
    }
}

fn slots_of(h: usize, rv: Rv) -> Vec<Slot> {
    let m = |ps: Vec<IndexPair>| ps.into_iter().map(|p| Slot::M(pair_index(h, p))).collect::<Vec<_>>();
    match rv {
        Rv::A(p) => m(phi_bar(h, p)),
        Rv::B(i) => {
            let mut s = m(phi_bar(h, IndexPair::new(i, i + 1)));
            s.push(Slot::K(i));
            s
        }
        Rv::C(i) => {
            let mut s = m(psi(h, i));
            s.push(Slot::K(i - 1));
            s.push(Slot::L(i));
            s
        }
    }
}

/// Realized nested codebooks and the seed that produced them.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Codebook {
    pub n: usize,
    pub seed: Seed,
    pub sampling: Sampling,
    pub sizes: IndexSizes,
    /// A's in generation order, then B per hop, then C per node 2..h.
    pub books: Vec<Book>,
}

const STRATIFIED_BLOCK_CAP: u128 = 1 << 20;

/// Kernel of an auxiliary given its codebook parents, in parent order.
fn parent_kernel(spec: &AuxSpec, rv: Rv) -> Result<(Vec<Rv>, Kernel<f64>)> {
    let h = spec.h();
    let (parents, mut given): (Vec<Rv>, Vec<String>) = match rv {
        Rv::A(p) => {
            let ps = phi(h, p);
            (ps.iter().map(|&q| Rv::A(q)).collect(), ps.into_iter().map(a_label).collect())
        }
        Rv::B(i) => {
            let ps = phi_bar(h, IndexPair::new(i, i + 1));
            (ps.iter().map(|&q| Rv::A(q)).collect(), ps.into_iter().map(a_label).collect())
        }
        Rv::C(i) => {
            let ps = psi(h, i);
            let mut rvs: Vec<Rv> = ps.iter().map(|&q| Rv::A(q)).collect();
            rvs.push(Rv::B(i - 1));
            (rvs, ps.into_iter().map(a_label).collect())
        }
    };
    if let Rv::C(i) = rv {
        given.push(b_label(i - 1));
    }
    let g: Vec<&str> = given.iter().map(String::as_str).collect();
    let k = spec.joint().condition_on(&[rv.label().as_str()], &g)?;
    Ok((parents, k))
}

impl Codebook {
    pub fn build(spec: &AuxSpec, rates: &CodebookRates, n: usize, seed: Seed, sampling: Sampling) -> Result<Self> {
        if n == 0 {
            return Err(usage("block length must be positive"));
        }
        let h = spec.h();
        if rates.h != h {
            return Err(usage("codebook rates and auxiliary system disagree on the node count"));
        }
        let sizes = IndexSizes::new(rates, n)?;
        let mut rvs: Vec<Rv> = order_pairs(h).into_iter().map(Rv::A).collect();
        rvs.extend((1..h).map(Rv::B));
        rvs.extend((2..=h).map(Rv::C));
        let mut total: u128 = 0;
        for &rv in &rvs {
            let count = caps::product(slots_of(h, rv).iter().map(|&s| sizes.slot_size(s) as usize));
            total = total.saturating_add(count.saturating_mul(n as u128));
        }
        check_cap("codeword symbols", total, caps::tensor_cap())?;
        let mut cb = Codebook { n, seed, sampling, sizes, books: Vec::with_capacity(rvs.len()) };
        for rv in rvs {
            let book = cb.draw_book(spec, rv)?;
            cb.books.push(book);
        }
        Ok(cb)
    }

    fn draw_book(&self, spec: &AuxSpec, rv: Rv) -> Result<Book> {
        let h = spec.h();
        let n = self.n;
        let slots = slots_of(h, rv);
        let dims: Vec<u64> = slots.iter().map(|&s| self.sizes.slot_size(s)).collect();
        let own = *dims.last().unwrap();
        let parent_count: u64 = dims[..dims.len() - 1].iter().product();
        let (parents, kernel) = parent_kernel(spec, rv)?;
        let alphabet = kernel.output_len();
        if alphabet > u16::MAX as usize {
            return Err(usage(format!("{} alphabet too large", rv.label())));
        }
        let parent_books: Vec<&Book> = parents.iter().map(|&p| self.book(p)).collect();
        let projections: Vec<Vec<usize>> = parent_books
            .iter()
            .map(|b| b.slots.iter().map(|s| slots.iter().position(|x| x == s).expect("parent slots nest")).collect())
            .collect();
        let psizes: Vec<usize> = kernel.given_axes().iter().map(|a| a.size).collect();
        if matches!(self.sampling, Sampling::Stratified) {
            let block = (alphabet as u128).saturating_pow(n as u32);
            check_cap("stratified block alphabet", block, STRATIFIED_BLOCK_CAP)?;
        }
        let tag = rv.tag(h);
        let mut words = vec![0u16; (parent_count * own) as usize * n];
        let mut values = vec![0u64; dims.len()];
        for pf in 0..parent_count {
            let mut rem = pf;
            for k in (0..dims.len() - 1).rev() {
                values[k] = rem % dims[k];
                rem /= dims[k];
            }
            // Given-index of the kernel at each letter position.
            let mut g = vec![0usize; n];
            for ((pb, proj), &ps) in parent_books.iter().zip(&projections).zip(&psizes) {
                let pv: Vec<u64> = proj.iter().map(|&k| values[k]).collect();
                let w = pb.word(pb.flat_of_values(&pv), n);
                for t in 0..n {
                    g[t] = g[t] * ps + w[t] as usize;
                }
            }
            let base = (pf * own) as usize;
            match self.sampling {
                Sampling::Iid => {
                    for o in 0..own {
                        let flat = pf * own + o;
                        let mut r = rng::stream(self.seed, &[tag, flat]);
                        let out = &mut words[(base + o as usize) * n..(base + o as usize + 1) * n];
                        for t in 0..n {
                            out[t] = sample_index(kernel.slice(g[t]), r.gen()) as u16;
                        }
                    }
                }
                Sampling::Stratified => {
                    let mut r = rng::stream(self.seed, &[tag, pf, u64::MAX]);
                    let blocks = alphabet.pow(n as u32);
                    let mass = |sym: usize| -> f64 {
                        block_decode(sym, alphabet, n).iter().zip(&g).map(|(&a, &gt)| kernel.prob(gt, a)).product()
                    };
                    let u: f64 = r.gen();
                    let mut perm: Vec<u64> = (0..own).collect();
                    perm.shuffle(&mut r);
                    let mut sym = 0usize;
                    let mut cum = mass(0);
                    for (k, &slot) in perm.iter().enumerate() {
                        let q = (k as f64 + u) / own as f64;
                        while q >= cum && sym + 1 < blocks {
                            sym += 1;
                            cum += mass(sym);
                        }
                        let letters = block_decode(sym, alphabet, n);
                        let at = (base + slot as usize) * n;
                        for t in 0..n {
                            words[at + t] = letters[t] as u16;
                        }
                    }
                }
            }
        }
        Ok(Book { rv, alphabet, slots, dims, words })
    }

    pub fn h(&self) -> usize {
        self.sizes.h
    }

    pub fn book(&self, rv: Rv) -> &Book {
        let h = self.h();
        let np = h * (h - 1) / 2;
        let k = match rv {
            Rv::A(p) => pair_index(h, p),
            Rv::B(i) => np + i - 1,
            Rv::C(i) => np + h - 1 + i - 2,
        };
        &self.books[k]
    }

    /// Codeword of `rv` at the projection of `bundle` onto its slots.
    pub fn lookup(&self, rv: Rv, bundle: &IndexBundle) -> Result<&[u16]> {
        if !bundle.in_range(&self.sizes) {
            return Err(usage("index bundle out of range"));
        }
        Ok(self.lookup_unchecked(rv, bundle))
    }

    pub(crate) fn lookup_unchecked(&self, rv: Rv, bundle: &IndexBundle) -> &[u16] {
        let b = self.book(rv);
        b.word(b.flat_of(bundle, &self.sizes), self.n)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("codebook serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| usage(format!("codebook dump: {e}")))
    }
}

/// Number of source-chain index tuples whose codewords are jointly
/// δ-typical with the node-1 action block `y`.
///
/// The chain is A_{1,h}, A_{1,h−1}, …, A_{1,2}: each book is indexed by the
/// indices of all books before it plus its own.
pub fn typical_list_size(cb: &Codebook, spec: &AuxSpec, y: &[usize], delta: f64) -> Result<u64> {
    let h = spec.h();
    let n = cb.n;
    if y.len() != n {
        return Err(usage("action block length differs from the codebook"));
    }
    let chain: Vec<IndexPair> = (2..=h).rev().map(|j| IndexPair::new(1, j)).collect();
    let mut labels: Vec<String> = chain.iter().map(|&p| a_label(p)).collect();
    labels.push(x_label(1));
    let l: Vec<&str> = labels.iter().map(String::as_str).collect();
    let joint = spec.joint().marginalize(&l)?;
    let sizes = joint.sizes();
    let last = cb.book(Rv::A(chain[chain.len() - 1]));
    let total = last.count();
    check_cap("list enumeration", total as u128, caps::enumeration_cap())?;
    let books: Vec<&Book> = chain.iter().map(|&p| cb.book(Rv::A(p))).collect();
    let mut count = 0;
    let mut seq = vec![0usize; n];
    for flat in 0..total {
        // The last book's slots are exactly the chain's indices, in chain order.
        let mut rem = flat;
        let mut values = vec![0u64; last.dims.len()];
        for k in (0..values.len()).rev() {
            values[k] = rem % last.dims[k];
            rem /= last.dims[k];
        }
        seq.fill(0);
        for (k, b) in books.iter().enumerate() {
            let w = b.word(b.flat_of_values(&values[..=k]), n);
            for t in 0..n {
                seq[t] = seq[t] * sizes[k] + w[t] as usize;
            }
        }
        for t in 0..n {
            seq[t] = seq[t] * sizes[sizes.len() - 1] + y[t];
        }
        if is_typical(&seq, joint.weights(), delta) {
            count += 1;
        }
    }
    Ok(count)
}

/// Upper bound (k+1)·2^{n(Σν − I(D;Y) + 2δ·log₂K)} on the ensemble mean list size.
pub fn list_size_bound(n: usize, nu_sum: f64, mutual_info: f64, delta: f64, k: usize, joint_cardinality: usize) -> f64 {
    (k as f64 + 1.0) * (n as f64 * (nu_sum - mutual_info + 2.0 * delta * (joint_cardinality as f64).log2())).exp2()
}
