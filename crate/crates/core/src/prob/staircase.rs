use crate::error::{usage, Result};
use crate::scalar::Prob;
use serde::Serialize;

use super::pmf::Pmf;

/// Seed map f: {1..ell} → support built from cumulative cuts N_i = ⌊p_i·ell⌋.
///
/// Seeds in (N_{i−1}, N_i] map to `support[i]`; seeds above N_M map to the
/// last support symbol.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StaircaseTable {
    support: Vec<usize>,
    cuts: Vec<u64>,
    ell: u64,
}

/// Induced-vs-target accounting for one table.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct StaircaseCertificate {
    /// Target mass outside the ordered support.
    pub eps: f64,
    pub support_len: usize,
    pub ell: u64,
    /// M/ell when the order covers supp(q), else 2·eps + M/ell.
    pub bound: f64,
    pub covers_support: bool,
    /// ell < M: the bound is at least one and says nothing.
    pub vacuous: bool,
    /// Exact L1 between the induced pmf and the target.
    pub l1: f64,
}

/// Floor that snaps values within a relative 1e−9 of an integer.
fn snapped_floor(x: f64) -> u64 {
    let r = x.round();
    if (x - r).abs() <= 1e-9 * x.abs().max(1.0) {
        r as u64
    } else {
        x.floor() as u64
    }
}

impl StaircaseTable {
    pub fn build<F: Prob>(q: &[F], order: &[usize], ell: u64) -> Result<Self> {
        if ell == 0 {
            return Err(usage("seed range must be positive"));
        }
        if order.is_empty() {
            return Err(usage("support order is empty"));
        }
        for (k, &b) in order.iter().enumerate() {
            if b >= q.len() || order[..k].contains(&b) {
                return Err(usage(format!("bad support symbol {b}")));
            }
        }
        let mut cum = 0.0;
        let mut cuts = Vec::with_capacity(order.len());
        for &b in order {
            cum += q[b].to_f64_lossy();
            cuts.push(snapped_floor(cum * ell as f64).min(ell));
        }
        Ok(StaircaseTable { support: order.to_vec(), cuts, ell })
    }

    /// Table over the support of `q` in symbol order.
    pub fn over_support<F: Prob>(q: &[F], ell: u64) -> Result<Self> {
        let order: Vec<usize> = (0..q.len()).filter(|&a| q[a] > F::zero()).collect();
        Self::build(q, &order, ell)
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn cuts(&self) -> &[u64] {
        &self.cuts
    }

    pub fn ell(&self) -> u64 {
        self.ell
    }

    /// f(seed) for seed in 1..=ell.
    pub fn apply(&self, seed: u64) -> usize {
        debug_assert!((1..=self.ell).contains(&seed));
        let i = self.cuts.partition_point(|&c| c < seed);
        self.support[i.min(self.support.len() - 1)]
    }

    /// Number of seeds mapped to each support position.
    pub fn seed_counts(&self) -> Vec<u64> {
        let mut prev = 0;
        let mut out: Vec<u64> = self
            .cuts
            .iter()
            .map(|&c| {
                let n = c - prev;
                prev = c;
                n
            })
            .collect();
        *out.last_mut().unwrap() += self.ell - prev;
        out
    }

    /// Pmf of f(L) for L uniform on 1..=ell, over an alphabet of `len` symbols.
    pub fn induced(&self, len: usize) -> Vec<f64> {
        let mut p = vec![0.0; len];
        for (&b, n) in self.support.iter().zip(self.seed_counts()) {
            p[b] += n as f64 / self.ell as f64;
        }
        p
    }

    pub fn certificate<F: Prob>(&self, q: &[F]) -> StaircaseCertificate {
        let total: f64 = q.iter().map(|w| w.to_f64_lossy()).sum();
        let covered: f64 = self.support.iter().map(|&b| q[b].to_f64_lossy()).sum();
        let eps = (total - covered).max(0.0);
        let covers_support = q
            .iter()
            .enumerate()
            .all(|(a, w)| *w <= F::zero() || self.support.contains(&a));
        let m = self.support.len();
        let base = m as f64 / self.ell as f64;
        let bound = if covers_support { base } else { 2.0 * eps + base };
        let induced = self.induced(q.len());
        let l1 = induced.iter().zip(q).map(|(a, b)| (a - b.to_f64_lossy()).abs()).sum();
        StaircaseCertificate {
            eps,
            support_len: m,
            ell: self.ell,
            bound,
            covers_support,
            vacuous: (self.ell as usize) < m,
            l1,
        }
    }
}

/// Staircase table for a single-axis pmf.
pub fn staircase_map<F: Prob>(q: &Pmf<F>, order: &[usize], ell: u64) -> Result<StaircaseTable> {
    if q.axes().len() != 1 {
        return Err(usage("staircase needs a single-axis pmf"));
    }
    StaircaseTable::build(q.weights(), order, ell)
}
