use crate::error::{usage, Result};
use crate::scalar::Prob;
use serde::Serialize;

use super::pmf::Pmf;

/// Shannon entropy in bits with 0·log0 = 0.
pub fn entropy_bits<F: Prob>(weights: &[F]) -> F {
    weights
        .iter()
        .filter(|w| **w > F::zero())
        .map(|&w| -w * w.log2())
        .sum()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Divergences {
    /// D(p‖q) in bits; +∞ when supp(p) ⊄ supp(q).
    pub kl: f64,
    /// Σ|p−q|, in [0,2].
    pub tv: f64,
}

pub fn divergences<F: Prob>(p: &Pmf<F>, q: &Pmf<F>) -> Result<Divergences> {
    p.same_axes(q)?;
    let mut kl = 0.0;
    let mut tv = 0.0;
    for (a, b) in p.weights().iter().zip(q.weights()) {
        let (a, b) = (a.to_f64_lossy(), b.to_f64_lossy());
        tv += (a - b).abs();
        if a > 0.0 {
            if b <= 0.0 {
                kl = f64::INFINITY;
            } else if kl.is_finite() {
                kl += a * (a / b).log2();
            }
        }
    }
    Ok(Divergences { kl: kl.max(0.0), tv })
}

impl<F: Prob> Pmf<F> {
    /// Joint entropy of the listed axes; the empty set has entropy 0.
    pub fn entropy(&self, labels: &[&str]) -> Result<F> {
        if labels.is_empty() {
            return Ok(F::zero());
        }
        Ok(entropy_bits(self.marginalize(labels)?.weights()))
    }

    /// I(A;B|C) in bits. Empty `b` gives H(A|C); empty `c` gives I(A;B).
    pub fn info_measure(&self, a: &[&str], b: &[&str], c: &[&str]) -> Result<F> {
        let overlap = a.iter().any(|x| b.contains(x) || c.contains(x))
            || b.iter().any(|x| c.contains(x));
        if overlap {
            return Err(usage("information measure axis sets overlap"));
        }
        let ac: Vec<&str> = a.iter().chain(c).copied().collect();
        let h_ac = self.entropy(&ac)?;
        let h_c = self.entropy(c)?;
        let v = if b.is_empty() {
            h_ac - h_c
        } else {
            let bc: Vec<&str> = b.iter().chain(c).copied().collect();
            let abc: Vec<&str> = a.iter().chain(b).chain(c).copied().collect();
            h_ac + self.entropy(&bc)? - self.entropy(&abc)? - h_c
        };
        Ok(v.max(F::zero()))
    }

    pub fn mutual_information(&self, a: &[&str], b: &[&str]) -> Result<F> {
        self.info_measure(a, b, &[])
    }

    pub fn conditional_entropy(&self, a: &[&str], c: &[&str]) -> Result<F> {
        self.info_measure(a, &[], c)
    }
}
