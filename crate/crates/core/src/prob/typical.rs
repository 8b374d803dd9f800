use crate::scalar::Prob;

/// Multiplicative letter typicality: |freq(a) − p(a)| ≤ eps·p(a) for every
/// symbol, and symbols outside supp(p) never occur.
pub fn is_typical<F: Prob>(x: &[usize], p: &[F], eps: f64) -> bool {
    if x.is_empty() {
        return false;
    }
    let mut counts = vec![0usize; p.len()];
    for &a in x {
        match counts.get_mut(a) {
            Some(c) => *c += 1,
            None => return false,
        }
    }
    let n = x.len() as f64;
    counts.iter().zip(p).all(|(&c, &pa)| {
        let pa = pa.to_f64_lossy();
        let freq = c as f64 / n;
        if pa <= 0.0 {
            c == 0
        } else {
            (freq - pa).abs() <= eps * pa + 1e-12
        }
    })
}

impl<F: Prob> super::Pmf<F> {
    /// Letter typicality against a single-axis pmf.
    pub fn is_typical(&self, x: &[usize], eps: f64) -> bool {
        self.axes().len() == 1 && is_typical(x, self.weights(), eps)
    }
}
