use crate::caps;
use crate::error::{check_cap, usage, Error, Result};
use crate::scalar::Prob;
use serde::{Deserialize, Serialize};

use super::kernel::Kernel;

/// A labeled finite alphabet; symbols are `0..size`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Axis {
    pub label: String,
    pub size: usize,
}

pub type Alphabet = Axis;

impl Axis {
    pub fn new(label: impl Into<String>, size: usize) -> Self {
        Axis { label: label.into(), size }
    }
}

/// Mixed-radix counter over a product alphabet, last axis fastest.
#[derive(Clone, Debug)]
pub struct Odometer {
    sizes: Vec<usize>,
    idx: Vec<usize>,
    done: bool,
}

impl Odometer {
    pub fn new(sizes: &[usize]) -> Self {
        let done = sizes.contains(&0);
        Odometer { sizes: sizes.to_vec(), idx: vec![0; sizes.len()], done }
    }

    pub fn current(&self) -> Option<&[usize]> {
        if self.done {
            None
        } else {
            Some(&self.idx)
        }
    }

    pub fn advance(&mut self) {
        for k in (0..self.sizes.len()).rev() {
            self.idx[k] += 1;
            if self.idx[k] < self.sizes[k] {
                return;
            }
            self.idx[k] = 0;
        }
        self.done = true;
    }
}

/// Block symbol of a letter sequence, first letter most significant.
pub fn block_encode(letters: &[usize], size: usize) -> usize {
    letters.iter().fold(0, |acc, &a| acc * size + a)
}

pub fn block_decode(mut sym: usize, size: usize, n: usize) -> Vec<usize> {
    let mut out = vec![0; n];
    for t in (0..n).rev() {
        out[t] = sym % size;
        sym /= size;
    }
    out
}

/// Dense probability tensor over a labeled product of finite alphabets.
///
/// Row-major storage, last axis fastest. Weights are nonnegative and sum to
/// one within `F::MASS_TOL`; labels are unique.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Pmf<F> {
    axes: Vec<Axis>,
    weights: Vec<F>,
}

pub(crate) fn strides(sizes: &[usize]) -> Vec<usize> {
    let mut s = vec![1; sizes.len()];
    for k in (0..sizes.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * sizes[k + 1];
    }
    s
}

fn check_axes(axes: &[Axis]) -> Result<usize> {
    for (k, a) in axes.iter().enumerate() {
        if a.size == 0 {
            return Err(Error::InvalidPmf(format!("axis {} has empty alphabet", a.label)));
        }
        if axes[..k].iter().any(|b| b.label == a.label) {
            return Err(Error::InvalidPmf(format!("duplicate axis label {}", a.label)));
        }
    }
    let cells = caps::product(axes.iter().map(|a| a.size));
    check_cap("pmf tensor", cells, caps::tensor_cap())?;
    Ok(cells as usize)
}

impl<F: Prob> Pmf<F> {
    pub fn new(axes: Vec<Axis>, weights: Vec<F>) -> Result<Self> {
        let cells = check_axes(&axes)?;
        if weights.len() != cells {
            return Err(Error::InvalidPmf(format!(
                "expected {cells} weights, got {}",
                weights.len()
            )));
        }
        if let Some(w) = weights.iter().find(|w| !(**w >= F::zero()) || !w.is_finite()) {
            return Err(Error::InvalidPmf(format!("weight {w} is negative or not finite")));
        }
        let total: F = weights.iter().copied().sum();
        if (total.to_f64_lossy() - 1.0).abs() > F::MASS_TOL {
            return Err(Error::InvalidPmf(format!("total mass {total} is not 1")));
        }
        Ok(Pmf { axes, weights })
    }

    /// Rescales nonnegative weights to unit mass.
    pub fn new_renormalized(axes: Vec<Axis>, mut weights: Vec<F>) -> Result<Self> {
        let total: F = weights.iter().copied().sum();
        if !(total > F::zero()) {
            return Err(Error::InvalidPmf("zero total mass".into()));
        }
        for w in &mut weights {
            *w = *w / total;
        }
        Self::new(axes, weights)
    }

    pub fn from_fn(axes: Vec<Axis>, mut f: impl FnMut(&[usize]) -> F) -> Result<Self> {
        let cells = check_axes(&axes)?;
        let sizes: Vec<usize> = axes.iter().map(|a| a.size).collect();
        let mut weights = Vec::with_capacity(cells);
        let mut od = Odometer::new(&sizes);
        while let Some(idx) = od.current() {
            weights.push(f(idx));
            od.advance();
        }
        Self::new(axes, weights)
    }

    pub fn uniform(axes: Vec<Axis>) -> Result<Self> {
        let cells = check_axes(&axes)?;
        Self::new(axes, vec![F::one() / F::from_usize(cells).unwrap(); cells])
    }

    pub fn point(axes: Vec<Axis>, at: &[usize]) -> Result<Self> {
        let at = at.to_vec();
        Self::from_fn(axes, |idx| if idx == at.as_slice() { F::one() } else { F::zero() })
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn weights(&self) -> &[F] {
        &self.weights
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.axes.iter().map(|a| a.size).collect()
    }

    pub fn labels(&self) -> Vec<&str> {
        self.axes.iter().map(|a| a.label.as_str()).collect()
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn axis_index(&self, label: &str) -> Result<usize> {
        self.axes
            .iter()
            .position(|a| a.label == label)
            .ok_or_else(|| usage(format!("unknown axis label {label}")))
    }

    pub fn axis_size(&self, label: &str) -> Result<usize> {
        Ok(self.axes[self.axis_index(label)?].size)
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        let mut f = 0;
        for (a, &i) in self.axes.iter().zip(idx) {
            f = f * a.size + i;
        }
        f
    }

    pub fn get(&self, idx: &[usize]) -> F {
        self.weights[self.flat_index(idx)]
    }

    /// Calls `f` with every multi-index and its weight, in storage order.
    pub fn for_each(&self, mut f: impl FnMut(&[usize], F)) {
        let sizes = self.sizes();
        let mut od = Odometer::new(&sizes);
        let mut flat = 0;
        while let Some(idx) = od.current() {
            f(idx, self.weights[flat]);
            flat += 1;
            od.advance();
        }
    }

    /// Sums out every axis not in `keep`; result axes follow the order of `keep`.
    pub fn marginalize(&self, keep: &[&str]) -> Result<Pmf<F>> {
        let pos = self.positions(keep)?;
        let axes: Vec<Axis> = pos.iter().map(|&p| self.axes[p].clone()).collect();
        let dsizes: Vec<usize> = axes.iter().map(|a| a.size).collect();
        let dstr = strides(&dsizes);
        let mut out = vec![F::zero(); dsizes.iter().product()];
        self.for_each(|idx, w| {
            let d: usize = pos.iter().zip(&dstr).map(|(&p, &s)| idx[p] * s).sum();
            out[d] = out[d] + w;
        });
        Ok(Pmf { axes, weights: out })
    }

    /// Conditional kernel of the remaining axes (in storage order) given `given`.
    /// Zero-mass conditions yield uniform slices flagged as degenerate.
    pub fn condition(&self, given: &[&str]) -> Result<Kernel<F>> {
        self.positions(given)?;
        let rest: Vec<&str> = self
            .axes
            .iter()
            .filter(|a| !given.contains(&a.label.as_str()))
            .map(|a| a.label.as_str())
            .collect();
        self.condition_on(&rest, given)
    }

    /// Kernel of `output` given `given`, summing out everything else.
    pub fn condition_on(&self, output: &[&str], given: &[&str]) -> Result<Kernel<F>> {
        if output.iter().any(|o| given.contains(o)) {
            return Err(usage("output and given axes overlap"));
        }
        let all: Vec<&str> = given.iter().chain(output).copied().collect();
        let m = self.marginalize(&all)?;
        let glen: usize = given.iter().map(|g| self.axis_size(g).unwrap()).product();
        let olen = m.len() / glen.max(1);
        let mut weights = m.weights;
        let mut degenerate = vec![false; glen];
        for g in 0..glen {
            let slice = &mut weights[g * olen..(g + 1) * olen];
            let mass: F = slice.iter().copied().sum();
            if mass > F::zero() {
                for w in slice.iter_mut() {
                    *w = *w / mass;
                }
            } else {
                degenerate[g] = true;
                let u = F::one() / F::from_usize(olen).unwrap();
                for w in slice.iter_mut() {
                    *w = u;
                }
            }
        }
        let (gaxes, oaxes) = m.axes.split_at(given.len());
        Ok(Kernel::from_parts(gaxes.to_vec(), oaxes.to_vec(), weights, degenerate))
    }

    /// The n-fold i.i.d. extension; each axis becomes a block alphabet of size |axis|^n.
    pub fn product_extend(&self, n: usize) -> Result<Pmf<F>> {
        if n == 0 {
            return Err(usage("block length must be positive"));
        }
        let cells = (self.len() as u128).saturating_pow(n as u32);
        check_cap("product extension", cells, caps::tensor_cap())?;
        let base = self.sizes();
        let mut cur = self.clone();
        for _ in 1..n {
            let sizes: Vec<usize> = cur.sizes().iter().zip(&base).map(|(a, b)| a * b).collect();
            let dstr = strides(&sizes);
            let mut out = vec![F::zero(); cells_of(&sizes)];
            cur.for_each(|ci, cw| {
                self.for_each(|pi, pw| {
                    let d: usize = (0..sizes.len())
                        .map(|k| (ci[k] * base[k] + pi[k]) * dstr[k])
                        .sum();
                    out[d] = cw * pw;
                });
            });
            let axes = cur
                .axes
                .iter()
                .zip(&sizes)
                .map(|(a, &s)| Axis::new(a.label.clone(), s))
                .collect();
            cur = Pmf { axes, weights: out };
        }
        Ok(cur)
    }

    /// Renames axes via `(old, new)` pairs.
    pub fn relabel(&self, renames: &[(&str, &str)]) -> Result<Pmf<F>> {
        let mut axes = self.axes.clone();
        for (old, new) in renames {
            let p = self.axis_index(old)?;
            axes[p].label = new.to_string();
        }
        check_axes(&axes)?;
        Ok(Pmf { axes, weights: self.weights.clone() })
    }

    /// L1 distance to a pmf over identical axes.
    pub fn l1(&self, other: &Pmf<F>) -> Result<F> {
        self.same_axes(other)?;
        Ok(self
            .weights
            .iter()
            .zip(&other.weights)
            .map(|(a, b)| (*a - *b).abs())
            .sum())
    }

    pub(crate) fn same_axes(&self, other: &Pmf<F>) -> Result<()> {
        if self.axes != other.axes {
            return Err(usage("pmfs have different axes"));
        }
        Ok(())
    }

    pub(crate) fn positions(&self, labels: &[&str]) -> Result<Vec<usize>> {
        let mut out = Vec::with_capacity(labels.len());
        for (k, l) in labels.iter().enumerate() {
            if labels[..k].contains(l) {
                return Err(usage(format!("axis {l} listed twice")));
            }
            out.push(self.axis_index(l)?);
        }
        Ok(out)
    }

    pub fn to_f64(&self) -> Pmf<f64> {
        Pmf {
            axes: self.axes.clone(),
            weights: self.weights.iter().map(|w| w.to_f64_lossy()).collect(),
        }
    }
}

fn cells_of(sizes: &[usize]) -> usize {
    sizes.iter().product()
}
