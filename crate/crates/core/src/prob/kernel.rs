use crate::error::{Error, Result};
use crate::scalar::Prob;
use serde::Serialize;

use super::pmf::Axis;

/// Conditional pmf of `output` axes given `given` axes.
///
/// Weights are given-major: slice `g` occupies `g*output_len..(g+1)*output_len`
/// and sums to one. Slices for zero-probability conditions are flagged.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Kernel<F> {
    given: Vec<Axis>,
    output: Vec<Axis>,
    weights: Vec<F>,
    degenerate: Vec<bool>,
}

impl<F: Prob> Kernel<F> {
    pub fn new(given: Vec<Axis>, output: Vec<Axis>, weights: Vec<F>) -> Result<Self> {
        let glen: usize = given.iter().map(|a| a.size).product();
        let olen: usize = output.iter().map(|a| a.size).product();
        if weights.len() != glen * olen {
            return Err(Error::InvalidPmf(format!(
                "kernel expects {} weights, got {}",
                glen * olen,
                weights.len()
            )));
        }
        for g in 0..glen {
            let slice = &weights[g * olen..(g + 1) * olen];
            if slice.iter().any(|w| !(*w >= F::zero()) || !w.is_finite()) {
                return Err(Error::InvalidPmf(format!("kernel slice {g} has a bad weight")));
            }
            let s: F = slice.iter().copied().sum();
            if (s.to_f64_lossy() - 1.0).abs() > F::MASS_TOL {
                return Err(Error::InvalidPmf(format!("kernel slice {g} sums to {s}")));
            }
        }
        Ok(Kernel { given, output, weights, degenerate: vec![false; glen] })
    }

    pub(crate) fn from_parts(
        given: Vec<Axis>,
        output: Vec<Axis>,
        weights: Vec<F>,
        degenerate: Vec<bool>,
    ) -> Self {
        Kernel { given, output, weights, degenerate }
    }

    /// Deterministic kernel `output = f(given)`.
    pub fn deterministic(
        given: Vec<Axis>,
        output: Axis,
        f: impl Fn(&[usize]) -> usize,
    ) -> Result<Self> {
        let sizes: Vec<usize> = given.iter().map(|a| a.size).collect();
        let glen: usize = sizes.iter().product();
        let mut weights = vec![F::zero(); glen * output.size];
        let mut od = super::Odometer::new(&sizes);
        let mut g = 0;
        while let Some(idx) = od.current() {
            let y = f(idx);
            if y >= output.size {
                return Err(Error::InvalidPmf(format!("symbol {y} outside {}", output.label)));
            }
            weights[g * output.size + y] = F::one();
            g += 1;
            od.advance();
        }
        if glen == 0 {
            weights = vec![F::zero(); output.size];
        }
        Self::new(given, vec![output], weights)
    }

    pub fn given_axes(&self) -> &[Axis] {
        &self.given
    }

    pub fn output_axes(&self) -> &[Axis] {
        &self.output
    }

    pub fn weights(&self) -> &[F] {
        &self.weights
    }

    pub fn given_len(&self) -> usize {
        self.degenerate.len()
    }

    pub fn output_len(&self) -> usize {
        self.output.iter().map(|a| a.size).product()
    }

    pub fn slice(&self, g: usize) -> &[F] {
        let o = self.output_len();
        &self.weights[g * o..(g + 1) * o]
    }

    pub fn prob(&self, g: usize, o: usize) -> F {
        self.weights[g * self.output_len() + o]
    }

    pub fn degenerate(&self) -> &[bool] {
        &self.degenerate
    }

    pub fn is_degenerate(&self, g: usize) -> bool {
        self.degenerate[g]
    }

    /// Flat given-index of a multi-index over the given axes.
    pub fn given_index(&self, idx: &[usize]) -> usize {
        self.given.iter().zip(idx).fold(0, |f, (a, &i)| f * a.size + i)
    }

    /// Output symbol when every non-degenerate slice is a point mass.
    pub fn as_function(&self) -> Option<Vec<usize>> {
        (0..self.given_len())
            .map(|g| {
                let s = self.slice(g);
                let one = s.iter().position(|w| (w.to_f64_lossy() - 1.0).abs() <= F::MASS_TOL);
                match one {
                    Some(y) => Some(y),
                    None if self.degenerate[g] => Some(0),
                    None => None,
                }
            })
            .collect()
    }
}
