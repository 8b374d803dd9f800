use serde::{Deserialize, Serialize};
use std::fmt;

/// Ordered node pair (i, j), 1 ≤ i < j ≤ h, naming the auxiliary A_{i,j}.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct IndexPair {
    pub i: usize,
    pub j: usize,
}

impl IndexPair {
    pub fn new(i: usize, j: usize) -> Self {
        assert!(1 <= i && i < j, "index pair needs 1 <= i < j, got ({i},{j})");
        IndexPair { i, j }
    }

    /// The generation order: (i,j) ≻ (i',j') iff i < i', or i = i' and j ≥ j'.
    pub fn precedes(self, other: IndexPair) -> bool {
        self.i < other.i || (self.i == other.i && self.j >= other.j)
    }
}

impl fmt::Display for IndexPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.i, self.j)
    }
}

/// All pairs of an h-node line in generation order.
pub fn order_pairs(h: usize) -> Vec<IndexPair> {
    let mut out = Vec::with_capacity(h * h.saturating_sub(1) / 2);
    for i in 1..h {
        for j in (i + 1..=h).rev() {
            out.push(IndexPair::new(i, j));
        }
    }
    out
}

/// Position of `p` in [`order_pairs`].
pub fn pair_index(h: usize, p: IndexPair) -> usize {
    order_pairs(h).iter().position(|q| *q == p).expect("pair inside the line")
}

/// Pairs (i',j') with i' ≤ i < j ≤ j', excluding (i,j) itself.
pub fn phi(h: usize, p: IndexPair) -> Vec<IndexPair> {
    order_pairs(h)
        .into_iter()
        .filter(|q| *q != p && q.i <= p.i && p.j <= q.j)
        .collect()
}

pub fn phi_bar(h: usize, p: IndexPair) -> Vec<IndexPair> {
    order_pairs(h)
        .into_iter()
        .filter(|q| q.i <= p.i && p.j <= q.j)
        .collect()
}

/// Pairs spanning node k: i' ≤ k ≤ j'.
pub fn psi(h: usize, k: usize) -> Vec<IndexPair> {
    order_pairs(h).into_iter().filter(|q| q.i <= k && k <= q.j).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IndexSets {
    pub phi: Vec<IndexPair>,
    pub phi_bar: Vec<IndexPair>,
    pub psi_of_i: Vec<IndexPair>,
    pub psi_of_j: Vec<IndexPair>,
}

pub fn index_sets(h: usize, p: IndexPair) -> IndexSets {
    IndexSets {
        phi: phi(h, p),
        phi_bar: phi_bar(h, p),
        psi_of_i: psi(h, p.i),
        psi_of_j: psi(h, p.j),
    }
}

/// J_S: pairs whose Φ̄ meets S.
pub fn j_set(h: usize, s: &[IndexPair]) -> Vec<IndexPair> {
    order_pairs(h)
        .into_iter()
        .filter(|p| phi_bar(h, *p).iter().any(|q| s.contains(q)))
        .collect()
}

pub fn j_complement(h: usize, s: &[IndexPair]) -> Vec<IndexPair> {
    let j = j_set(h, s);
    order_pairs(h).into_iter().filter(|p| !j.contains(p)).collect()
}

pub fn a_label(p: IndexPair) -> String {
    format!("A{}_{}", p.i, p.j)
}

/// Label of B on the hop i → i+1.
pub fn b_label(i: usize) -> String {
    format!("B{}_{}", i, i + 1)
}

pub fn c_label(i: usize) -> String {
    format!("C{i}")
}

pub fn x_label(i: usize) -> String {
    format!("X{i}")
}

pub fn z_label(i: usize) -> String {
    format!("Z{i}")
}
