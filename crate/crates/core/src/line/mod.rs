//! Line-network structure: index-pair sets, the generation order, and the
//! auxiliary-variable system with its factorization and Markov checks.

mod aux;
mod pairs;

pub use aux::{
    assemble, extend_with_channels, strs, AuxAssignment, AuxChoice, AuxLayout, AuxSpec, ChainCheck,
    Mode, NetworkSpec, ValidationReport, ZERO_CMI,
};
pub use pairs::{
    a_label, b_label, c_label, index_sets, j_complement, j_set, order_pairs, pair_index, phi,
    phi_bar, psi, x_label, z_label, IndexPair, IndexSets,
};
