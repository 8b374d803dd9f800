//! Finite-alphabet probability algebra: dense pmfs, conditional kernels,
//! information measures, letter typicality and the staircase seed map.

mod info;
mod kernel;
mod pmf;
mod staircase;
mod typical;

pub use info::{divergences, entropy_bits, Divergences};
pub use kernel::Kernel;
pub use pmf::{block_decode, block_encode, Alphabet, Axis, Odometer, Pmf};
pub use staircase::{staircase_map, StaircaseCertificate, StaircaseTable};
pub use typical::is_typical;
