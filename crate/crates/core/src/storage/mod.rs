//! Outer MDS code, replica placement per an FR code, node failure,
//! repair-by-transfer, and reconstruction from any node set.

pub mod gf256;
pub mod mds;
mod system;

pub use mds::MdsCode;
pub use system::{NodeState, Reconstruction, StorageSystem, Transfer};
