//! Fractional repetition (FR) codes.
//!
//! An FR code stores `v` MDS-coded packets on `n` nodes so that every node
//! holds `α` packets and every packet lives on `ρ` nodes. This crate models
//! the layout as an [`IncidenceStructure`], computes the exact supported
//! file size `M_k` for every reconstruction degree `k` (directly and through
//! the transpose code), evaluates the known upper bounds including the one
//! obtained from the transpose, and simulates storage with repair-by-transfer.

mod bitset;
pub mod bounds;
pub mod constructions;
pub mod error;
pub mod hierarchy;
pub mod incidence;
pub mod storage;

pub use bitset::PointSet;
pub use bounds::{BoundReport, Optimality};
pub use error::{Error, Result};
pub use hierarchy::{FileSizeHierarchy, ParetoPoint, SearchConfig};
pub use incidence::{validate_fr, FrCode, FrParams, IncidenceStructure, NotRegular};
pub use storage::{Reconstruction, StorageSystem};
