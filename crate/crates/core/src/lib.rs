//! Equivariant sheaves on smooth complete toric varieties, described by
//! families of subspaces indexed by the cones of a fan.
//!
//! The crate covers fan validation, intersection theory on toric surfaces,
//! corner families and their characteristic functions, Chern characters and
//! Hilbert polynomials, slope and Gieseker stability with GIT weight systems,
//! and enumeration of fixed-point loci of moduli spaces.

pub mod chern;
pub mod error;
pub mod fan;
pub mod family;
pub mod grid;
pub mod intersect;
pub mod io;
pub mod linalg;
pub mod moduli;
pub mod sample;
pub mod stability;

pub use error::{Error, Result};
pub use fan::{Cone, Fan, FanData};
pub use family::{CharFunction, CornerFamily, DeltaFamily, FamilyKind};
pub use linalg::{SubspaceQ, Q};
