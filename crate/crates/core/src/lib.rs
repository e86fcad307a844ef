//! Tatra association schemes and the machinery needed to certify their
//! separability: tabulated finite fields, permutation groups with a
//! stabilizer chain, dense coherent configurations with 2-dimensional
//! Weisfeiler-Leman closure, the semilinear action on the point set, and the
//! one-point-extension pipeline that bounds the separability number.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, JSON and the
//! command-line driver live in the companion `tatra` crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod autiso;
pub mod coherent_config;
mod error;
pub mod finite_field;
pub mod perm_group;
pub mod separability;
pub mod tatra;

pub use autiso::{AlgebraicAut, InducedRatio, SemilinearMap};
pub use coherent_config::{AxiomReport, CoherentConfiguration, IntersectionTensor, Parabolic};
pub use error::{Error, Result};
pub use finite_field::{euler_phi, is_primitive_root, CosetStructure, FiniteField, FrobeniusData};
pub use perm_group::{PermGroup, Permutation};
pub use separability::{DeltaCounterexample, SeparabilityOptions, SeparabilityReport};
pub use tatra::{Label, OmegaPoint, TatraScheme};
