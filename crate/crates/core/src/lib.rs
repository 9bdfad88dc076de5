//! Continuous vector-field representation of 3D molecules.
//!
//! A molecule is encoded as a field `v: R^3 -> R^{K x 3}` whose per-element
//! vectors point toward nearby atomic centers. The crate provides:
//!
//! * [`chem`]: molecule data model, XYZ I/O, covalent bond inference,
//!   valence/stability checks, and a canonical structure hash;
//! * [`field`]: the analytic field constructions (Gaussian-Clip, Gaussian,
//!   Tanh) and the repulsive field for absent element types;
//! * [`provider`]: a uniform query interface over field sources: analytic,
//!   grid-interpolated, noise-wrapped, and a spurious-attractor test provider;
//! * [`reconstruct`]: field-to-molecule conversion: query-point dynamics,
//!   DBSCAN clustering, atom extraction, and RMSD scoring;
//! * [`metrics`]: Wasserstein-1 / total-variation distances and corpus-level
//!   evaluation reports;
//! * [`diffusion`]: cosine-schedule DDPM kernels with a pluggable denoiser;
//! * [`corpus`]: a synthetic molecule generator for self-contained studies.

pub mod chem;
pub mod corpus;
pub mod diffusion;
pub mod error;
pub mod field;
pub mod geom;
pub mod metrics;
pub mod provider;
pub mod reconstruct;

pub use chem::{Element, ElementSet, Molecule, StabilityReport};
pub use error::{Error, Result};
pub use field::{FieldParams, FieldSample, FieldVariant};
pub use geom::{Aabb, Rotation, Vec3};
pub use provider::FieldProvider;
pub use reconstruct::{ReconstructionConfig, ReconstructionOutcome};
