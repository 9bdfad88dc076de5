//! Molecule data model, XYZ I/O, covalent bond inference, valence and
//! stability checks, and a canonical structure hash.

mod bonds;
mod element;
mod hash;
mod molecule;
mod stability;
mod xyz;

pub use bonds::{complete_valences, infer_bonds};
pub use element::{Element, ElementSet};
pub use hash::canonical_hash;
pub use molecule::{Atom, Bond, Molecule};
pub use stability::{check_stability, connected_components, StabilityReport};
pub use xyz::{parse_xyz, write_xyz};
