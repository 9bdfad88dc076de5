//! Molecule: an ordered atom list with an optional bond list.

use serde::{Deserialize, Serialize};

use super::element::Element;
use crate::error::{Error, Result};
use crate::geom::{Aabb, Vec3};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub element: Element,
    pub position: Vec3,
}

impl Atom {
    pub fn new(element: Element, position: Vec3) -> Self {
        Atom { element, position }
    }
}

/// Undirected bond between two atom indices with integer order 1..=3.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bond {
    pub a: usize,
    pub b: usize,
    pub order: u32,
}

impl Bond {
    /// Canonical form with `a < b`.
    pub fn new(a: usize, b: usize, order: u32) -> Self {
        if a <= b {
            Bond { a, b, order }
        } else {
            Bond { a: b, b: a, order }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Molecule {
    pub atoms: Vec<Atom>,
    pub bonds: Vec<Bond>,
}

impl Molecule {
    pub fn new(atoms: Vec<Atom>) -> Self {
        Molecule {
            atoms,
            bonds: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn positions(&self) -> impl Iterator<Item = Vec3> + '_ {
        self.atoms.iter().map(|a| a.position)
    }

    /// Indices of atoms of the given element.
    pub fn atoms_of(&self, element: Element) -> Vec<usize> {
        self.atoms
            .iter()
            .enumerate()
            .filter(|(_, a)| a.element == element)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn contains_element(&self, element: Element) -> bool {
        self.atoms.iter().any(|a| a.element == element)
    }

    /// Tight bounding box of the atom positions; `None` when empty.
    pub fn bounding_box(&self) -> Option<Aabb> {
        Aabb::from_points(self.positions())
    }

    pub fn centroid(&self) -> Option<Vec3> {
        if self.atoms.is_empty() {
            return None;
        }
        let sum = self
            .positions()
            .fold(Vec3::ZERO, |acc, p| acc + p);
        Some(sum / self.atoms.len() as f64)
    }

    /// Bond-order sum per atom; zero for unbonded atoms.
    pub fn valencies(&self) -> Vec<u32> {
        let mut v = vec![0u32; self.atoms.len()];
        for b in &self.bonds {
            v[b.a] += b.order;
            v[b.b] += b.order;
        }
        v
    }

    /// Checks structural invariants: finite distinct coordinates and a
    /// well-formed bond list.
    pub fn validate(&self) -> Result<()> {
        for (i, a) in self.atoms.iter().enumerate() {
            if !a.position.is_finite() {
                return Err(Error::domain(format!("atom {i} has non-finite coordinates")));
            }
        }
        for i in 0..self.atoms.len() {
            for j in (i + 1)..self.atoms.len() {
                if self.atoms[i].position == self.atoms[j].position {
                    return Err(Error::domain(format!(
                        "atoms {i} and {j} share identical coordinates"
                    )));
                }
            }
        }
        let mut seen = std::collections::HashSet::new();
        for b in &self.bonds {
            if b.a == b.b {
                return Err(Error::domain(format!("self-bond on atom {}", b.a)));
            }
            if b.a >= self.atoms.len() || b.b >= self.atoms.len() {
                return Err(Error::domain(format!("bond ({}, {}) out of range", b.a, b.b)));
            }
            if !(1..=3).contains(&b.order) {
                return Err(Error::domain(format!("bond order {} out of range", b.order)));
            }
            let key = (b.a.min(b.b), b.a.max(b.b));
            if !seen.insert(key) {
                return Err(Error::domain(format!(
                    "duplicate bond between {} and {}",
                    key.0, key.1
                )));
            }
        }
        Ok(())
    }

    /// Element counts keyed by element, for multiset comparisons.
    pub fn element_counts(&self) -> std::collections::BTreeMap<Element, usize> {
        let mut counts = std::collections::BTreeMap::new();
        for a in &self.atoms {
            *counts.entry(a.element).or_insert(0) += 1;
        }
        counts
    }
}
