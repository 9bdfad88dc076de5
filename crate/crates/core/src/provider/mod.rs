//! Uniform query interface over field sources.
//!
//! The reconstruction pipeline only sees [`FieldProvider`]; behind it sit the
//! analytic oracle, a grid-sampled trilinear interpolator standing in for a
//! decoded neural field, a deterministic noise wrapper for robustness
//! studies, and a spurious-attractor injector for failure-mode experiments.

mod grid;
mod noise;
mod spurious;

pub use grid::{build_grid, GridProvider, LatentGrid};
pub use noise::{wrap_noise, NoiseSpec, NoisyProvider};
pub use spurious::SpuriousProvider;

use crate::chem::{ElementSet, Molecule};
use crate::error::Result;
use crate::field::{FieldEvaluator, FieldParams};
use crate::geom::{Aabb, Vec3};

/// A queryable per-element vector field.
///
/// Implementations are immutable after construction; concurrent queries are
/// safe and deterministic.
pub trait FieldProvider: Send + Sync {
    fn elements(&self) -> &ElementSet;

    /// Field vector for element channel `k` at point `q`.
    fn query_one(&self, q: Vec3, k: usize) -> Vec3;

    /// Batched evaluation; one vector per query point.
    fn query(&self, queries: &[Vec3], k: usize) -> Vec<Vec3> {
        queries.iter().map(|&q| self.query_one(q, k)).collect()
    }

    /// Natural bounding region of the field's informative support, when one
    /// exists (molecule bounding box, grid extent).
    fn domain(&self) -> Option<Aabb> {
        None
    }
}

impl FieldProvider for Box<dyn FieldProvider> {
    fn elements(&self) -> &ElementSet {
        (**self).elements()
    }
    fn query_one(&self, q: Vec3, k: usize) -> Vec3 {
        (**self).query_one(q, k)
    }
    fn query(&self, queries: &[Vec3], k: usize) -> Vec<Vec3> {
        (**self).query(queries, k)
    }
    fn domain(&self) -> Option<Aabb> {
        (**self).domain()
    }
}

impl<P: FieldProvider> FieldProvider for std::sync::Arc<P> {
    fn elements(&self) -> &ElementSet {
        (**self).elements()
    }
    fn query_one(&self, q: Vec3, k: usize) -> Vec3 {
        (**self).query_one(q, k)
    }
    fn query(&self, queries: &[Vec3], k: usize) -> Vec<Vec3> {
        (**self).query(queries, k)
    }
    fn domain(&self) -> Option<Aabb> {
        (**self).domain()
    }
}

/// Exact analytic field of a known molecule.
#[derive(Debug, Clone)]
pub struct AnalyticProvider {
    evaluator: FieldEvaluator,
    bbox: Option<Aabb>,
}

impl AnalyticProvider {
    pub fn new(mol: &Molecule, elements: &ElementSet, params: FieldParams) -> Result<Self> {
        Ok(AnalyticProvider {
            evaluator: FieldEvaluator::new(mol, elements, params)?,
            bbox: mol.bounding_box(),
        })
    }

    pub fn params(&self) -> &FieldParams {
        self.evaluator.params()
    }

    pub fn evaluator(&self) -> &FieldEvaluator {
        &self.evaluator
    }
}

impl FieldProvider for AnalyticProvider {
    fn elements(&self) -> &ElementSet {
        self.evaluator.elements()
    }

    fn query_one(&self, q: Vec3, k: usize) -> Vec3 {
        self.evaluator.channel(q, k)
    }

    fn domain(&self) -> Option<Aabb> {
        self.bbox
    }
}
