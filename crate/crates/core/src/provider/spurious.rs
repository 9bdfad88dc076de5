//! Failure-mode test provider: ghost attractors on absent-type channels.
//!
//! A learned field can retain shallow attraction basins for element types the
//! molecule does not contain, yielding ghost atoms during reconstruction.
//! This provider reproduces that failure synthetically: each absent channel
//! receives a scaled Gaussian-Clip attraction toward a few ghost sites. With
//! the exclusive repulsive field enabled the ghost pull stays below the
//! repulsion magnitude everywhere, so the basins have no equilibria; without
//! it they converge particles like real atoms.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::chem::{ElementSet, Molecule};
use crate::error::{Error, Result};
use crate::field::{FieldEvaluator, FieldParams};
use crate::geom::{Aabb, Vec3};

use super::{AnalyticProvider, FieldProvider};

#[derive(Debug)]
pub struct SpuriousProvider {
    inner: AnalyticProvider,
    /// Ghost attraction evaluator; channels for present elements stay empty.
    ghosts: FieldEvaluator,
    ghost_sites: Vec<Vec<Vec3>>,
    strength: f64,
}

impl SpuriousProvider {
    /// Places `ghosts_per_absent_type` ghost sites for every element channel
    /// absent from the molecule. Sites are rejection-sampled 1.2 to 2.5 A
    /// away from every real atom, in a region where the type-agnostic
    /// repulsion stays strong enough to dominate the scaled ghost pull.
    ///
    /// `strength` scales the ghost attraction; it must stay below the clip
    /// plateau ratio (about 0.6 for default parameters) for the exclusive
    /// field to remove the basins structurally.
    pub fn new(
        mol: &Molecule,
        elements: &ElementSet,
        params: FieldParams,
        ghosts_per_absent_type: usize,
        strength: f64,
        seed: u64,
    ) -> Result<Self> {
        if mol.is_empty() {
            return Err(Error::domain("spurious provider needs a non-empty molecule"));
        }
        if !(strength > 0.0) {
            return Err(Error::domain("ghost strength must be positive"));
        }
        let inner = AnalyticProvider::new(mol, elements, params)?;
        let bbox = mol.bounding_box().expect("non-empty").padded(2.5);
        let atoms: Vec<Vec3> = mol.positions().collect();
        let probe = inner.evaluator();

        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut ghost_sites: Vec<Vec<Vec3>> = vec![Vec::new(); elements.len()];
        for (k, element) in elements.iter() {
            if mol.contains_element(element) {
                continue;
            }
            let mut placed = 0;
            let mut attempts = 0;
            while placed < ghosts_per_absent_type && attempts < 20_000 {
                attempts += 1;
                let p = Vec3::new(
                    rng.gen_range(bbox.min.x..bbox.max.x),
                    rng.gen_range(bbox.min.y..bbox.max.y),
                    rng.gen_range(bbox.min.z..bbox.max.z),
                );
                let nearest = atoms
                    .iter()
                    .map(|a| a.distance(p))
                    .fold(f64::INFINITY, f64::min);
                if !(1.2..=2.5).contains(&nearest) {
                    continue;
                }
                // The repulsion must out-pull the ghost in its whole basin.
                let strong_everywhere = std::iter::once(Vec3::ZERO)
                    .chain((0..6).map(|i| {
                        let mut d = Vec3::ZERO;
                        let delta = if i % 2 == 0 { 0.4 } else { -0.4 };
                        match i / 2 {
                            0 => d.x = delta,
                            1 => d.y = delta,
                            _ => d.z = delta,
                        }
                        d
                    }))
                    .all(|offset| probe.repulsion(p + offset).norm() > 0.145);
                if strong_everywhere {
                    ghost_sites[k].push(p);
                    placed += 1;
                }
            }
            if placed < ghosts_per_absent_type {
                return Err(Error::domain(format!(
                    "could not place {ghosts_per_absent_type} ghost sites for element {element}"
                )));
            }
        }

        let ghosts = FieldEvaluator::from_positions(
            elements.clone(),
            ghost_sites.clone(),
            FieldParams {
                exclusive: false,
                ..params
            },
        );
        Ok(SpuriousProvider {
            inner,
            ghosts,
            ghost_sites,
            strength,
        })
    }

    pub fn ghost_sites(&self) -> &[Vec<Vec3>] {
        &self.ghost_sites
    }
}

impl FieldProvider for SpuriousProvider {
    fn elements(&self) -> &ElementSet {
        self.inner.elements()
    }

    fn query_one(&self, q: Vec3, k: usize) -> Vec3 {
        let base = self.inner.query_one(q, k);
        if self.ghost_sites[k].is_empty() {
            base
        } else {
            base + self.ghosts.attraction(q, k) * self.strength
        }
    }

    fn domain(&self) -> Option<Aabb> {
        self.inner.domain()
    }
}
