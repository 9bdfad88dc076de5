//! Cluster converged particles into atoms.

use crate::chem::{Atom, Molecule};
use crate::error::Result;
use crate::geom::Vec3;

use super::batch::{ParticleStatus, TrajectoryBatch};
use super::config::ReconstructionConfig;
use super::dbscan::{dbscan, NOISE};

/// Extraction summary alongside the molecule.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ExtractionStats {
    pub converged_particles: usize,
    pub noise_particles: usize,
}

impl ExtractionStats {
    pub fn noise_fraction(&self) -> f64 {
        if self.converged_particles == 0 {
            0.0
        } else {
            self.noise_particles as f64 / self.converged_particles as f64
        }
    }
}

/// Per element: DBSCAN over the converged particle positions; every
/// non-noise cluster contributes one atom at its centroid. Diverged,
/// exhausted, and DBSCAN-noise particles are discarded. Zero clusters across
/// all elements is a valid (empty) result.
pub fn extract_atoms(
    batch: &TrajectoryBatch,
    cfg: &ReconstructionConfig,
) -> Result<(Molecule, ExtractionStats)> {
    let mut atoms = Vec::new();
    let mut stats = ExtractionStats::default();
    for (element, particles) in &batch.groups {
        let positions: Vec<Vec3> = particles
            .iter()
            .filter(|p| p.status == ParticleStatus::Converged)
            .map(|p| p.position)
            .collect();
        stats.converged_particles += positions.len();
        if positions.is_empty() {
            continue;
        }
        let labels = dbscan(&positions, cfg.eps_db, cfg.n_min)?;
        let cluster_count = labels.iter().copied().max().map_or(0, |m| (m + 1).max(0)) as usize;
        let mut sums = vec![Vec3::ZERO; cluster_count];
        let mut counts = vec![0usize; cluster_count];
        for (&label, &pos) in labels.iter().zip(&positions) {
            if label == NOISE {
                stats.noise_particles += 1;
            } else {
                sums[label as usize] += pos;
                counts[label as usize] += 1;
            }
        }
        for (sum, count) in sums.into_iter().zip(counts) {
            atoms.push(Atom::new(*element, sum / count as f64));
        }
    }
    Ok((Molecule::new(atoms), stats))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chem::Element;
    use crate::reconstruct::batch::Particle;

    fn converged_at(positions: &[Vec3]) -> Vec<Particle> {
        positions
            .iter()
            .map(|&p| Particle {
                position: p,
                status: ParticleStatus::Converged,
                iterations: 1,
            })
            .collect()
    }

    #[test]
    fn one_tight_cluster_yields_the_mean() {
        let pts = [
            Vec3::new(1.00, 0.0, 0.0),
            Vec3::new(1.01, 0.0, 0.0),
            Vec3::new(0.99, 0.0, 0.0),
            Vec3::new(1.00, 0.01, 0.0),
        ];
        let batch = TrajectoryBatch {
            groups: vec![(Element::C, converged_at(&pts))],
        };
        let (mol, stats) = extract_atoms(&batch, &ReconstructionConfig::qm9()).unwrap();
        assert_eq!(mol.len(), 1);
        assert_eq!(mol.atoms[0].element, Element::C);
        let mean = pts.iter().fold(Vec3::ZERO, |a, &p| a + p) / 4.0;
        assert!((mol.atoms[0].position - mean).norm() < 1e-12);
        assert_eq!(stats.noise_particles, 0);
    }

    #[test]
    fn well_separated_clusters_yield_two_atoms() {
        let mut pts = Vec::new();
        for c in [Vec3::ZERO, Vec3::new(3.0, 0.0, 0.0)] {
            for i in 0..5 {
                pts.push(c + Vec3::new(0.001 * i as f64, 0.0, 0.0));
            }
        }
        let batch = TrajectoryBatch {
            groups: vec![(Element::O, converged_at(&pts))],
        };
        let (mol, _) = extract_atoms(&batch, &ReconstructionConfig::qm9()).unwrap();
        assert_eq!(mol.len(), 2);
        assert!(mol.atoms.iter().all(|a| a.element == Element::O));
    }

    #[test]
    fn sparse_noise_yields_no_atoms() {
        let pts = [
            Vec3::ZERO,
            Vec3::new(5.0, 0.0, 0.0),
            Vec3::new(0.0, 5.0, 0.0),
            Vec3::new(0.0, 0.0, 5.0),
        ];
        let batch = TrajectoryBatch {
            groups: vec![(Element::C, converged_at(&pts))],
        };
        let (mol, stats) = extract_atoms(&batch, &ReconstructionConfig::qm9()).unwrap();
        assert!(mol.is_empty());
        assert_eq!(stats.noise_particles, 4);
        assert!((stats.noise_fraction() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn non_converged_particles_are_ignored() {
        let mut particles = converged_at(&[
            Vec3::ZERO,
            Vec3::new(0.001, 0.0, 0.0),
            Vec3::new(0.0, 0.001, 0.0),
        ]);
        for status in [ParticleStatus::Exhausted, ParticleStatus::Diverged, ParticleStatus::Pending]
        {
            particles.push(Particle {
                position: Vec3::new(0.0005, 0.0005, 0.0),
                status,
                iterations: 500,
            });
        }
        let batch = TrajectoryBatch {
            groups: vec![(Element::N, particles)],
        };
        let (mol, stats) = extract_atoms(&batch, &ReconstructionConfig::qm9()).unwrap();
        assert_eq!(mol.len(), 1);
        assert_eq!(stats.converged_particles, 3);
    }

    #[test]
    fn empty_batch_is_a_valid_empty_molecule() {
        let (mol, stats) = extract_atoms(&TrajectoryBatch::default(), &ReconstructionConfig::qm9())
            .unwrap();
        assert!(mol.is_empty());
        assert_eq!(stats.converged_particles, 0);
        assert_eq!(stats.noise_fraction(), 0.0);
    }
}
