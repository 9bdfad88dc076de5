//! Field-to-molecule reconstruction.
//!
//! Query points are initialized inside a bounding volume (uniformly, or
//! adaptively from a scored pool), evolved by Euler steps along the field
//! until the field norm vanishes, clustered per element with DBSCAN, and
//! collapsed to atoms at cluster centroids; bonds are then inferred from
//! covalent radii.

mod assign;
mod batch;
mod config;
mod dbscan;
mod evolve;
mod extract;
mod rmsd;

pub use assign::min_cost_assignment;
pub use batch::{adaptive_select, init_uniform, Particle, ParticleStatus, TrajectoryBatch};
pub use config::{ReconstructionConfig, DEFAULT_BOND_RHO};
pub use dbscan::{dbscan, NOISE};
pub use evolve::{evolve, evolve_traced, Trace};
pub use extract::{extract_atoms, ExtractionStats};
pub use rmsd::{rmsd, RmsdOutcome};

use std::collections::BTreeMap;
use std::time::Instant;

use serde::Serialize;

use crate::chem::{infer_bonds, Element, Molecule};
use crate::error::Result;
use crate::geom::Aabb;
use crate::provider::FieldProvider;

use batch::element_rng;

/// Minimum adaptive candidate-pool size per element. Small budgets times the
/// pool multiplier leave rare-element basins unsampled; the floor keeps pool
/// density high enough that every basin's high-variance shell holds
/// candidates.
const ADAPTIVE_POOL_FLOOR: usize = 2048;

/// Everything a single reconstruction produces.
#[derive(Debug, Clone)]
pub struct ReconstructionOutcome {
    /// Extracted molecule with bonds inferred at `DEFAULT_BOND_RHO`.
    pub molecule: Molecule,
    /// Final particle states.
    pub batch: TrajectoryBatch,
    pub stats: ExtractionStats,
    pub wall_time_ms: f64,
}

/// Runs the full pipeline: init (uniform or adaptive), evolve, extract,
/// infer bonds. Deterministic for a fixed seed.
pub fn reconstruct<P: FieldProvider>(
    provider: &P,
    cfg: &ReconstructionConfig,
    bbox: Aabb,
    seed: u64,
) -> Result<ReconstructionOutcome> {
    let (outcome, _) = reconstruct_traced(provider, cfg, bbox, seed, None)?;
    Ok(outcome)
}

/// [`reconstruct`] with optional trajectory snapshots.
pub fn reconstruct_traced<P: FieldProvider>(
    provider: &P,
    cfg: &ReconstructionConfig,
    bbox: Aabb,
    seed: u64,
    trace_stride: Option<usize>,
) -> Result<(ReconstructionOutcome, Trace)> {
    cfg.validate()?;
    let start = Instant::now();

    let init = if cfg.adaptive {
        let pool_budget: BTreeMap<Element, usize> = cfg
            .query_budget
            .iter()
            .map(|(&e, &n)| (e, (n * cfg.pool_multiplier.max(1)).max(ADAPTIVE_POOL_FLOOR)))
            .collect();
        let pools = init_uniform(&pool_budget, bbox, seed)?;
        let mut groups = Vec::with_capacity(pools.groups.len());
        for (element, pool_particles) in &pools.groups {
            let channel = provider.elements().channel_of(*element).ok_or_else(|| {
                crate::error::Error::domain(format!(
                    "element {element} is outside the provider's element set"
                ))
            })?;
            let pool: Vec<_> = pool_particles.iter().map(|p| p.position).collect();
            let mut rng = element_rng(seed ^ 0xADA7_71FE, *element);
            let chosen = adaptive_select(
                provider,
                &pool,
                channel,
                cfg.query_budget[element],
                cfg.knn_k,
                cfg.softmax_temp,
                &mut rng,
            )?;
            groups.push((*element, chosen.into_iter().map(Particle::at).collect()));
        }
        TrajectoryBatch { groups }
    } else {
        init_uniform(&cfg.query_budget, bbox, seed)?
    };

    let (evolved, trace) = evolve_traced(provider, &init, cfg, trace_stride)?;
    let (bare, stats) = extract_atoms(&evolved, cfg)?;
    let molecule = infer_bonds(&bare, DEFAULT_BOND_RHO);

    Ok((
        ReconstructionOutcome {
            molecule,
            batch: evolved,
            stats,
            wall_time_ms: start.elapsed().as_secs_f64() * 1e3,
        },
        trace,
    ))
}

/// Padding applied around a provider's domain to form the query-point
/// bounding volume: 2 A covers the attraction basins (d_clip = 0.8 A) and
/// the full scoring shell of hull atoms with margin.
pub const BBOX_PADDING: f64 = 2.0;

/// Default bounding volume: the provider's domain padded by [`BBOX_PADDING`].
pub fn default_bbox<P: FieldProvider>(provider: &P) -> Option<Aabb> {
    provider.domain().map(|bb| bb.padded(BBOX_PADDING))
}

/// JSON-facing summary of one reconstruction compared against a reference.
#[derive(Debug, Clone, Serialize)]
pub struct ReconstructionReport {
    pub success: bool,
    pub rmsd: Option<f64>,
    /// Element symbol to (reconstructed - reference) count; empty on success.
    pub atom_count_deltas: BTreeMap<String, i64>,
    /// Converged-iteration histogram over fixed buckets.
    pub iterations_histogram: BTreeMap<String, usize>,
    pub noise_particle_fraction: f64,
    pub wall_time_ms: f64,
}

const ITER_BUCKETS: [(usize, &str); 6] = [
    (10, "0-9"),
    (50, "10-49"),
    (100, "50-99"),
    (250, "100-249"),
    (500, "250-499"),
    (usize::MAX, "500+"),
];

impl ReconstructionReport {
    pub fn new(outcome: &ReconstructionOutcome, reference: &Molecule) -> Self {
        let comparison = rmsd(&outcome.molecule, reference);
        let mut histogram: BTreeMap<String, usize> = BTreeMap::new();
        for (_, particles) in &outcome.batch.groups {
            for p in particles {
                let label = ITER_BUCKETS
                    .iter()
                    .find(|(top, _)| p.iterations < *top)
                    .map(|(_, l)| *l)
                    .unwrap_or("500+");
                *histogram.entry(label.to_string()).or_insert(0) += 1;
            }
        }
        let atom_count_deltas = match &comparison {
            RmsdOutcome::Matched { .. } => BTreeMap::new(),
            RmsdOutcome::Mismatch { deltas } => deltas
                .iter()
                .map(|(e, d)| (e.symbol().to_string(), *d))
                .collect(),
        };
        ReconstructionReport {
            success: comparison.is_match(),
            rmsd: comparison.rmsd(),
            atom_count_deltas,
            iterations_histogram: histogram,
            noise_particle_fraction: outcome.stats.noise_fraction(),
            wall_time_ms: outcome.wall_time_ms,
        }
    }
}
