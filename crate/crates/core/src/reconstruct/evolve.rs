//! Euler query-point dynamics along the field.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geom::Vec3;
use crate::provider::FieldProvider;

use super::batch::{Particle, ParticleStatus, TrajectoryBatch};
use super::config::ReconstructionConfig;

/// One particle's full update loop: check the field norm, then step.
/// Returns the final particle plus an optional position trace.
fn evolve_particle<P: FieldProvider>(
    provider: &P,
    channel: usize,
    start: Vec3,
    cfg: &ReconstructionConfig,
    trace_stride: Option<usize>,
) -> (Particle, Vec<(usize, Vec3)>) {
    let mut q = start;
    let mut trace = Vec::new();
    let mut record = |t: usize, q: Vec3| {
        if let Some(stride) = trace_stride {
            if t % stride.max(1) == 0 {
                trace.push((t, q));
            }
        }
    };
    for t in 0..cfg.t_max {
        record(t, q);
        let v = provider.query_one(q, channel);
        if !v.is_finite() {
            return (
                Particle {
                    position: q,
                    status: ParticleStatus::Diverged,
                    iterations: t,
                },
                trace,
            );
        }
        if v.norm() < cfg.tau {
            return (
                Particle {
                    position: q,
                    status: ParticleStatus::Converged,
                    iterations: t,
                },
                trace,
            );
        }
        q += v * cfg.eta;
    }
    record(cfg.t_max, q);
    (
        Particle {
            position: q,
            status: ParticleStatus::Exhausted,
            iterations: cfg.t_max,
        },
        trace,
    )
}

/// Evolves every particle until its field norm drops below `cfg.tau` or
/// `cfg.t_max` iterations elapse. Particles are independent; evaluation is
/// parallel across particles with bit-identical results to a sequential run.
/// Non-finite field values flag the particle as diverged.
pub fn evolve<P: FieldProvider>(
    provider: &P,
    batch: &TrajectoryBatch,
    cfg: &ReconstructionConfig,
) -> Result<TrajectoryBatch> {
    Ok(evolve_traced(provider, batch, cfg, None)?.0)
}

/// Sampled particle positions for external visualization:
/// `(element index in batch, particle index, iteration, position)`.
pub type Trace = Vec<(usize, usize, usize, Vec3)>;

/// [`evolve`] with optional position snapshots every `trace_stride` steps.
pub fn evolve_traced<P: FieldProvider>(
    provider: &P,
    batch: &TrajectoryBatch,
    cfg: &ReconstructionConfig,
    trace_stride: Option<usize>,
) -> Result<(TrajectoryBatch, Trace)> {
    cfg.validate()?;
    let mut groups = Vec::with_capacity(batch.groups.len());
    let mut trace = Vec::new();
    for (group_idx, (element, particles)) in batch.groups.iter().enumerate() {
        let channel = provider.elements().channel_of(*element).ok_or_else(|| {
            Error::domain(format!(
                "element {element} is outside the provider's element set"
            ))
        })?;
        let evolved: Vec<(Particle, Vec<(usize, Vec3)>)> = particles
            .par_iter()
            .map(|p| evolve_particle(provider, channel, p.position, cfg, trace_stride))
            .collect();
        let mut out = Vec::with_capacity(evolved.len());
        for (particle_idx, (p, t)) in evolved.into_iter().enumerate() {
            out.push(p);
            for (iter, pos) in t {
                trace.push((group_idx, particle_idx, iter, pos));
            }
        }
        groups.push((*element, out));
    }
    Ok((TrajectoryBatch { groups }, trace))
}
