//! Particle batches: initialization and adaptive query-point selection.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::chem::Element;
use crate::error::{Error, Result};
use crate::geom::{Aabb, Vec3};
use crate::provider::FieldProvider;

/// Lifecycle of a query point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParticleStatus {
    /// Not evolved yet.
    Pending,
    /// Field norm fell below tau.
    Converged,
    /// Hit the iteration cap while still moving.
    Exhausted,
    /// Encountered a non-finite field value.
    Diverged,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Particle {
    pub position: Vec3,
    pub status: ParticleStatus,
    /// Euler steps taken before stopping.
    pub iterations: usize,
}

impl Particle {
    pub fn at(position: Vec3) -> Self {
        Particle {
            position,
            status: ParticleStatus::Pending,
            iterations: 0,
        }
    }
}

/// Per-element particle populations.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrajectoryBatch {
    pub groups: Vec<(Element, Vec<Particle>)>,
}

impl TrajectoryBatch {
    pub fn total_particles(&self) -> usize {
        self.groups.iter().map(|(_, p)| p.len()).sum()
    }

    pub fn converged_count(&self) -> usize {
        self.groups
            .iter()
            .flat_map(|(_, p)| p.iter())
            .filter(|p| p.status == ParticleStatus::Converged)
            .count()
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Independent RNG stream per (seed, element), so a group's draw does not
/// depend on which other elements are budgeted.
pub(crate) fn element_rng(seed: u64, element: Element) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(splitmix64(seed ^ splitmix64(element as u64)))
}

fn sample_uniform(rng: &mut ChaCha8Rng, bbox: Aabb) -> Vec3 {
    Vec3::new(
        rng.gen_range(bbox.min.x..bbox.max.x),
        rng.gen_range(bbox.min.y..bbox.max.y),
        rng.gen_range(bbox.min.z..bbox.max.z),
    )
}

/// Uniform i.i.d. initialization inside `bbox`, deterministic per seed.
pub fn init_uniform(
    budget: &BTreeMap<Element, usize>,
    bbox: Aabb,
    seed: u64,
) -> Result<TrajectoryBatch> {
    if !(bbox.volume() > 0.0) {
        return Err(Error::domain("bounding box must have positive volume"));
    }
    let mut groups = Vec::new();
    for (&element, &count) in budget {
        let mut rng = element_rng(seed, element);
        let particles = (0..count)
            .map(|_| Particle::at(sample_uniform(&mut rng, bbox)))
            .collect();
        groups.push((element, particles));
    }
    Ok(TrajectoryBatch { groups })
}

/// Scores each pool candidate by the variance of field magnitudes among its
/// `knn_k` spatially nearest pool neighbors, then draws `budget` candidates
/// by softmax-weighted multinomial sampling without replacement.
///
/// A constant field gives all-equal scores and the draw degenerates to a
/// uniform subsample. Deterministic for a fixed seed.
pub fn adaptive_select<P: FieldProvider>(
    provider: &P,
    pool: &[Vec3],
    channel: usize,
    budget: usize,
    knn_k: usize,
    softmax_temp: Option<f64>,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<Vec3>> {
    if budget > pool.len() {
        return Err(Error::domain(format!(
            "budget {budget} exceeds pool size {}",
            pool.len()
        )));
    }
    if knn_k < 2 {
        return Err(Error::domain("knn_k must be at least 2"));
    }
    if budget == pool.len() {
        return Ok(pool.to_vec());
    }

    use rayon::prelude::*;
    let magnitudes: Vec<f64> = pool
        .par_iter()
        .map(|&q| provider.query_one(q, channel).norm())
        .collect();

    let k = knn_k.min(pool.len() - 1);
    let scores: Vec<f64> = pool
        .par_iter()
        .enumerate()
        .map(|(i, &p)| {
            let mut dist_buf: Vec<(f64, usize)> = Vec::with_capacity(pool.len() - 1);
            for (j, &q) in pool.iter().enumerate() {
                if j != i {
                    dist_buf.push((p.distance_sq(q), j));
                }
            }
            // Quickselect the k nearest; their order does not matter.
            dist_buf.select_nth_unstable_by(k - 1, |a, b| {
                a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal)
            });
            let neigh = &dist_buf[..k];
            let mean = neigh.iter().map(|&(_, j)| magnitudes[j]).sum::<f64>() / k as f64;
            neigh
                .iter()
                .map(|&(_, j)| (magnitudes[j] - mean).powi(2))
                .sum::<f64>()
                / k as f64
        })
        .collect();

    let temp = match softmax_temp {
        Some(t) if t > 0.0 => t,
        Some(_) => return Err(Error::domain("softmax_temp must be positive")),
        None => scores.iter().sum::<f64>() / scores.len() as f64,
    };
    let max_score = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let weights: Vec<f64> = if temp > 0.0 {
        scores.iter().map(|s| ((s - max_score) / temp).exp()).collect()
    } else {
        // Degenerate all-zero scores: uniform.
        vec![1.0; scores.len()]
    };

    // Multinomial without replacement.
    let mut selected = Vec::with_capacity(budget);
    let mut alive: Vec<usize> = (0..pool.len()).collect();
    for _ in 0..budget {
        let total: f64 = alive.iter().map(|&i| weights[i]).sum();
        let mut draw = rng.gen_range(0.0..total);
        let mut picked = alive.len() - 1;
        for (slot, &i) in alive.iter().enumerate() {
            draw -= weights[i];
            if draw < 0.0 {
                picked = slot;
                break;
            }
        }
        let idx = alive.swap_remove(picked);
        selected.push(pool[idx]);
    }
    Ok(selected)
}
