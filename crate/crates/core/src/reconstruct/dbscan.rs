//! DBSCAN with a uniform spatial hash for near-linear neighbor queries.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::geom::Vec3;

/// Noise label.
pub const NOISE: i32 = -1;
const UNDEFINED: i32 = -2;

/// Standard DBSCAN semantics: a core point has at least `n_min` neighbors
/// within `eps` (itself included). Returns one label per input point, `-1`
/// for noise; cluster ids are assigned in scan order, so the labeling is
/// deterministic for a fixed input order and equal, up to renaming, for
/// permuted inputs.
pub fn dbscan(points: &[Vec3], eps: f64, n_min: usize) -> Result<Vec<i32>> {
    if !(eps > 0.0) {
        return Err(Error::domain("dbscan eps must be positive"));
    }
    if n_min < 1 {
        return Err(Error::domain("dbscan n_min must be at least 1"));
    }
    let n = points.len();
    if n == 0 {
        return Ok(Vec::new());
    }

    let cell = eps;
    let key = |p: Vec3| -> (i64, i64, i64) {
        (
            (p.x / cell).floor() as i64,
            (p.y / cell).floor() as i64,
            (p.z / cell).floor() as i64,
        )
    };
    let mut grid: HashMap<(i64, i64, i64), Vec<usize>> = HashMap::new();
    for (i, &p) in points.iter().enumerate() {
        grid.entry(key(p)).or_default().push(i);
    }

    let eps_sq = eps * eps;
    // Candidates come from the 27 surrounding cells; results are sorted so
    // border-point assignment does not depend on hash iteration order.
    let neighbors = |i: usize| -> Vec<usize> {
        let p = points[i];
        let (cx, cy, cz) = key(p);
        let mut out = Vec::new();
        for dx in -1..=1 {
            for dy in -1..=1 {
                for dz in -1..=1 {
                    if let Some(cands) = grid.get(&(cx + dx, cy + dy, cz + dz)) {
                        for &j in cands {
                            if points[j].distance_sq(p) <= eps_sq {
                                out.push(j);
                            }
                        }
                    }
                }
            }
        }
        out.sort_unstable();
        out
    };

    let mut labels = vec![UNDEFINED; n];
    let mut cluster = 0i32;
    for i in 0..n {
        if labels[i] != UNDEFINED {
            continue;
        }
        let neigh = neighbors(i);
        if neigh.len() < n_min {
            labels[i] = NOISE;
            continue;
        }
        labels[i] = cluster;
        let mut seeds: Vec<usize> = neigh.into_iter().filter(|&j| j != i).collect();
        let mut at = 0;
        while at < seeds.len() {
            let j = seeds[at];
            at += 1;
            if labels[j] == NOISE {
                labels[j] = cluster; // border point claimed by this cluster
            }
            if labels[j] != UNDEFINED {
                continue;
            }
            labels[j] = cluster;
            let jn = neighbors(j);
            if jn.len() >= n_min {
                seeds.extend(jn);
            }
        }
        cluster += 1;
    }
    Ok(labels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Reference O(n^2) implementation of the same pseudocode.
    pub(crate) fn dbscan_brute(points: &[Vec3], eps: f64, n_min: usize) -> Vec<i32> {
        let n = points.len();
        let eps_sq = eps * eps;
        let neighbors = |i: usize| -> Vec<usize> {
            (0..n)
                .filter(|&j| points[j].distance_sq(points[i]) <= eps_sq)
                .collect()
        };
        let mut labels = vec![UNDEFINED; n];
        let mut cluster = 0i32;
        for i in 0..n {
            if labels[i] != UNDEFINED {
                continue;
            }
            let neigh = neighbors(i);
            if neigh.len() < n_min {
                labels[i] = NOISE;
                continue;
            }
            labels[i] = cluster;
            let mut seeds: Vec<usize> = neigh.into_iter().filter(|&j| j != i).collect();
            let mut at = 0;
            while at < seeds.len() {
                let j = seeds[at];
                at += 1;
                if labels[j] == NOISE {
                    labels[j] = cluster;
                }
                if labels[j] != UNDEFINED {
                    continue;
                }
                labels[j] = cluster;
                let jn = neighbors(j);
                if jn.len() >= n_min {
                    seeds.extend(jn);
                }
            }
            cluster += 1;
        }
        labels
    }

    #[test]
    fn empty_input() {
        assert!(dbscan(&[], 0.1, 3).unwrap().is_empty());
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(dbscan(&[Vec3::ZERO], 0.0, 3).is_err());
        assert!(dbscan(&[Vec3::ZERO], 0.1, 0).is_err());
    }

    #[test]
    fn coincident_points_form_one_cluster() {
        let pts = vec![Vec3::new(1.0, 2.0, 3.0); 5];
        let labels = dbscan(&pts, 0.1, 3).unwrap();
        assert!(labels.iter().all(|&l| l == 0));
    }

    #[test]
    fn sparse_points_are_noise() {
        let pts = vec![
            Vec3::ZERO,
            Vec3::new(10.0, 0.0, 0.0),
            Vec3::new(0.0, 10.0, 0.0),
        ];
        let labels = dbscan(&pts, 0.1, 3).unwrap();
        assert!(labels.iter().all(|&l| l == NOISE));
    }

    #[test]
    fn two_blobs_two_clusters() {
        let mut rng = ChaCha8Rng::seed_from_u64(71);
        let mut pts = Vec::new();
        for center in [Vec3::ZERO, Vec3::new(5.0, 0.0, 0.0)] {
            for _ in 0..20 {
                pts.push(
                    center
                        + Vec3::new(
                            rng.gen_range(-0.03..0.03),
                            rng.gen_range(-0.03..0.03),
                            rng.gen_range(-0.03..0.03),
                        ),
                );
            }
        }
        let labels = dbscan(&pts, 0.1, 3).unwrap();
        assert_eq!(labels[..20].iter().collect::<std::collections::HashSet<_>>().len(), 1);
        assert_eq!(labels[20..].iter().collect::<std::collections::HashSet<_>>().len(), 1);
        assert_ne!(labels[0], labels[20]);
        assert!(labels.iter().all(|&l| l != NOISE));
    }

    #[test]
    fn matches_brute_force_on_random_inputs() {
        let mut rng = ChaCha8Rng::seed_from_u64(72);
        for trial in 0..50 {
            let n = rng.gen_range(1..=300);
            let scale = if trial % 2 == 0 { 1.0 } else { 0.3 };
            let pts: Vec<Vec3> = (0..n)
                .map(|_| {
                    Vec3::new(
                        rng.gen_range(-scale..scale),
                        rng.gen_range(-scale..scale),
                        rng.gen_range(-scale..scale),
                    )
                })
                .collect();
            let fast = dbscan(&pts, 0.1, 3).unwrap();
            let brute = dbscan_brute(&pts, 0.1, 3);
            assert_eq!(fast, brute, "divergence on trial {trial} with {n} points");
        }
    }

    #[test]
    fn permutation_invariance_up_to_renaming() {
        let mut rng = ChaCha8Rng::seed_from_u64(73);
        let mut pts = Vec::new();
        for c in [Vec3::ZERO, Vec3::new(3.0, 1.0, 0.0), Vec3::new(-2.0, 2.0, 2.0)] {
            for _ in 0..15 {
                pts.push(
                    c + Vec3::new(
                        rng.gen_range(-0.04..0.04),
                        rng.gen_range(-0.04..0.04),
                        rng.gen_range(-0.04..0.04),
                    ),
                );
            }
        }
        let labels = dbscan(&pts, 0.12, 3).unwrap();
        use rand::seq::SliceRandom;
        let mut perm: Vec<usize> = (0..pts.len()).collect();
        perm.shuffle(&mut rng);
        let shuffled: Vec<Vec3> = perm.iter().map(|&i| pts[i]).collect();
        let relabeled = dbscan(&shuffled, 0.12, 3).unwrap();
        // Same partition: points sharing a label before must share one after.
        let mut mapping: HashMap<i32, i32> = HashMap::new();
        for (new_idx, &old_idx) in perm.iter().enumerate() {
            let (old_l, new_l) = (labels[old_idx], relabeled[new_idx]);
            assert_eq!(old_l == NOISE, new_l == NOISE);
            if old_l != NOISE {
                let expect = *mapping.entry(old_l).or_insert(new_l);
                assert_eq!(expect, new_l);
            }
        }
    }
}
