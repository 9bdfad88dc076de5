//! One-dimensional Wasserstein and total-variation distances.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// W1 between two empirical distributions given as raw samples, computed as
/// the integral of |CDF_a - CDF_b| over the merged sorted support. Exact for
/// point-mass empirical measures; symmetric and triangle-inequality-valid.
pub fn wasserstein1(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::domain("wasserstein1 requires non-empty sample sets"));
    }
    if a.iter().chain(b).any(|x| !x.is_finite()) {
        return Err(Error::domain("wasserstein1 requires finite samples"));
    }
    let mut sa = a.to_vec();
    let mut sb = b.to_vec();
    sa.sort_by(|x, y| x.partial_cmp(y).unwrap());
    sb.sort_by(|x, y| x.partial_cmp(y).unwrap());

    let (na, nb) = (sa.len() as f64, sb.len() as f64);
    let mut i = 0usize;
    let mut j = 0usize;
    let mut total = 0.0;
    let mut prev = sa[0].min(sb[0]);
    while i < sa.len() || j < sb.len() {
        let next = match (sa.get(i), sb.get(j)) {
            (Some(&x), Some(&y)) => x.min(y),
            (Some(&x), None) => x,
            (None, Some(&y)) => y,
            (None, None) => break,
        };
        let cdf_a = i as f64 / na;
        let cdf_b = j as f64 / nb;
        total += (cdf_a - cdf_b).abs() * (next - prev);
        while i < sa.len() && sa[i] == next {
            i += 1;
        }
        while j < sb.len() && sb[j] == next {
            j += 1;
        }
        prev = next;
    }
    Ok(total)
}

/// Categorical distribution over string labels; probabilities sum to one.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CategoricalDistribution {
    probs: BTreeMap<String, f64>,
}

impl CategoricalDistribution {
    /// Normalizes raw non-negative counts. An all-zero or empty count map
    /// yields the empty distribution.
    pub fn from_counts<I, S>(counts: I) -> Self
    where
        I: IntoIterator<Item = (S, f64)>,
        S: Into<String>,
    {
        let mut probs: BTreeMap<String, f64> = BTreeMap::new();
        for (label, c) in counts {
            if c > 0.0 {
                *probs.entry(label.into()).or_insert(0.0) += c;
            }
        }
        let total: f64 = probs.values().sum();
        if total > 0.0 {
            for v in probs.values_mut() {
                *v /= total;
            }
        }
        CategoricalDistribution { probs }
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn prob(&self, label: &str) -> f64 {
        self.probs.get(label).copied().unwrap_or(0.0)
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.probs.keys().map(|s| s.as_str())
    }
}

/// Total variation distance: half the L1 distance over the union of label
/// sets, in [0, 1]. When exactly one side is empty the distance is maximal
/// (1); two empty distributions are at distance 0.
pub fn total_variation(a: &CategoricalDistribution, b: &CategoricalDistribution) -> f64 {
    match (a.is_empty(), b.is_empty()) {
        (true, true) => return 0.0,
        (true, false) | (false, true) => return 1.0,
        _ => {}
    }
    let labels: std::collections::BTreeSet<&str> = a.labels().chain(b.labels()).collect();
    0.5 * labels
        .into_iter()
        .map(|l| (a.prob(l) - b.prob(l)).abs())
        .sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Exact 1-D optimal transport by greedy mass movement over sorted piles;
    /// the linear-programming optimum for convex ground cost.
    fn transport_oracle(a: &[f64], b: &[f64]) -> f64 {
        let mut sa = a.to_vec();
        let mut sb = b.to_vec();
        sa.sort_by(|x, y| x.partial_cmp(y).unwrap());
        sb.sort_by(|x, y| x.partial_cmp(y).unwrap());
        let ma = 1.0 / sa.len() as f64;
        let mb = 1.0 / sb.len() as f64;
        let mut rem_a = ma;
        let mut rem_b = mb;
        let mut i = 0;
        let mut j = 0;
        let mut cost = 0.0;
        while i < sa.len() && j < sb.len() {
            let moved = rem_a.min(rem_b);
            cost += moved * (sa[i] - sb[j]).abs();
            rem_a -= moved;
            rem_b -= moved;
            if rem_a <= 1e-15 {
                i += 1;
                rem_a = ma;
            }
            if rem_b <= 1e-15 {
                j += 1;
                rem_b = mb;
            }
        }
        cost
    }

    #[test]
    fn identical_samples_are_at_zero() {
        let s = vec![0.5, 1.0, 2.5];
        assert_eq!(wasserstein1(&s, &s).unwrap(), 0.0);
    }

    #[test]
    fn point_mass_shift() {
        assert!((wasserstein1(&[0.0], &[1.0]).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn empty_input_is_an_error() {
        assert!(wasserstein1(&[], &[1.0]).is_err());
        assert!(wasserstein1(&[1.0], &[]).is_err());
        assert!(wasserstein1(&[f64::NAN], &[1.0]).is_err());
    }

    #[test]
    fn matches_the_transport_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(101);
        for _ in 0..100 {
            let na = rng.gen_range(1..=50);
            let nb = rng.gen_range(1..=50);
            let a: Vec<f64> = (0..na).map(|_| rng.gen_range(-5.0..5.0)).collect();
            let b: Vec<f64> = (0..nb).map(|_| rng.gen_range(-5.0..5.0)).collect();
            let w = wasserstein1(&a, &b).unwrap();
            let oracle = transport_oracle(&a, &b);
            assert!((w - oracle).abs() < 1e-9, "w {w} oracle {oracle}");
        }
    }

    #[test]
    fn symmetry_and_triangle_inequality() {
        let mut rng = ChaCha8Rng::seed_from_u64(102);
        for _ in 0..100 {
            let gen = |rng: &mut ChaCha8Rng| -> Vec<f64> {
                let n = rng.gen_range(1..=20);
                (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect()
            };
            let (a, b, c) = (gen(&mut rng), gen(&mut rng), gen(&mut rng));
            let ab = wasserstein1(&a, &b).unwrap();
            let ba = wasserstein1(&b, &a).unwrap();
            assert!((ab - ba).abs() < 1e-12);
            let ac = wasserstein1(&a, &c).unwrap();
            let cb = wasserstein1(&c, &b).unwrap();
            assert!(ab <= ac + cb + 1e-12);
        }
    }

    #[test]
    fn scale_equivariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(103);
        let a: Vec<f64> = (0..30).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let b: Vec<f64> = (0..40).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let w = wasserstein1(&a, &b).unwrap();
        for c in [2.0, -3.0, 0.5] {
            let ca: Vec<f64> = a.iter().map(|x| c * x).collect();
            let cb: Vec<f64> = b.iter().map(|x| c * x).collect();
            let wc = wasserstein1(&ca, &cb).unwrap();
            assert!((wc - c.abs() * w).abs() < 1e-12);
        }
    }

    #[test]
    fn tv_basics() {
        let a = CategoricalDistribution::from_counts([("x", 7.0), ("y", 3.0)]);
        let same = total_variation(&a, &a);
        assert_eq!(same, 0.0);
        let b = CategoricalDistribution::from_counts([("x", 5.0), ("y", 5.0)]);
        assert!((total_variation(&a, &b) - 0.2).abs() < 1e-12);
        let disjoint = CategoricalDistribution::from_counts([("z", 1.0)]);
        assert!((total_variation(&a, &disjoint) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn tv_handles_empty_sides() {
        let empty = CategoricalDistribution::default();
        let a = CategoricalDistribution::from_counts([("x", 1.0)]);
        assert_eq!(total_variation(&empty, &empty), 0.0);
        assert_eq!(total_variation(&a, &empty), 1.0);
        assert_eq!(total_variation(&empty, &a), 1.0);
    }

    #[test]
    fn tv_invariant_under_label_permutation() {
        let mut rng = ChaCha8Rng::seed_from_u64(104);
        let labels = ["a", "b", "c", "d"];
        let counts_a: Vec<f64> = (0..4).map(|_| rng.gen_range(0.0..10.0)).collect();
        let counts_b: Vec<f64> = (0..4).map(|_| rng.gen_range(0.0..10.0)).collect();
        let dist = |order: &[usize]| {
            let a = CategoricalDistribution::from_counts(
                order.iter().map(|&i| (labels[i], counts_a[i])),
            );
            let b = CategoricalDistribution::from_counts(
                order.iter().map(|&i| (labels[i], counts_b[i])),
            );
            total_variation(&a, &b)
        };
        let base = dist(&[0, 1, 2, 3]);
        let permuted = dist(&[2, 0, 3, 1]);
        assert!((base - permuted).abs() < 1e-12);
    }
}
