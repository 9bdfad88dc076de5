//! Analytic ground-truth vector fields.
//!
//! For a query point `q` and element type `k` with atoms `a_j`, the field is
//!
//! ```text
//! v_k(q) = sum_j softmax_j(-d_j / sigma_sf) * w_mag(d_j) * (a_j - q) / (d_j + eps)
//! ```
//!
//! where the magnitude term `w_mag` selects the construction: the default
//! Gaussian-Clip `exp(-min(d, d_clip)^2 / (2 sigma_mag^2)) * min(d, d_clip)`
//! keeps informative gradients at range, the plain Gaussian decays to zero,
//! and the Tanh form saturates over a wider band. Element types absent from
//! the molecule optionally emit the negated type-agnostic attraction so that
//! no stable equilibrium exists anywhere near the structure.

mod params;
mod slice;

pub use params::{FieldParams, FieldVariant};
pub use slice::{slice_csv, SlicePlane};

use rayon::prelude::*;

use crate::chem::{Element, ElementSet, Molecule};
use crate::error::{Error, Result};
use crate::geom::Vec3;

/// Per-query field values for all configured element channels.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldSample {
    pub query: Vec3,
    /// One vector per element channel, in element-set order.
    pub vectors: Vec<Vec3>,
}

/// Result of a single-channel evaluation; `absent_type` marks channels whose
/// element does not occur in the molecule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldValue {
    pub vector: Vec3,
    pub absent_type: bool,
}

/// Softmax of `-d_j / sigma_sf`, computed with max-subtraction so that large
/// distances cannot overflow. Weights are positive and sum to 1.
pub fn softmax_weights(distances: &[f64], sigma_sf: f64) -> Result<Vec<f64>> {
    if distances.is_empty() {
        return Err(Error::domain("softmax over an empty distance list"));
    }
    if sigma_sf <= 0.0 {
        return Err(Error::domain("sigma_sf must be positive"));
    }
    let d_min = distances.iter().copied().fold(f64::INFINITY, f64::min);
    let mut weights: Vec<f64> = distances
        .iter()
        .map(|d| (-(d - d_min) / sigma_sf).exp())
        .collect();
    let total: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= total;
    }
    Ok(weights)
}

/// The Gaussian-Clip magnitude term of Eq-style field construction:
/// `exp(-dt^2 / (2 sigma_mag^2)) * dt` with `dt = min(d, d_clip)`.
/// Continuous in `d` and constant for `d >= d_clip`.
pub fn magnitude_weight(d: f64, params: &FieldParams) -> Result<f64> {
    if d < 0.0 {
        return Err(Error::domain("distance must be non-negative"));
    }
    Ok(gaussian_clip_magnitude(d, params.sigma_mag, params.d_clip))
}

fn gaussian_clip_magnitude(d: f64, sigma_mag: f64, d_clip: f64) -> f64 {
    let dt = d.min(d_clip);
    (-dt * dt / (2.0 * sigma_mag * sigma_mag)).exp() * dt
}

fn variant_magnitude(d: f64, params: &FieldParams) -> f64 {
    match params.variant {
        FieldVariant::GaussianClip => gaussian_clip_magnitude(d, params.sigma_mag, params.d_clip),
        FieldVariant::Gaussian => {
            (-d * d / (2.0 * params.sigma_mag * params.sigma_mag)).exp() * d
        }
        FieldVariant::Tanh => {
            let wide = 2.0 * params.sigma_mag;
            (d / params.sigma_mag).tanh() * (-d * d / (2.0 * wide * wide)).exp()
        }
    }
}

/// Reusable evaluator over one molecule. Atom positions are grouped per
/// element channel; summation order within a query is fixed to atom-index
/// order so that parallel and sequential evaluation agree bit-for-bit.
#[derive(Debug, Clone)]
pub struct FieldEvaluator {
    params: FieldParams,
    elements: ElementSet,
    per_channel: Vec<Vec<Vec3>>,
    all_atoms: Vec<Vec3>,
}

impl FieldEvaluator {
    pub fn new(mol: &Molecule, elements: &ElementSet, params: FieldParams) -> Result<Self> {
        params.validate()?;
        let mut per_channel = vec![Vec::new(); elements.len()];
        for atom in &mol.atoms {
            let k = elements.channel_of(atom.element).ok_or_else(|| {
                Error::domain(format!(
                    "molecule contains element {} outside the configured set",
                    atom.element
                ))
            })?;
            per_channel[k].push(atom.position);
        }
        Ok(FieldEvaluator {
            params,
            elements: elements.clone(),
            per_channel,
            all_atoms: mol.positions().collect(),
        })
    }

    /// Builds an evaluator from bare per-channel positions, bypassing the
    /// molecule type; used by synthetic providers.
    pub(crate) fn from_positions(
        elements: ElementSet,
        per_channel: Vec<Vec<Vec3>>,
        params: FieldParams,
    ) -> Self {
        debug_assert_eq!(per_channel.len(), elements.len());
        let all_atoms = per_channel.iter().flatten().copied().collect();
        FieldEvaluator {
            params,
            elements,
            per_channel,
            all_atoms,
        }
    }

    pub fn params(&self) -> &FieldParams {
        &self.params
    }

    pub fn elements(&self) -> &ElementSet {
        &self.elements
    }

    pub fn channel_present(&self, k: usize) -> bool {
        !self.per_channel[k].is_empty()
    }

    /// Softmax-weighted attraction toward the given positions.
    ///
    /// Atoms whose softmax weight falls below `exp(-SOFTMAX_WINDOW)` relative
    /// to the nearest one are skipped; the omitted mass is bounded by
    /// `n * max_magnitude * exp(-SOFTMAX_WINDOW)` (~1e-10 for the defaults),
    /// far below every tolerance used downstream. The window depends only on
    /// distances, so the evaluation stays exactly equivariant.
    fn attraction_over(&self, q: Vec3, positions: &[Vec3]) -> Vec3 {
        if positions.is_empty() {
            return Vec3::ZERO;
        }
        let sigma_sf = self.params.sigma_sf;
        let eps = self.params.eps_num;
        let mut d0_sq = f64::INFINITY;
        for p in positions {
            d0_sq = d0_sq.min(q.distance_sq(*p));
        }
        let d0 = d0_sq.sqrt();
        let cutoff = d0 + SOFTMAX_WINDOW * sigma_sf;
        let cutoff_sq = cutoff * cutoff;

        let mut numer = Vec3::ZERO;
        let mut denom = 0.0;
        for p in positions {
            let d_sq = q.distance_sq(*p);
            if d_sq > cutoff_sq {
                continue;
            }
            let d = d_sq.sqrt();
            let w = (-(d - d0) / sigma_sf).exp();
            let mag = variant_magnitude(d, &self.params);
            numer += (*p - q) * (w * mag / (d + eps));
            denom += w;
        }
        numer / denom
    }

    /// Attraction channel for a present element type.
    pub fn attraction(&self, q: Vec3, k: usize) -> Vec3 {
        self.attraction_over(q, &self.per_channel[k])
    }

    /// Negated type-agnostic attraction over all atoms of the molecule.
    pub fn repulsion(&self, q: Vec3) -> Vec3 {
        -self.attraction_over(q, &self.all_atoms)
    }

    /// Full per-channel semantics: attraction for present types; for absent
    /// types the repulsive field when `params.exclusive`, zero otherwise.
    pub fn channel(&self, q: Vec3, k: usize) -> Vec3 {
        if self.channel_present(k) {
            self.attraction(q, k)
        } else if self.params.exclusive {
            self.repulsion(q)
        } else {
            Vec3::ZERO
        }
    }

    pub fn sample(&self, q: Vec3) -> FieldSample {
        FieldSample {
            query: q,
            vectors: (0..self.elements.len()).map(|k| self.channel(q, k)).collect(),
        }
    }
}

/// Relative softmax cutoff in units of `sigma_sf`; see
/// [`FieldEvaluator::attraction_over`].
const SOFTMAX_WINDOW: f64 = 24.0;

fn single_channel(
    q: Vec3,
    mol: &Molecule,
    element: Element,
    params: &FieldParams,
) -> Result<FieldValue> {
    params.validate()?;
    let set = ElementSet::from_elements(vec![element]).expect("singleton set");
    let positions: Vec<Vec3> = mol
        .atoms
        .iter()
        .filter(|a| a.element == element)
        .map(|a| a.position)
        .collect();
    if positions.is_empty() {
        return Ok(FieldValue {
            vector: Vec3::ZERO,
            absent_type: true,
        });
    }
    let eval = FieldEvaluator {
        params: *params,
        elements: set,
        per_channel: vec![positions],
        all_atoms: Vec::new(),
    };
    Ok(FieldValue {
        vector: eval.attraction(q, 0),
        absent_type: false,
    })
}

/// The ground-truth Gaussian-Clip field for one element type. Absent types
/// yield a zero vector with the `absent_type` flag set.
pub fn ground_truth_field(
    q: Vec3,
    mol: &Molecule,
    element: Element,
    params: &FieldParams,
) -> Result<FieldValue> {
    let forced = FieldParams {
        variant: FieldVariant::GaussianClip,
        ..*params
    };
    single_channel(q, mol, element, &forced)
}

/// Field under the variant selected by `params.variant`; Gaussian-Clip is
/// identical to [`ground_truth_field`].
pub fn variant_field(
    q: Vec3,
    mol: &Molecule,
    element: Element,
    params: &FieldParams,
) -> Result<FieldValue> {
    single_channel(q, mol, element, params)
}

/// Repulsive field for an element type absent from the molecule: the negated
/// type-agnostic attraction over all atoms, leaving no stable equilibrium.
pub fn exclusive_field(
    q: Vec3,
    mol: &Molecule,
    absent: Element,
    params: &FieldParams,
) -> Result<Vec3> {
    params.validate()?;
    if mol.contains_element(absent) {
        return Err(Error::domain(format!(
            "element {absent} is present; the exclusive field applies to absent types only"
        )));
    }
    if mol.is_empty() {
        return Ok(Vec3::ZERO);
    }
    let set = ElementSet::from_elements(vec![absent]).expect("singleton set");
    let eval = FieldEvaluator {
        params: *params,
        elements: set,
        per_channel: vec![Vec::new()],
        all_atoms: mol.positions().collect(),
    };
    Ok(eval.repulsion(q))
}

/// Evaluates every element channel at every query point. Queries fan out
/// across threads; per-query results are independent, and the within-query
/// summation order is fixed, so the output is bit-identical to a sequential
/// evaluation.
pub fn field_batch(
    queries: &[Vec3],
    mol: &Molecule,
    elements: &ElementSet,
    params: &FieldParams,
) -> Result<Vec<FieldSample>> {
    if queries.is_empty() {
        return Err(Error::domain("field_batch requires at least one query"));
    }
    let eval = FieldEvaluator::new(mol, elements, *params)?;
    Ok(queries.par_iter().map(|&q| eval.sample(q)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chem::Atom;
    use crate::geom::Rotation;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn carbon_at_origin() -> Molecule {
        Molecule::new(vec![Atom::new(Element::C, Vec3::ZERO)])
    }

    fn random_molecule(rng: &mut ChaCha8Rng, n: usize) -> Molecule {
        let elements = [Element::C, Element::H, Element::O, Element::N, Element::F];
        Molecule::new(
            (0..n)
                .map(|_| {
                    Atom::new(
                        elements[rng.gen_range(0..elements.len())],
                        Vec3::new(
                            rng.gen_range(-3.0..3.0),
                            rng.gen_range(-3.0..3.0),
                            rng.gen_range(-3.0..3.0),
                        ),
                    )
                })
                .collect(),
        )
    }

    #[test]
    fn softmax_basics() {
        assert_eq!(softmax_weights(&[1.0], 0.1).unwrap(), vec![1.0]);
        let w = softmax_weights(&[1.0, 1.0], 0.1).unwrap();
        assert!((w[0] - 0.5).abs() < 1e-15 && (w[1] - 0.5).abs() < 1e-15);
        assert!(softmax_weights(&[], 0.1).is_err());
        assert!(softmax_weights(&[1.0], 0.0).is_err());
    }

    #[test]
    fn softmax_matches_direct_evaluation() {
        // softmax(-d/0.1) over [0.5, 1.5].
        let w = softmax_weights(&[0.5, 1.5], 0.1).unwrap();
        assert!((w[0] - 0.9999546021312976).abs() < 1e-15);
        assert!((w[1] - 4.5397868702434395e-05).abs() < 1e-18);
    }

    #[test]
    fn softmax_survives_huge_distances() {
        let w = softmax_weights(&[1.0e7, 1.0e7 + 0.1], 0.1).unwrap();
        assert!(w.iter().all(|x| x.is_finite()));
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn softmax_sums_to_one_randomized() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..200 {
            let n = rng.gen_range(1..30);
            let ds: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..20.0)).collect();
            let w = softmax_weights(&ds, 0.1).unwrap();
            assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            assert!(w.iter().all(|&x| x > 0.0 && x <= 1.0));
        }
    }

    #[test]
    fn magnitude_weight_values() {
        let p = FieldParams::default();
        assert_eq!(magnitude_weight(0.0, &p).unwrap(), 0.0);
        assert!((magnitude_weight(0.5, &p).unwrap() - 0.2697037536188133).abs() < 1e-15);
        // Clip plateau: d = 2.0 behaves exactly like d = 0.8.
        let at_clip = magnitude_weight(0.8, &p).unwrap();
        assert_eq!(magnitude_weight(2.0, &p).unwrap(), at_clip);
        assert!((at_clip - 0.16473939714735897).abs() < 1e-15);
        assert!(magnitude_weight(-0.1, &p).is_err());
    }

    #[test]
    fn single_atom_closed_form() {
        let p = FieldParams::default();
        let v = ground_truth_field(Vec3::new(0.0, 0.0, 0.5), &carbon_at_origin(), Element::C, &p)
            .unwrap();
        assert!(!v.absent_type);
        assert!(v.vector.x.abs() < 1e-18 && v.vector.y.abs() < 1e-18);
        assert!((v.vector.z - (-0.26970374822473836)).abs() < 1e-15);
    }

    #[test]
    fn zero_at_atom_center() {
        let p = FieldParams::default();
        let v = ground_truth_field(Vec3::ZERO, &carbon_at_origin(), Element::C, &p).unwrap();
        assert_eq!(v.vector, Vec3::ZERO);
    }

    #[test]
    fn antisymmetric_pair_cancels_at_midpoint() {
        let p = FieldParams::default();
        let mol = Molecule::new(vec![
            Atom::new(Element::C, Vec3::new(1.0, 0.0, 0.0)),
            Atom::new(Element::C, Vec3::new(-1.0, 0.0, 0.0)),
        ]);
        let v = ground_truth_field(Vec3::ZERO, &mol, Element::C, &p).unwrap();
        assert!(v.vector.norm() < 1e-15);
    }

    #[test]
    fn absent_type_flag_and_zero() {
        let p = FieldParams::default();
        let v = ground_truth_field(Vec3::new(1.0, 0.0, 0.0), &carbon_at_origin(), Element::F, &p)
            .unwrap();
        assert!(v.absent_type);
        assert_eq!(v.vector, Vec3::ZERO);
    }

    #[test]
    fn gaussian_clip_variant_equals_ground_truth() {
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        let p = FieldParams::default();
        for _ in 0..100 {
            let n = rng.gen_range(1..12);
            let mol = random_molecule(&mut rng, n);
            let q = Vec3::new(
                rng.gen_range(-4.0..4.0),
                rng.gen_range(-4.0..4.0),
                rng.gen_range(-4.0..4.0),
            );
            let e = Element::C;
            let a = ground_truth_field(q, &mol, e, &p).unwrap();
            let b = variant_field(q, &mol, e, &p).unwrap();
            assert!((a.vector - b.vector).norm() <= 1e-15);
        }
    }

    #[test]
    fn gaussian_vanishes_far_but_clip_does_not() {
        let q = Vec3::new(0.0, 0.0, 3.0);
        let mol = carbon_at_origin();
        let clip = variant_field(q, &mol, Element::C, &FieldParams::default()).unwrap();
        assert!((clip.vector.norm() - 0.16473939714735897).abs() < 1e-9);
        let gauss = variant_field(
            q,
            &mol,
            Element::C,
            &FieldParams {
                variant: FieldVariant::Gaussian,
                ..FieldParams::default()
            },
        )
        .unwrap();
        assert!(gauss.vector.norm() < 1e-8);
        // Direct evaluation of the Gaussian magnitude at d = 3, up to the
        // eps-regularized direction factor d / (d + eps).
        assert!((gauss.vector.norm() - 6.700894308609498e-10).abs() < 1e-16);
    }

    #[test]
    fn tanh_variant_saturates_then_decays() {
        let p = FieldParams {
            variant: FieldVariant::Tanh,
            ..FieldParams::default()
        };
        let mol = carbon_at_origin();
        let near = variant_field(Vec3::new(0.0, 0.0, 0.6), &mol, Element::C, &p).unwrap();
        let far = variant_field(Vec3::new(0.0, 0.0, 3.0), &mol, Element::C, &p).unwrap();
        assert!(near.vector.norm() > 0.5, "saturated band is strong");
        assert!(far.vector.norm() < 0.01, "wide Gaussian envelope decays");
        assert!(far.vector.norm() > 1e-4, "but slower than the plain Gaussian");
    }

    #[test]
    fn exclusive_field_points_outward() {
        let p = FieldParams::default();
        let mol = carbon_at_origin();
        let v = exclusive_field(Vec3::new(0.0, 0.0, 0.5), &mol, Element::F, &p).unwrap();
        assert!(v.x.abs() < 1e-18 && v.y.abs() < 1e-18);
        assert!((v.z - 0.26970374822473836).abs() < 1e-15);
    }

    #[test]
    fn exclusive_field_rejects_present_types() {
        let p = FieldParams::default();
        assert!(exclusive_field(Vec3::ZERO, &carbon_at_origin(), Element::C, &p).is_err());
    }

    #[test]
    fn exclusive_field_of_empty_molecule_is_zero() {
        let p = FieldParams::default();
        let v = exclusive_field(Vec3::new(1.0, 2.0, 3.0), &Molecule::default(), Element::C, &p)
            .unwrap();
        assert_eq!(v, Vec3::ZERO);
    }

    #[test]
    fn exclusive_dynamics_escape_bounding_sphere() {
        // A particle within 2 A of an atom, evolved under the repulsive
        // field, must leave a 5 A sphere within 500 Euler steps.
        let p = FieldParams::default();
        let mol = Molecule::new(vec![
            Atom::new(Element::C, Vec3::ZERO),
            Atom::new(Element::O, Vec3::new(1.4, 0.0, 0.0)),
        ]);
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        for _ in 0..20 {
            let mut q = Vec3::new(
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-2.0..2.0),
            );
            let mut escaped = false;
            for _ in 0..500 {
                if q.norm() > 5.0 {
                    escaped = true;
                    break;
                }
                let v = exclusive_field(q, &mol, Element::F, &p).unwrap();
                q += v * 0.1;
            }
            assert!(escaped || q.norm() > 5.0, "stuck at {q:?}");
        }
    }

    #[test]
    fn batch_matches_per_query_evaluation() {
        let mut rng = ChaCha8Rng::seed_from_u64(34);
        let mol = random_molecule(&mut rng, 8);
        let set = ElementSet::qm9();
        let p = FieldParams::default();
        let queries: Vec<Vec3> = (0..50)
            .map(|_| {
                Vec3::new(
                    rng.gen_range(-4.0..4.0),
                    rng.gen_range(-4.0..4.0),
                    rng.gen_range(-4.0..4.0),
                )
            })
            .collect();
        let batch = field_batch(&queries, &mol, &set, &p).unwrap();
        assert_eq!(batch.len(), queries.len());
        let eval = FieldEvaluator::new(&mol, &set, p).unwrap();
        for (sample, &q) in batch.iter().zip(&queries) {
            assert_eq!(sample.vectors.len(), set.len());
            for (k, v) in sample.vectors.iter().enumerate() {
                // Parallel evaluation must agree with the sequential path
                // bit-for-bit.
                assert_eq!(*v, eval.channel(q, k));
            }
        }
        assert!(field_batch(&[], &mol, &set, &p).is_err());
    }

    #[test]
    fn field_is_bounded_by_max_magnitude() {
        let mut rng = ChaCha8Rng::seed_from_u64(35);
        for variant in [FieldVariant::GaussianClip, FieldVariant::Gaussian, FieldVariant::Tanh] {
            let p = FieldParams {
                variant,
                exclusive: true,
                ..FieldParams::default()
            };
            let bound = p.max_magnitude() * (1.0 + 1e-12);
            let mol = random_molecule(&mut rng, 10);
            let eval = FieldEvaluator::new(&mol, &ElementSet::qm9(), p).unwrap();
            for _ in 0..200 {
                let q = Vec3::new(
                    rng.gen_range(-6.0..6.0),
                    rng.gen_range(-6.0..6.0),
                    rng.gen_range(-6.0..6.0),
                );
                for k in 0..5 {
                    assert!(eval.channel(q, k).norm() <= bound);
                }
            }
        }
    }

    #[test]
    fn zero_at_center_of_isolated_atom() {
        // Nearest same-type atom far beyond 4 * d_clip.
        let p = FieldParams::default();
        let mol = Molecule::new(vec![
            Atom::new(Element::C, Vec3::ZERO),
            Atom::new(Element::C, Vec3::new(6.0, 0.0, 0.0)),
        ]);
        let v = ground_truth_field(Vec3::ZERO, &mol, Element::C, &p).unwrap();
        assert!(v.vector.norm() < 1e-9);
    }

    #[test]
    fn equivariance_under_rigid_motion() {
        let mut rng = ChaCha8Rng::seed_from_u64(36);
        for variant in [FieldVariant::GaussianClip, FieldVariant::Gaussian, FieldVariant::Tanh] {
            let p = FieldParams {
                variant,
                exclusive: true,
                ..FieldParams::default()
            };
            for _ in 0..30 {
                let n = rng.gen_range(1..10);
                let mol = random_molecule(&mut rng, n);
                let rot = Rotation::random(&mut rng);
                let t = Vec3::new(
                    rng.gen_range(-5.0..5.0),
                    rng.gen_range(-5.0..5.0),
                    rng.gen_range(-5.0..5.0),
                );
                let moved = Molecule::new(
                    mol.atoms
                        .iter()
                        .map(|a| Atom::new(a.element, rot.apply(a.position) + t))
                        .collect(),
                );
                let set = ElementSet::qm9();
                let ev = FieldEvaluator::new(&mol, &set, p).unwrap();
                let ev_moved = FieldEvaluator::new(&moved, &set, p).unwrap();
                let q = Vec3::new(
                    rng.gen_range(-4.0..4.0),
                    rng.gen_range(-4.0..4.0),
                    rng.gen_range(-4.0..4.0),
                );
                for k in 0..set.len() {
                    let expect = rot.apply(ev.channel(q, k));
                    let got = ev_moved.channel(rot.apply(q) + t, k);
                    assert!(
                        (expect - got).norm() < 1e-12,
                        "variant {variant:?} violated equivariance"
                    );
                }
            }
        }
    }

    #[test]
    fn finite_difference_continuity_probe() {
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        let p = FieldParams::default();
        let mol = random_molecule(&mut rng, 8);
        let eval = FieldEvaluator::new(&mol, &ElementSet::qm9(), p).unwrap();
        let h = 1e-5;
        for _ in 0..200 {
            let q = Vec3::new(
                rng.gen_range(-3.0..3.0),
                rng.gen_range(-3.0..3.0),
                rng.gen_range(-3.0..3.0),
            );
            let u = Vec3::new(
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            )
            .normalized();
            for k in 0..5 {
                let dv = (eval.channel(q + u * h, k) - eval.channel(q, k)).norm() / h;
                assert!(dv < 20.0, "Lipschitz probe blew up: {dv}");
            }
        }
    }
}
