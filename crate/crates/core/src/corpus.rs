//! Synthetic molecule generation for self-contained studies.
//!
//! Molecules are grown as random bonded trees: a heavy-atom skeleton with
//! bond-like edge lengths, then terminally attached hydrogens. Univalent
//! elements (H, F, and the heavy halogens) only appear as leaves. Pairwise
//! floors keep geometry sane: 1.0 A between any two atoms and 1.5 A between
//! atoms of the same element (closer same-element contacts do not occur in
//! real molecules, and they shift the field zero near an atom by the softmax
//! leakage of the neighbor, which would dominate round-trip residuals).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::chem::{Atom, Element, ElementSet, Molecule};
use crate::error::{Error, Result};
use crate::geom::Vec3;

/// Corpus generation parameters.
#[derive(Debug, Clone)]
pub struct CorpusSpec {
    pub elements: ElementSet,
    pub min_atoms: usize,
    pub max_atoms: usize,
    /// Minimum pairwise interatomic distance (Angstrom).
    pub min_distance: f64,
    /// Minimum distance between atoms of the same element (Angstrom).
    pub min_same_element_distance: f64,
    /// Minimum distance between non-bonded atoms (Angstrom). The effective
    /// per-pair floor is raised above the covalent bond-inference cutoff, so
    /// that distance-based bond perception recovers exactly the generation
    /// tree; 1.7 A also matches geminal H contacts in real molecules.
    pub min_nonbonded_distance: f64,
    /// Cube volume per atom (Angstrom^3); bounds the molecule's compactness.
    pub volume_per_atom: f64,
}

impl Default for CorpusSpec {
    fn default() -> Self {
        CorpusSpec {
            elements: ElementSet::qm9(),
            min_atoms: 5,
            max_atoms: 30,
            min_distance: 1.0,
            min_same_element_distance: 1.5,
            min_nonbonded_distance: 1.7,
            volume_per_atom: 12.0,
        }
    }
}

impl CorpusSpec {
    fn validate(&self) -> Result<()> {
        if self.min_atoms == 0 || self.min_atoms > self.max_atoms {
            return Err(Error::domain("invalid atom-count range"));
        }
        if !(self.min_distance > 0.0) {
            return Err(Error::domain("min_distance must be positive"));
        }
        if !(self.volume_per_atom > 0.0) {
            return Err(Error::domain("volume_per_atom must be positive"));
        }
        Ok(())
    }
}

/// Heavy-element mix weights and per-molecule caps. Rare elements stay well
/// inside the default reconstruction query budgets.
fn heavy_mix(elements: &ElementSet) -> Vec<(Element, f64, usize)> {
    elements
        .elements()
        .iter()
        .filter_map(|&e| match e {
            Element::C => Some((e, 0.70, usize::MAX)),
            Element::O => Some((e, 0.12, 2)),
            Element::N => Some((e, 0.12, 2)),
            Element::F => Some((e, 0.06, 1)),
            Element::S => Some((e, 0.05, 1)),
            Element::Cl => Some((e, 0.05, 1)),
            Element::Br => Some((e, 0.04, 1)),
            Element::H => None,
        })
        .collect()
}

/// Skeleton connectivity a heavy atom may carry (bonds to other heavy
/// atoms). Quaternary centers are excluded: their attraction basins are a
/// few cubic Angstrom, too small for fixed query budgets to cover reliably.
fn heavy_degree_cap(e: Element) -> usize {
    match e {
        Element::C => 3,
        Element::N | Element::O | Element::S => 2,
        _ => 1,
    }
}

/// Generates one molecule. Deterministic per seed; bonds are left empty.
pub fn generate_molecule(spec: &CorpusSpec, seed: u64) -> Result<Molecule> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(spec.min_atoms..=spec.max_atoms);

    // QM9-like composition: roughly half the atoms are hydrogen, so a
    // 30-atom molecule carries 12-15 heavy atoms. At least one skeleton atom.
    let want_h = if spec.elements.channel_of(Element::H).is_some() && n > 1 {
        ((n as f64) * rng.gen_range(0.50..0.60)).round() as usize
    } else {
        0
    };
    let n_heavy = (n - want_h).max(1);

    let mix = heavy_mix(&spec.elements);
    if mix.is_empty() {
        return Err(Error::domain("element set has no heavy elements"));
    }
    let mut counts = vec![0usize; mix.len()];
    let mut heavy: Vec<Element> = vec![Element::C];
    if let Some(c_slot) = mix.iter().position(|m| m.0 == Element::C) {
        counts[c_slot] = 1;
    } else {
        heavy[0] = mix[0].0;
        counts[0] = 1;
    }
    while heavy.len() < n_heavy {
        let open: Vec<usize> = (0..mix.len()).filter(|&i| counts[i] < mix[i].2).collect();
        let total: f64 = open.iter().map(|&i| mix[i].1).sum();
        let mut draw = rng.gen_range(0.0..total);
        let mut picked = *open.last().expect("carbon is uncapped");
        for &i in &open {
            draw -= mix[i].1;
            if draw < 0.0 {
                picked = i;
                break;
            }
        }
        counts[picked] += 1;
        heavy.push(mix[picked].0);
    }

    // Compactness bound: the sphere holding n atoms at the target density.
    let r_max = (3.0 * spec.volume_per_atom * n as f64 / (4.0 * std::f64::consts::PI))
        .cbrt()
        .max(2.0);
    let same_floor = spec.min_same_element_distance.max(spec.min_distance);

    let mut atoms: Vec<Atom> = vec![Atom::new(heavy[0], Vec3::ZERO)];
    // Bond degree per atom, counting skeleton edges and hydrogens.
    let mut degree: Vec<usize> = vec![0];

    let random_direction = |rng: &mut ChaCha8Rng| loop {
        let v = Vec3::new(
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        );
        let norm_sq = v.norm_sq();
        if norm_sq > 1e-4 && norm_sq <= 1.0 {
            return v.normalized();
        }
    };

    let mut grow = |atoms: &mut Vec<Atom>,
                    degree: &mut Vec<usize>,
                    element: Element,
                    skeleton: bool,
                    rng: &mut ChaCha8Rng|
     -> Result<()> {
        let eligible = |atoms: &[Atom], degree: &[usize], i: usize| {
            let parent = atoms[i].element;
            let cap = if skeleton {
                heavy_degree_cap(parent)
            } else {
                parent.max_valence() as usize
            };
            parent != Element::H && degree[i] < cap
        };
        for _ in 0..100_000 {
            // Chain bias: prefer extending the most recent eligible atom, so
            // skeletons stay stringy rather than star-shaped.
            let parent_idx = if rng.gen_bool(0.5) {
                match (0..atoms.len()).rev().find(|&i| eligible(atoms, degree, i)) {
                    Some(i) => i,
                    None => break,
                }
            } else {
                let candidates: Vec<usize> =
                    (0..atoms.len()).filter(|&i| eligible(atoms, degree, i)).collect();
                if candidates.is_empty() {
                    break;
                }
                candidates[rng.gen_range(0..candidates.len())]
            };
            let parent = atoms[parent_idx];
            // Bond length scales with the covalent radii, so heavier pairs
            // sit at realistic separations.
            let r_sum = parent.element.covalent_radius() + element.covalent_radius();
            let lo = (0.95 * r_sum).max(if parent.element == element {
                same_floor
            } else {
                spec.min_distance
            });
            let hi = (1.15 * r_sum).max(lo + 1e-9);
            // Terminal atoms point away from the skeleton, as they do in
            // real molecules; skeleton growth stays isotropic.
            let dir = if skeleton {
                random_direction(rng)
            } else {
                let outward = if parent.position.norm() > 1e-9 {
                    parent.position.normalized()
                } else {
                    random_direction(rng)
                };
                (outward * 1.2 + random_direction(rng)).normalized()
            };
            let p = parent.position + dir * rng.gen_range(lo..hi);
            let floors_ok = atoms.iter().enumerate().all(|(i, a)| {
                let floor = if i == parent_idx {
                    if a.element == element {
                        same_floor
                    } else {
                        spec.min_distance
                    }
                } else {
                    // Stay clear of the bond-perception cutoff so only tree
                    // edges are recovered as bonds.
                    let cutoff = 1.5 * (a.element.covalent_radius() + element.covalent_radius());
                    spec.min_nonbonded_distance
                        .max(spec.min_distance)
                        .max(same_floor)
                        .max(cutoff + 0.1)
                };
                a.position.distance(p) >= floor
            });
            if p.norm() <= r_max && floors_ok {
                atoms.push(Atom::new(element, p));
                degree.push(1);
                degree[parent_idx] += 1;
                return Ok(());
            }
        }
        Err(Error::domain(format!(
            "could not place a {element} atom within the compactness bound"
        )))
    };

    for &element in heavy.iter().skip(1) {
        grow(&mut atoms, &mut degree, element, true, &mut rng)?;
    }
    // Hydrogens fill leftover valence; capacity may trim the count.
    let mut placed_h = 0;
    while placed_h < want_h {
        match grow(&mut atoms, &mut degree, Element::H, false, &mut rng) {
            Ok(()) => placed_h += 1,
            Err(_) => break,
        }
    }
    Ok(Molecule::new(atoms))
}

/// Generates `count` molecules with per-molecule seeds derived from `seed`.
pub fn generate_corpus(spec: &CorpusSpec, count: usize, seed: u64) -> Result<Vec<Molecule>> {
    (0..count)
        .map(|i| generate_molecule(spec, seed.wrapping_add(i as u64).wrapping_mul(0x9E37_79B9)))
        .collect()
}
