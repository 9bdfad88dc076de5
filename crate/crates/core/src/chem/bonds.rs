//! Distance-based covalent bond inference and greedy valence completion.

use std::collections::HashMap;

use super::molecule::{Bond, Molecule};
use crate::geom::Vec3;

/// Infers single bonds: atoms i, j bond iff
/// `|x_i - x_j| <= rho * (r_cov_i + r_cov_j)`.
///
/// Neighbor candidates come from a uniform spatial hash with cell size equal
/// to the largest possible cutoff, keeping the cost near-linear in atom count.
pub fn infer_bonds(mol: &Molecule, rho: f64) -> Molecule {
    let mut out = mol.clone();
    out.bonds.clear();
    if mol.len() < 2 || rho <= 0.0 {
        return out;
    }

    let max_radius = mol
        .atoms
        .iter()
        .map(|a| a.element.covalent_radius())
        .fold(0.0f64, f64::max);
    let cell = (2.0 * rho * max_radius).max(1e-9);

    let key = |p: Vec3| -> (i64, i64, i64) {
        (
            (p.x / cell).floor() as i64,
            (p.y / cell).floor() as i64,
            (p.z / cell).floor() as i64,
        )
    };

    let mut grid: HashMap<(i64, i64, i64), Vec<usize>> = HashMap::new();
    for (i, a) in mol.atoms.iter().enumerate() {
        grid.entry(key(a.position)).or_default().push(i);
    }

    for (i, a) in mol.atoms.iter().enumerate() {
        let (cx, cy, cz) = key(a.position);
        for dx in -1..=1 {
            for dy in -1..=1 {
                for dz in -1..=1 {
                    let Some(cands) = grid.get(&(cx + dx, cy + dy, cz + dz)) else {
                        continue;
                    };
                    for &j in cands {
                        if j <= i {
                            continue;
                        }
                        let b = &mol.atoms[j];
                        let cutoff =
                            rho * (a.element.covalent_radius() + b.element.covalent_radius());
                        if a.position.distance_sq(b.position) <= cutoff * cutoff {
                            out.bonds.push(Bond::new(i, j, 1));
                        }
                    }
                }
            }
        }
    }
    out.bonds.sort_by_key(|b| (b.a, b.b));
    out
}

/// Greedy valence completion: repeatedly upgrades the shortest bond whose
/// both endpoints still have spare valence, until no legal upgrade remains.
///
/// Deterministic; ties broken by atom-index order. Bond orders cap at 3.
pub fn complete_valences(mol: &Molecule) -> Molecule {
    let mut out = mol.clone();
    let mut valence = out.valencies();

    let mut order: Vec<usize> = (0..out.bonds.len()).collect();
    order.sort_by(|&i, &j| {
        let bi = &out.bonds[i];
        let bj = &out.bonds[j];
        let li = out.atoms[bi.a].position.distance_sq(out.atoms[bi.b].position);
        let lj = out.atoms[bj.a].position.distance_sq(out.atoms[bj.b].position);
        li.partial_cmp(&lj)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| (bi.a, bi.b).cmp(&(bj.a, bj.b)))
    });

    let mut changed = true;
    while changed {
        changed = false;
        for &idx in &order {
            let (a, b, bond_order) = {
                let bond = &out.bonds[idx];
                (bond.a, bond.b, bond.order)
            };
            if bond_order >= 3 {
                continue;
            }
            let spare_a = out.atoms[a].element.max_valence().saturating_sub(valence[a]);
            let spare_b = out.atoms[b].element.max_valence().saturating_sub(valence[b]);
            if spare_a > 0 && spare_b > 0 {
                out.bonds[idx].order += 1;
                valence[a] += 1;
                valence[b] += 1;
                changed = true;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chem::{Atom, Element};
    use crate::geom::{Rotation, Vec3};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn two_carbons(dist: f64) -> Molecule {
        Molecule::new(vec![
            Atom::new(Element::C, Vec3::ZERO),
            Atom::new(Element::C, Vec3::new(dist, 0.0, 0.0)),
        ])
    }

    #[test]
    fn carbons_within_cutoff_bond() {
        // Sum of C radii is 1.52; cutoff at rho=1.5 is 2.28.
        let m = infer_bonds(&two_carbons(1.5), 1.5);
        assert_eq!(m.bonds.len(), 1);
        assert_eq!(m.bonds[0].order, 1);
    }

    #[test]
    fn carbons_beyond_cutoff_do_not_bond() {
        let m = infer_bonds(&two_carbons(3.0), 1.5);
        assert!(m.bonds.is_empty());
    }

    #[test]
    fn single_atom_has_no_bonds() {
        let m = infer_bonds(
            &Molecule::new(vec![Atom::new(Element::C, Vec3::ZERO)]),
            1.5,
        );
        assert!(m.bonds.is_empty());
    }

    #[test]
    fn matches_brute_force_on_random_clouds() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let elements = [Element::C, Element::H, Element::O, Element::S, Element::Br];
        for _ in 0..20 {
            let n = rng.gen_range(2..40);
            let atoms: Vec<Atom> = (0..n)
                .map(|_| {
                    Atom::new(
                        elements[rng.gen_range(0..elements.len())],
                        Vec3::new(
                            rng.gen_range(-5.0..5.0),
                            rng.gen_range(-5.0..5.0),
                            rng.gen_range(-5.0..5.0),
                        ),
                    )
                })
                .collect();
            let m = Molecule::new(atoms);
            let fast = infer_bonds(&m, 1.5);

            let mut brute = Vec::new();
            for i in 0..m.len() {
                for j in (i + 1)..m.len() {
                    let cutoff = 1.5
                        * (m.atoms[i].element.covalent_radius()
                            + m.atoms[j].element.covalent_radius());
                    if m.atoms[i].position.distance(m.atoms[j].position) <= cutoff {
                        brute.push(Bond::new(i, j, 1));
                    }
                }
            }
            assert_eq!(fast.bonds, brute);
        }
    }

    #[test]
    fn invariant_under_rigid_motion() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let m = {
            let atoms: Vec<Atom> = (0..15)
                .map(|_| {
                    Atom::new(
                        Element::C,
                        Vec3::new(
                            rng.gen_range(-3.0..3.0),
                            rng.gen_range(-3.0..3.0),
                            rng.gen_range(-3.0..3.0),
                        ),
                    )
                })
                .collect();
            Molecule::new(atoms)
        };
        let r = Rotation::random(&mut rng);
        let t = Vec3::new(4.0, -2.0, 7.5);
        let moved = Molecule::new(
            m.atoms
                .iter()
                .map(|a| Atom::new(a.element, r.apply(a.position) + t))
                .collect(),
        );
        let bonds_a: Vec<(usize, usize)> =
            infer_bonds(&m, 1.5).bonds.iter().map(|b| (b.a, b.b)).collect();
        let bonds_b: Vec<(usize, usize)> = infer_bonds(&moved, 1.5)
            .bonds
            .iter()
            .map(|b| (b.a, b.b))
            .collect();
        assert_eq!(bonds_a, bonds_b);
    }

    #[test]
    fn larger_rho_yields_superset() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let atoms: Vec<Atom> = (0..25)
            .map(|_| {
                Atom::new(
                    Element::C,
                    Vec3::new(
                        rng.gen_range(-4.0..4.0),
                        rng.gen_range(-4.0..4.0),
                        rng.gen_range(-4.0..4.0),
                    ),
                )
            })
            .collect();
        let m = Molecule::new(atoms);
        let small: std::collections::HashSet<(usize, usize)> =
            infer_bonds(&m, 1.0).bonds.iter().map(|b| (b.a, b.b)).collect();
        let large: std::collections::HashSet<(usize, usize)> =
            infer_bonds(&m, 1.5).bonds.iter().map(|b| (b.a, b.b)).collect();
        assert!(small.is_subset(&large));
    }

    #[test]
    fn valence_completion_upgrades_shortest_first() {
        // C=C ethene-like core: two carbons each with two hydrogens; the C-C
        // bond is the only upgrade candidate.
        let mut atoms = vec![
            Atom::new(Element::C, Vec3::new(0.0, 0.0, 0.0)),
            Atom::new(Element::C, Vec3::new(1.33, 0.0, 0.0)),
        ];
        for (x, y) in [(-0.6, 0.9), (-0.6, -0.9), (1.93, 0.9), (1.93, -0.9)] {
            atoms.push(Atom::new(Element::H, Vec3::new(x, y, 0.0)));
        }
        let m = infer_bonds(&Molecule::new(atoms), 1.5);
        let completed = complete_valences(&m);
        let cc = completed
            .bonds
            .iter()
            .find(|b| (b.a, b.b) == (0, 1))
            .unwrap();
        assert_eq!(cc.order, 2);
        let v = completed.valencies();
        assert_eq!(v[0], 4);
        assert_eq!(v[1], 4);
    }

    #[test]
    fn valence_completion_never_exceeds_max() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let elements = [Element::C, Element::N, Element::O, Element::S];
        for _ in 0..10 {
            let atoms: Vec<Atom> = (0..12)
                .map(|_| {
                    Atom::new(
                        elements[rng.gen_range(0..elements.len())],
                        Vec3::new(
                            rng.gen_range(-2.0..2.0),
                            rng.gen_range(-2.0..2.0),
                            rng.gen_range(-2.0..2.0),
                        ),
                    )
                })
                .collect();
            let base = infer_bonds(&Molecule::new(atoms), 1.2);
            let before = base.valencies();
            let m = complete_valences(&base);
            for (i, &v) in m.valencies().iter().enumerate() {
                let max = m.atoms[i].element.max_valence();
                if before[i] <= max {
                    assert!(v <= max, "atom {i} overflowed: {v} > {max}");
                } else {
                    // Over-bonded input must not be upgraded further.
                    assert_eq!(v, before[i]);
                }
            }
            for b in &m.bonds {
                assert!(b.order <= 3);
            }
        }
    }
}
