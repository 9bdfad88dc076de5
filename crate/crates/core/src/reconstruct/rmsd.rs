//! RMSD under optimal per-element assignment.

use std::collections::BTreeMap;

use crate::chem::{Element, Molecule};
use crate::geom::Vec3;

use super::assign::min_cost_assignment;

/// Either the RMSD over optimally matched atom pairs, or the per-element
/// count deltas (`a - b`) when the element multisets differ. A mismatch is a
/// reconstruction failure, not an error.
#[derive(Debug, Clone, PartialEq)]
pub enum RmsdOutcome {
    Matched { rmsd: f64 },
    Mismatch { deltas: BTreeMap<Element, i64> },
}

impl RmsdOutcome {
    pub fn rmsd(&self) -> Option<f64> {
        match self {
            RmsdOutcome::Matched { rmsd } => Some(*rmsd),
            RmsdOutcome::Mismatch { .. } => None,
        }
    }

    pub fn is_match(&self) -> bool {
        matches!(self, RmsdOutcome::Matched { .. })
    }
}

/// Compares element multisets; when they agree, matches atoms per element by
/// minimum-total-squared-distance assignment and returns the pooled RMSD.
/// No rigid alignment is performed.
pub fn rmsd(a: &Molecule, b: &Molecule) -> RmsdOutcome {
    let counts_a = a.element_counts();
    let counts_b = b.element_counts();
    if counts_a != counts_b {
        let mut deltas: BTreeMap<Element, i64> = BTreeMap::new();
        for (&e, &c) in &counts_a {
            deltas.insert(e, c as i64);
        }
        for (&e, &c) in &counts_b {
            *deltas.entry(e).or_insert(0) -= c as i64;
        }
        deltas.retain(|_, d| *d != 0);
        return RmsdOutcome::Mismatch { deltas };
    }

    let n = a.len();
    if n == 0 {
        return RmsdOutcome::Matched { rmsd: 0.0 };
    }

    let mut total_sq = 0.0;
    for (&element, _) in &counts_a {
        let pos_a: Vec<Vec3> = a
            .atoms
            .iter()
            .filter(|at| at.element == element)
            .map(|at| at.position)
            .collect();
        let pos_b: Vec<Vec3> = b
            .atoms
            .iter()
            .filter(|at| at.element == element)
            .map(|at| at.position)
            .collect();
        let cost: Vec<Vec<f64>> = pos_a
            .iter()
            .map(|&pa| pos_b.iter().map(|&pb| pa.distance_sq(pb)).collect())
            .collect();
        let assignment = min_cost_assignment(&cost);
        for (row, &col) in assignment.iter().enumerate() {
            total_sq += cost[row][col];
        }
    }
    RmsdOutcome::Matched {
        rmsd: (total_sq / n as f64).sqrt(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chem::Atom;
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn molecule(spec: &[(Element, Vec3)]) -> Molecule {
        Molecule::new(spec.iter().map(|&(e, p)| Atom::new(e, p)).collect())
    }

    #[test]
    fn identical_molecules_have_zero_rmsd() {
        let m = molecule(&[
            (Element::C, Vec3::ZERO),
            (Element::O, Vec3::new(1.2, 0.0, 0.0)),
        ]);
        assert_eq!(rmsd(&m, &m), RmsdOutcome::Matched { rmsd: 0.0 });
    }

    #[test]
    fn uniform_translation_is_the_shift_norm() {
        let m = molecule(&[
            (Element::C, Vec3::ZERO),
            (Element::C, Vec3::new(0.0, 2.0, 0.0)),
            (Element::H, Vec3::new(0.0, 0.0, 3.0)),
        ]);
        let shifted = Molecule::new(
            m.atoms
                .iter()
                .map(|a| Atom::new(a.element, a.position + Vec3::new(1.0, 0.0, 0.0)))
                .collect(),
        );
        match rmsd(&m, &shifted) {
            RmsdOutcome::Matched { rmsd } => assert!((rmsd - 1.0).abs() < 1e-12),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn permutation_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(91);
        let elements = [Element::C, Element::H, Element::O];
        for _ in 0..30 {
            let n = rng.gen_range(1..=8);
            let atoms: Vec<(Element, Vec3)> = (0..n)
                .map(|_| {
                    (
                        elements[rng.gen_range(0..elements.len())],
                        Vec3::new(
                            rng.gen_range(-3.0..3.0),
                            rng.gen_range(-3.0..3.0),
                            rng.gen_range(-3.0..3.0),
                        ),
                    )
                })
                .collect();
            let m = molecule(&atoms);
            let mut shuffled = atoms.clone();
            shuffled.shuffle(&mut rng);
            let p = molecule(&shuffled);
            match rmsd(&m, &p) {
                RmsdOutcome::Matched { rmsd } => {
                    assert!(rmsd < 1e-9, "permutation should cost nothing, got {rmsd}")
                }
                other => panic!("unexpected {other:?}"),
            }
        }
    }

    #[test]
    fn matches_brute_force_assignment() {
        let mut rng = ChaCha8Rng::seed_from_u64(92);
        for _ in 0..20 {
            let n = rng.gen_range(1..=6);
            let mut a_atoms = Vec::new();
            let mut b_atoms = Vec::new();
            for _ in 0..n {
                a_atoms.push((
                    Element::C,
                    Vec3::new(
                        rng.gen_range(-2.0..2.0),
                        rng.gen_range(-2.0..2.0),
                        rng.gen_range(-2.0..2.0),
                    ),
                ));
                b_atoms.push((
                    Element::C,
                    Vec3::new(
                        rng.gen_range(-2.0..2.0),
                        rng.gen_range(-2.0..2.0),
                        rng.gen_range(-2.0..2.0),
                    ),
                ));
            }
            let got = rmsd(&molecule(&a_atoms), &molecule(&b_atoms))
                .rmsd()
                .unwrap();

            // Brute force over all pairings.
            let mut perm: Vec<usize> = (0..n).collect();
            let mut best = f64::INFINITY;
            loop {
                let total: f64 = perm
                    .iter()
                    .enumerate()
                    .map(|(i, &j)| a_atoms[i].1.distance_sq(b_atoms[j].1))
                    .sum();
                best = best.min(total);
                if !next_permutation(&mut perm) {
                    break;
                }
            }
            let brute = (best / n as f64).sqrt();
            assert!((got - brute).abs() < 1e-9, "{got} vs {brute}");
        }
    }

    fn next_permutation(perm: &mut [usize]) -> bool {
        let n = perm.len();
        if n < 2 {
            return false;
        }
        let mut i = n - 1;
        while i > 0 && perm[i - 1] >= perm[i] {
            i -= 1;
        }
        if i == 0 {
            return false;
        }
        let mut j = n - 1;
        while perm[j] <= perm[i - 1] {
            j -= 1;
        }
        perm.swap(i - 1, j);
        perm[i..].reverse();
        true
    }

    #[test]
    fn multiset_mismatch_reports_deltas() {
        let a = molecule(&[(Element::C, Vec3::ZERO), (Element::O, Vec3::new(1.0, 0.0, 0.0))]);
        let b = molecule(&[(Element::C, Vec3::ZERO), (Element::N, Vec3::new(1.0, 0.0, 0.0))]);
        match rmsd(&a, &b) {
            RmsdOutcome::Mismatch { deltas } => {
                assert_eq!(deltas[&Element::O], 1);
                assert_eq!(deltas[&Element::N], -1);
                assert!(!deltas.contains_key(&Element::C));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn empty_molecules_match_at_zero() {
        assert_eq!(
            rmsd(&Molecule::default(), &Molecule::default()),
            RmsdOutcome::Matched { rmsd: 0.0 }
        );
    }
}
