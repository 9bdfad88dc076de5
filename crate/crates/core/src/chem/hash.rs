//! Canonical structure hash via 1-WL color refinement.
//!
//! The digest is invariant under atom reordering and rigid motion; molecules
//! with isomorphic (element, bond-order)-labeled graphs hash equal. Like all
//! 1-WL schemes it cannot separate certain regular graph pairs; for the
//! corpus sizes used here that limitation is checked empirically in tests.

use sha2::{Digest, Sha256};

use super::molecule::Molecule;

/// 32-byte canonical digest.
pub fn canonical_hash(mol: &Molecule) -> [u8; 32] {
    let n = mol.len();
    let mut adj: Vec<Vec<(usize, u32)>> = vec![Vec::new(); n];
    for b in &mol.bonds {
        adj[b.a].push((b.b, b.order));
        adj[b.b].push((b.a, b.order));
    }

    // Initial color: the element.
    let mut colors: Vec<u64> = mol
        .atoms
        .iter()
        .map(|a| a.element as u64)
        .collect();

    // Refine until the color partition stabilizes (at most n rounds).
    for _ in 0..n.max(1) {
        let mut signatures: Vec<(u64, Vec<(u32, u64)>)> = Vec::with_capacity(n);
        for i in 0..n {
            let mut neigh: Vec<(u32, u64)> =
                adj[i].iter().map(|&(j, order)| (order, colors[j])).collect();
            neigh.sort_unstable();
            signatures.push((colors[i], neigh));
        }
        let mut sorted: Vec<&(u64, Vec<(u32, u64)>)> = signatures.iter().collect();
        sorted.sort();
        sorted.dedup();
        let relabel: std::collections::HashMap<_, u64> = sorted
            .iter()
            .enumerate()
            .map(|(rank, sig)| ((*sig).clone(), rank as u64))
            .collect();
        let next: Vec<u64> = signatures.iter().map(|s| relabel[s]).collect();
        let stable = {
            // Partition unchanged when the color classes map one-to-one.
            let mut pairs: Vec<(u64, u64)> =
                colors.iter().copied().zip(next.iter().copied()).collect();
            pairs.sort_unstable();
            pairs.dedup();
            let mut left: Vec<u64> = pairs.iter().map(|p| p.0).collect();
            let mut right: Vec<u64> = pairs.iter().map(|p| p.1).collect();
            left.dedup();
            right.sort_unstable();
            right.dedup();
            left.len() == pairs.len() && right.len() == pairs.len()
        };
        colors = next;
        if stable {
            break;
        }
    }

    // Digest the sorted multiset of (final color, element) plus the sorted
    // edge multiset expressed in final colors.
    let mut atom_summary: Vec<(u64, u64)> = mol
        .atoms
        .iter()
        .zip(&colors)
        .map(|(a, &c)| (c, a.element as u64))
        .collect();
    atom_summary.sort_unstable();

    let mut edge_summary: Vec<(u64, u64, u32)> = mol
        .bonds
        .iter()
        .map(|b| {
            let (ca, cb) = (colors[b.a], colors[b.b]);
            (ca.min(cb), ca.max(cb), b.order)
        })
        .collect();
    edge_summary.sort_unstable();

    let mut hasher = Sha256::new();
    hasher.update((n as u64).to_le_bytes());
    for (c, e) in atom_summary {
        hasher.update(c.to_le_bytes());
        hasher.update(e.to_le_bytes());
    }
    for (a, b, o) in edge_summary {
        hasher.update(a.to_le_bytes());
        hasher.update(b.to_le_bytes());
        hasher.update(o.to_le_bytes());
    }
    hasher.finalize().into()
}
