//! Bond lengths, angles, valencies, and ring sizes from a bonded molecule.

use crate::chem::Molecule;

/// Geometric statistics of one molecule.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MolecularGeometry {
    /// One length (Angstrom) per bond.
    pub bond_lengths: Vec<f64>,
    /// One angle (degrees) per unordered pair of bonds sharing an atom.
    pub bond_angles_deg: Vec<f64>,
    /// Bond-order sum per atom.
    pub valencies: Vec<u32>,
    /// Smallest-set-of-smallest-rings cycle lengths.
    pub ring_sizes: Vec<usize>,
}

/// Extracts geometry from a molecule whose bonds are populated. Bond-free
/// molecules yield empty lists.
pub fn extract_geometry(mol: &Molecule) -> MolecularGeometry {
    let mut bond_lengths = Vec::with_capacity(mol.bonds.len());
    let mut adjacency: Vec<Vec<usize>> = vec![Vec::new(); mol.len()];
    for b in &mol.bonds {
        bond_lengths.push(mol.atoms[b.a].position.distance(mol.atoms[b.b].position));
        adjacency[b.a].push(b.b);
        adjacency[b.b].push(b.a);
    }

    let mut bond_angles_deg = Vec::new();
    for (center, neighbors) in adjacency.iter().enumerate() {
        for (idx, &i) in neighbors.iter().enumerate() {
            for &k in &neighbors[idx + 1..] {
                let u = mol.atoms[i].position - mol.atoms[center].position;
                let v = mol.atoms[k].position - mol.atoms[center].position;
                let denom = u.norm() * v.norm();
                if denom > 0.0 {
                    let cos = (u.dot(v) / denom).clamp(-1.0, 1.0);
                    bond_angles_deg.push(cos.acos().to_degrees());
                }
            }
        }
    }

    MolecularGeometry {
        bond_lengths,
        bond_angles_deg,
        valencies: mol.valencies(),
        ring_sizes: sssr_ring_sizes(mol),
    }
}

/// Smallest-set-of-smallest-rings sizes over the bond graph.
///
/// Candidate cycles are, per edge, a shortest cycle through that edge; the
/// final set greedily picks candidates by increasing length subject to GF(2)
/// independence of their edge-incidence vectors, up to the cyclomatic number.
pub fn sssr_ring_sizes(mol: &Molecule) -> Vec<usize> {
    let n = mol.len();
    let m = mol.bonds.len();
    if n == 0 || m == 0 {
        return Vec::new();
    }
    let components = crate::chem::connected_components(mol);
    let cyclomatic = m + components;
    if cyclomatic <= n {
        return Vec::new(); // forest
    }
    let ring_count = cyclomatic - n;

    let mut edge_index = std::collections::HashMap::new();
    let mut adjacency: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n]; // (neighbor, edge id)
    for (eid, b) in mol.bonds.iter().enumerate() {
        edge_index.insert((b.a.min(b.b), b.a.max(b.b)), eid);
        adjacency[b.a].push((b.b, eid));
        adjacency[b.b].push((b.a, eid));
    }

    // Shortest cycle through each edge: BFS from one endpoint to the other
    // with the edge removed.
    let mut candidates: Vec<Vec<u64>> = Vec::new(); // edge bitsets
    let mut candidate_lens: Vec<usize> = Vec::new();
    let words = m.div_ceil(64);
    for (eid, b) in mol.bonds.iter().enumerate() {
        let (start, goal) = (b.a, b.b);
        let mut parent_edge: Vec<Option<(usize, usize)>> = vec![None; n]; // (parent vertex, via edge)
        let mut seen = vec![false; n];
        seen[start] = true;
        let mut queue = std::collections::VecDeque::from([start]);
        'bfs: while let Some(v) = queue.pop_front() {
            for &(w, via) in &adjacency[v] {
                if via == eid || seen[w] {
                    continue;
                }
                seen[w] = true;
                parent_edge[w] = Some((v, via));
                if w == goal {
                    break 'bfs;
                }
                queue.push_back(w);
            }
        }
        if !seen[goal] {
            continue; // bridge edge, no cycle
        }
        let mut bits = vec![0u64; words];
        let mut set = |e: usize| bits[e / 64] |= 1 << (e % 64);
        set(eid);
        let mut len = 1;
        let mut at = goal;
        while at != start {
            let (p, via) = parent_edge[at].expect("path back to start");
            set(via);
            len += 1;
            at = p;
        }
        candidates.push(bits);
        candidate_lens.push(len);
    }

    let mut order: Vec<usize> = (0..candidates.len()).collect();
    order.sort_by_key(|&i| (candidate_lens[i], candidates[i].clone()));

    // Greedy GF(2) independence via Gaussian elimination.
    let mut basis: Vec<Vec<u64>> = Vec::new();
    let mut sizes = Vec::new();
    for idx in order {
        if sizes.len() == ring_count {
            break;
        }
        let mut vec = candidates[idx].clone();
        for b in &basis {
            let pivot = leading_bit(b);
            if pivot.is_some() && pivot == leading_bit(&vec) {
                for (v, bw) in vec.iter_mut().zip(b) {
                    *v ^= bw;
                }
            }
        }
        if vec.iter().any(|&w| w != 0) {
            // Keep the basis in reduced order by leading bit.
            basis.push(vec);
            basis.sort_by_key(|b| std::cmp::Reverse(leading_bit(b)));
            sizes.push(candidate_lens[idx]);
        }
    }
    sizes.sort_unstable();
    sizes
}

fn leading_bit(bits: &[u64]) -> Option<usize> {
    for (w, &word) in bits.iter().enumerate().rev() {
        if word != 0 {
            return Some(w * 64 + 63 - word.leading_zeros() as usize);
        }
    }
    None
}
