use vecfield::chem::{parse_xyz, ElementSet};
use vecfield::field::FieldParams;
use vecfield::provider::{AnalyticProvider, FieldProvider};
use vecfield::reconstruct::{reconstruct, ParticleStatus, ReconstructionConfig};

fn main() {
    let path = std::env::args().nth(1).unwrap();
    let seed: u64 = std::env::args().nth(2).and_then(|s| s.parse().ok()).unwrap_or(42);
    let mol = parse_xyz(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let set = ElementSet::qm9();
    let provider = AnalyticProvider::new(&mol, &set, FieldParams::default()).unwrap();
    let bbox = provider.domain().unwrap().padded(1.0);
    let out = reconstruct(&provider, &ReconstructionConfig::qm9(), bbox, seed).unwrap();
    println!("ref: {:?}\ngot: {:?}", mol.element_counts(), out.molecule.element_counts());
    for (e, ps) in &out.batch.groups {
        let atoms = mol.atoms_of(*e);
        if atoms.is_empty() { continue; }
        let mut per_atom = vec![0usize; atoms.len()];
        let mut stray = 0;
        for p in ps.iter().filter(|p| p.status == ParticleStatus::Converged) {
            let (best, d) = atoms.iter().enumerate()
                .map(|(k, &ai)| (k, mol.atoms[ai].position.distance(p.position)))
                .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap()).unwrap();
            if d < 0.05 { per_atom[best] += 1 } else { stray += 1 }
        }
        println!("{e}: conv-per-atom {:?} stray {}", per_atom, stray);
        for (k, &ai) in atoms.iter().enumerate() {
            if per_atom[k] < 3 {
                let pos = mol.atoms[ai].position;
                let mut nearest: Vec<(String, f64)> = mol.atoms.iter().enumerate()
                    .filter(|(j, _)| *j != ai)
                    .map(|(_, a)| (a.element.to_string(), a.position.distance(pos)))
                    .collect();
                nearest.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
                println!("  starved atom {ai} ({e}) neighbors: {:?}", &nearest[..nearest.len().min(6)]);
            }
        }
    }
}
