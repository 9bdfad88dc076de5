use vecfield::chem::{parse_xyz, ElementSet};
use vecfield::field::FieldParams;
use vecfield::provider::{build_grid, FieldProvider, GridProvider};
use vecfield::reconstruct::{reconstruct, ReconstructionConfig};
use vecfield::geom::Vec3;

fn main() {
    let path = std::env::args().nth(1).unwrap();
    let tau: f64 = std::env::args().nth(2).and_then(|s| s.parse().ok()).unwrap_or(1e-3);
    let mol = parse_xyz(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let set = ElementSet::qm9();
    let params = FieldParams::default();
    let grid = build_grid(&mol, &set, 5, 3.0, params).unwrap();
    let provider = GridProvider::new(grid, set.clone()).unwrap();
    println!("extent {:?}", provider.domain().unwrap());
    println!("molecule bbox {:?}", mol.bounding_box().unwrap());
    // field magnitude at an atom vs nearby, per channel
    let a0 = mol.atoms[0];
    let k0 = set.channel_of(a0.element).unwrap();
    for d in [0.0, 0.2, 0.5, 1.0, 2.0] {
        let q = a0.position + Vec3::new(d, 0.0, 0.0);
        println!("|v| at atom0+{d}: {:.5}", provider.query_one(q, k0).norm());
    }
    let cfg = ReconstructionConfig { tau, ..ReconstructionConfig::qm9() };
    let bbox = provider.domain().unwrap().padded(1.0);
    let out = reconstruct(&provider, &cfg, bbox, 42).unwrap();
    println!("reference: {:?}", mol.element_counts());
    println!("extracted: {:?}", out.molecule.element_counts());
    println!("converged: {} / {}", out.batch.converged_count(), out.batch.total_particles());
    println!("noise fraction: {:.3}", out.stats.noise_fraction());
    for (e, ps) in &out.batch.groups {
        let conv = ps.iter().filter(|p| p.status == vecfield::reconstruct::ParticleStatus::Converged).count();
        let exh = ps.iter().filter(|p| p.status == vecfield::reconstruct::ParticleStatus::Exhausted).count();
        println!("  {e}: {} conv {} exhausted of {}", conv, exh, ps.len());
    }
}
