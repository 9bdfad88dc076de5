//! Corpus-level evaluation report.

use rayon::prelude::*;
use serde::Serialize;

use crate::chem::{canonical_hash, check_stability, complete_valences, Molecule};
use crate::error::{Error, Result};

use super::distance::{total_variation, wasserstein1, CategoricalDistribution};
use super::geometry::extract_geometry;

/// Benchmark-style metric columns. Percentages are in [0, 100]; distance
/// columns are non-negative, with `INFINITY` marking a distance against an
/// empty statistic (for example bond lengths of a corpus that produced no
/// bonds). Two empty statistics compare at distance zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MetricsReport {
    pub stable_mol_pct: f64,
    pub stable_atom_pct: f64,
    pub valid_pct: f64,
    pub unique_pct: f64,
    pub valency_w1: f64,
    pub atom_tv: f64,
    pub bond_tv: f64,
    pub bond_len_w1: f64,
    pub bond_ang_w1: f64,
    pub single_fragment_pct: f64,
    pub ring_size_tv: f64,
    pub atoms_per_mol_tv: f64,
}

impl MetricsReport {
    pub const CSV_HEADER: &'static str = "stable_mol_pct,stable_atom_pct,valid_pct,unique_pct,\
valency_w1,atom_tv,bond_tv,bond_len_w1,bond_ang_w1,single_fragment_pct,ring_size_tv,\
atoms_per_mol_tv";

    /// Fixed-column CSV row matching [`Self::CSV_HEADER`].
    pub fn to_csv_row(&self) -> String {
        format!(
            "{:.4},{:.4},{:.4},{:.4},{:.6},{:.6},{:.6},{:.6},{:.6},{:.4},{:.6},{:.6}",
            self.stable_mol_pct,
            self.stable_atom_pct,
            self.valid_pct,
            self.unique_pct,
            self.valency_w1,
            self.atom_tv,
            self.bond_tv,
            self.bond_len_w1,
            self.bond_ang_w1,
            self.single_fragment_pct,
            self.ring_size_tv,
            self.atoms_per_mol_tv,
        )
    }
}

/// Pooled per-corpus statistics.
#[derive(Debug, Default, Clone)]
struct CorpusStats {
    molecules: usize,
    atoms: usize,
    stable_atoms: usize,
    stable_molecules: usize,
    valid_molecules: usize,
    single_fragment: usize,
    unique_valid_hashes: usize,
    valencies: Vec<f64>,
    bond_lengths: Vec<f64>,
    bond_angles: Vec<f64>,
    element_counts: std::collections::BTreeMap<String, f64>,
    bond_order_counts: std::collections::BTreeMap<String, f64>,
    ring_size_counts: std::collections::BTreeMap<String, f64>,
    atoms_per_mol_counts: std::collections::BTreeMap<String, f64>,
}

fn collect_stats(corpus: &[Molecule]) -> CorpusStats {
    // Valence completion and geometry per molecule, in parallel; aggregation
    // in corpus order keeps the result deterministic.
    let per_mol: Vec<_> = corpus
        .par_iter()
        .map(|mol| {
            let completed = complete_valences(mol);
            let stability = check_stability(&completed);
            let geometry = extract_geometry(&completed);
            let hash = canonical_hash(&completed);
            (completed, stability, geometry, hash)
        })
        .collect();

    let mut stats = CorpusStats {
        molecules: corpus.len(),
        ..CorpusStats::default()
    };
    let mut valid_hashes = std::collections::BTreeSet::new();
    for (mol, stability, geometry, hash) in per_mol {
        stats.atoms += mol.len();
        stats.stable_atoms += (stability.stable_atom_fraction * mol.len() as f64).round() as usize;
        stats.stable_molecules += stability.molecule_stable as usize;
        stats.valid_molecules += stability.valid as usize;
        stats.single_fragment += stability.single_fragment as usize;
        if stability.valid {
            valid_hashes.insert(hash);
        }
        stats
            .valencies
            .extend(geometry.valencies.iter().map(|&v| v as f64));
        stats.bond_lengths.extend(&geometry.bond_lengths);
        stats.bond_angles.extend(&geometry.bond_angles_deg);
        for atom in &mol.atoms {
            *stats
                .element_counts
                .entry(atom.element.symbol().to_string())
                .or_insert(0.0) += 1.0;
        }
        for bond in &mol.bonds {
            *stats
                .bond_order_counts
                .entry(bond.order.to_string())
                .or_insert(0.0) += 1.0;
        }
        for &size in &geometry.ring_sizes {
            *stats
                .ring_size_counts
                .entry(size.to_string())
                .or_insert(0.0) += 1.0;
        }
        let largest_fragment = largest_fragment_size(&mol);
        *stats
            .atoms_per_mol_counts
            .entry(largest_fragment.to_string())
            .or_insert(0.0) += 1.0;
    }
    stats.unique_valid_hashes = valid_hashes.len();
    stats
}

fn largest_fragment_size(mol: &Molecule) -> usize {
    let n = mol.len();
    if n == 0 {
        return 0;
    }
    let mut adjacency = vec![Vec::new(); n];
    for b in &mol.bonds {
        adjacency[b.a].push(b.b);
        adjacency[b.b].push(b.a);
    }
    let mut seen = vec![false; n];
    let mut best = 0;
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut size = 0;
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(v) = stack.pop() {
            size += 1;
            for &w in &adjacency[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        best = best.max(size);
    }
    best
}

/// W1 with the empty-statistic convention: both sides empty compare at 0,
/// exactly one empty side at infinity.
fn w1_or_sentinel(a: &[f64], b: &[f64]) -> Result<f64> {
    match (a.is_empty(), b.is_empty()) {
        (true, true) => Ok(0.0),
        (true, false) | (false, true) => Ok(f64::INFINITY),
        _ => wasserstein1(a, b),
    }
}

/// Evaluates a generated corpus against a reference corpus. Both must be
/// non-empty; molecules are expected to carry inferred bonds (valence
/// completion is applied internally to both sides).
pub fn evaluate_corpus(generated: &[Molecule], reference: &[Molecule]) -> Result<MetricsReport> {
    if generated.is_empty() || reference.is_empty() {
        return Err(Error::domain("evaluate_corpus requires non-empty corpora"));
    }
    let gen_stats = collect_stats(generated);
    let ref_stats = collect_stats(reference);

    let pct = |num: usize, den: usize| {
        if den == 0 {
            0.0
        } else {
            100.0 * num as f64 / den as f64
        }
    };

    let tv = |a: &std::collections::BTreeMap<String, f64>,
              b: &std::collections::BTreeMap<String, f64>| {
        total_variation(
            &CategoricalDistribution::from_counts(a.iter().map(|(k, &v)| (k.clone(), v))),
            &CategoricalDistribution::from_counts(b.iter().map(|(k, &v)| (k.clone(), v))),
        )
    };

    Ok(MetricsReport {
        stable_mol_pct: pct(gen_stats.stable_molecules, gen_stats.molecules),
        stable_atom_pct: pct(gen_stats.stable_atoms, gen_stats.atoms),
        valid_pct: pct(gen_stats.valid_molecules, gen_stats.molecules),
        unique_pct: pct(gen_stats.unique_valid_hashes, gen_stats.valid_molecules),
        valency_w1: w1_or_sentinel(&gen_stats.valencies, &ref_stats.valencies)?,
        atom_tv: tv(&gen_stats.element_counts, &ref_stats.element_counts),
        bond_tv: tv(&gen_stats.bond_order_counts, &ref_stats.bond_order_counts),
        bond_len_w1: w1_or_sentinel(&gen_stats.bond_lengths, &ref_stats.bond_lengths)?,
        bond_ang_w1: w1_or_sentinel(&gen_stats.bond_angles, &ref_stats.bond_angles)?,
        single_fragment_pct: pct(gen_stats.single_fragment, gen_stats.molecules),
        ring_size_tv: tv(&gen_stats.ring_size_counts, &ref_stats.ring_size_counts),
        atoms_per_mol_tv: tv(&gen_stats.atoms_per_mol_counts, &ref_stats.atoms_per_mol_counts),
    })
}
