//! Corpus directory I/O: sorted XYZ loading and writing.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};

use vecfield::chem::{parse_xyz, write_xyz, Molecule};

/// Loads every `*.xyz` file in the directory, sorted by file name for
/// deterministic corpus order.
pub fn load_corpus(dir: &Path) -> Result<Vec<(PathBuf, Molecule)>> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
        .with_context(|| format!("reading corpus directory {}", dir.display()))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|ext| ext == "xyz"))
        .collect();
    paths.sort();
    if paths.is_empty() {
        bail!("no .xyz files found in {}", dir.display());
    }
    let mut corpus = Vec::with_capacity(paths.len());
    for path in paths {
        let text = std::fs::read_to_string(&path)
            .with_context(|| format!("reading {}", path.display()))?;
        let mol = parse_xyz(&text).with_context(|| format!("parsing {}", path.display()))?;
        corpus.push((path, mol));
    }
    Ok(corpus)
}

pub fn write_corpus(dir: &Path, molecules: &[Molecule]) -> Result<()> {
    std::fs::create_dir_all(dir)
        .with_context(|| format!("creating output directory {}", dir.display()))?;
    for (i, mol) in molecules.iter().enumerate() {
        let path = dir.join(format!("mol_{i:04}.xyz"));
        std::fs::write(&path, write_xyz(mol))
            .with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

/// Writes `text` to the file, or to stdout when no path is given.
pub fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => {
            if let Some(parent) = path.parent() {
                if !parent.as_os_str().is_empty() {
                    std::fs::create_dir_all(parent)
                        .with_context(|| format!("creating {}", parent.display()))?;
                }
            }
            std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
