//! XYZ text format: count line, comment line, then one `El x y z` per atom.

use super::element::Element;
use super::molecule::{Atom, Molecule};
use crate::error::{Error, Result};
use crate::geom::Vec3;

/// Parses XYZ text. Bonds are left empty; coordinates are taken at full
/// precision. Errors carry the 1-based line number.
pub fn parse_xyz(text: &str) -> Result<Molecule> {
    let mut lines = text.lines();
    let count_line = lines
        .next()
        .ok_or_else(|| Error::parse(1, "missing atom-count line"))?;
    let declared: usize = count_line
        .trim()
        .parse()
        .map_err(|_| Error::parse(1, format!("malformed atom count '{}'", count_line.trim())))?;

    // Comment line is required by the format but may be absent for 0 atoms
    // when the text ends early.
    let _comment = lines.next().unwrap_or("");

    let mut atoms = Vec::with_capacity(declared);
    for (offset, line) in lines.enumerate() {
        let line_no = offset + 3;
        if line.trim().is_empty() {
            // Trailing blank lines are tolerated after all atoms were read.
            continue;
        }
        if atoms.len() == declared {
            return Err(Error::parse(
                line_no,
                format!("more atom records than the declared count {declared}"),
            ));
        }
        let mut parts = line.split_whitespace();
        let sym = parts
            .next()
            .ok_or_else(|| Error::parse(line_no, "missing element symbol"))?;
        let element = Element::from_symbol(sym)
            .map_err(|_| Error::parse(line_no, format!("unknown element symbol '{sym}'")))?;
        let mut coord = [0.0f64; 3];
        for (axis, c) in coord.iter_mut().enumerate() {
            let tok = parts.next().ok_or_else(|| {
                Error::parse(line_no, format!("missing coordinate {}", ["x", "y", "z"][axis]))
            })?;
            *c = tok.parse().map_err(|_| {
                Error::parse(line_no, format!("non-numeric coordinate '{tok}'"))
            })?;
        }
        atoms.push(Atom::new(element, Vec3::new(coord[0], coord[1], coord[2])));
    }

    if atoms.len() != declared {
        return Err(Error::parse(
            1,
            format!("declared {declared} atoms but found {}", atoms.len()),
        ));
    }
    Ok(Molecule::new(atoms))
}

/// Writes XYZ text; coordinates carry enough digits to round-trip well
/// below 1e-6 Angstrom.
pub fn write_xyz(mol: &Molecule) -> String {
    write_xyz_with_comment(mol, "")
}

pub fn write_xyz_with_comment(mol: &Molecule, comment: &str) -> String {
    use std::fmt::Write;
    let mut out = String::new();
    let _ = writeln!(out, "{}", mol.len());
    let _ = writeln!(out, "{comment}");
    for atom in &mol.atoms {
        let p = atom.position;
        let _ = writeln!(out, "{} {:.10} {:.10} {:.10}", atom.element, p.x, p.y, p.z);
    }
    out
}
