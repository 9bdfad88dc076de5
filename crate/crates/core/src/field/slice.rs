//! Planar field-slice export for external plotting.

use crate::chem::{ElementSet, Molecule};
use crate::error::{Error, Result};
use crate::geom::Vec3;

use super::{FieldEvaluator, FieldParams};

/// A square planar window: center point, plane normal, and half-extent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlicePlane {
    pub point: Vec3,
    pub normal: Vec3,
    pub half_extent: f64,
}

impl SlicePlane {
    /// Orthonormal in-plane basis, chosen deterministically from the normal.
    pub fn basis(&self) -> Result<(Vec3, Vec3)> {
        let n = self.normal.normalized();
        if n == Vec3::ZERO {
            return Err(Error::domain("slice normal must be non-zero"));
        }
        // Seed with the axis least aligned with the normal.
        let seed = if n.x.abs() <= n.y.abs() && n.x.abs() <= n.z.abs() {
            Vec3::new(1.0, 0.0, 0.0)
        } else if n.y.abs() <= n.z.abs() {
            Vec3::new(0.0, 1.0, 0.0)
        } else {
            Vec3::new(0.0, 0.0, 1.0)
        };
        let u = n.cross(seed).normalized();
        let v = n.cross(u);
        Ok((u, v))
    }
}

/// Renders a `resolution x resolution` grid of field samples on the plane as
/// CSV with columns `x,y,z,element,vx,vy,vz,magnitude`, one row per grid
/// point per element channel.
pub fn slice_csv(
    mol: &Molecule,
    elements: &ElementSet,
    params: &FieldParams,
    plane: &SlicePlane,
    resolution: usize,
) -> Result<String> {
    if resolution == 0 {
        return Err(Error::domain("slice resolution must be at least 1"));
    }
    if !(self::finite(plane.half_extent) && plane.half_extent > 0.0) {
        return Err(Error::domain("slice half-extent must be positive"));
    }
    let (u, v) = plane.basis()?;
    let eval = FieldEvaluator::new(mol, elements, *params)?;

    use std::fmt::Write;
    let mut out = String::from("x,y,z,element,vx,vy,vz,magnitude\n");
    for i in 0..resolution {
        for j in 0..resolution {
            // Grid coordinates in [-h, h]; a single-sample slice sits at the
            // plane point itself.
            let frac = |t: usize| {
                if resolution == 1 {
                    0.0
                } else {
                    -1.0 + 2.0 * t as f64 / (resolution - 1) as f64
                }
            };
            let q = plane.point + u * (frac(i) * plane.half_extent) + v * (frac(j) * plane.half_extent);
            for (k, element) in elements.iter() {
                let w = eval.channel(q, k);
                let _ = writeln!(
                    out,
                    "{:.6},{:.6},{:.6},{},{:.9},{:.9},{:.9},{:.9}",
                    q.x,
                    q.y,
                    q.z,
                    element,
                    w.x,
                    w.y,
                    w.z,
                    w.norm()
                );
            }
        }
    }
    Ok(out)
}

fn finite(x: f64) -> bool {
    x.is_finite()
}
