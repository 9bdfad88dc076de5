//! Grid-sampled field with trilinear interpolation.
//!
//! Stands in for a decoded neural field: the analytic field is sampled on a
//! regular grid of anchors and queried by interpolation, so a coarse grid
//! emulates a degraded learned field.

use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;

use crate::chem::{ElementSet, Molecule};
use crate::error::{Error, Result};
use crate::field::{FieldEvaluator, FieldParams};
use crate::geom::{Aabb, Vec3};

use super::FieldProvider;

const MAGIC: &[u8; 8] = b"VFGRID1\0";

/// Regular grid of `L^3` anchors, each holding K field vectors.
///
/// Flat storage order is (z-major, y, x, channel): the vector for anchor
/// `(ix, iy, iz)` and channel `k` sits at `((iz*L + iy)*L + ix)*K + k`.
#[derive(Debug, Clone, PartialEq)]
pub struct LatentGrid {
    size: usize,
    spacing: f64,
    origin: Vec3,
    channels: usize,
    samples: Vec<Vec3>,
}

impl LatentGrid {
    pub fn new(
        size: usize,
        spacing: f64,
        origin: Vec3,
        channels: usize,
        samples: Vec<Vec3>,
    ) -> Result<Self> {
        if size < 2 {
            return Err(Error::domain("grid size L must be at least 2"));
        }
        if !(spacing > 0.0) {
            return Err(Error::domain("grid spacing must be positive"));
        }
        if channels == 0 {
            return Err(Error::domain("grid must have at least one channel"));
        }
        if samples.len() != size * size * size * channels {
            return Err(Error::domain(format!(
                "expected {} samples, got {}",
                size * size * size * channels,
                samples.len()
            )));
        }
        Ok(LatentGrid {
            size,
            spacing,
            origin,
            channels,
            samples,
        })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn origin(&self) -> Vec3 {
        self.origin
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    fn index(&self, ix: usize, iy: usize, iz: usize, k: usize) -> usize {
        ((iz * self.size + iy) * self.size + ix) * self.channels + k
    }

    pub fn anchor_position(&self, ix: usize, iy: usize, iz: usize) -> Vec3 {
        self.origin + Vec3::new(ix as f64, iy as f64, iz as f64) * self.spacing
    }

    pub fn sample_at(&self, ix: usize, iy: usize, iz: usize, k: usize) -> Vec3 {
        self.samples[self.index(ix, iy, iz, k)]
    }

    /// Box spanned by the anchors.
    pub fn extent(&self) -> Aabb {
        let span = (self.size - 1) as f64 * self.spacing;
        Aabb::new(self.origin, self.origin + Vec3::new(span, span, span))
    }

    /// Trilinear interpolation of channel `k` at `q`, which must lie inside
    /// the grid extent (callers clamp first).
    fn interpolate(&self, q: Vec3, k: usize) -> Vec3 {
        let t = (q - self.origin) / self.spacing;
        let cell = |x: f64| -> (usize, f64) {
            let i = (x.floor() as isize).clamp(0, self.size as isize - 2) as usize;
            (i, x - i as f64)
        };
        let (ix, fx) = cell(t.x);
        let (iy, fy) = cell(t.y);
        let (iz, fz) = cell(t.z);

        let mut acc = Vec3::ZERO;
        for (dz, wz) in [(0, 1.0 - fz), (1, fz)] {
            for (dy, wy) in [(0, 1.0 - fy), (1, fy)] {
                for (dx, wx) in [(0, 1.0 - fx), (1, fx)] {
                    let w = wx * wy * wz;
                    if w != 0.0 {
                        acc += self.sample_at(ix + dx, iy + dy, iz + dz, k) * w;
                    }
                }
            }
        }
        acc
    }

    /// Serializes to the flat binary layout: the header
    /// `{magic "VFGRID1", L, K, spacing, origin}` followed by `L^3 * K * 3`
    /// little-endian f64 values in (z-major, y, x, k, component) order.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(48 + self.samples.len() * 24);
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&(self.size as u32).to_le_bytes());
        out.extend_from_slice(&(self.channels as u32).to_le_bytes());
        out.extend_from_slice(&self.spacing.to_le_bytes());
        out.extend_from_slice(&self.origin.x.to_le_bytes());
        out.extend_from_slice(&self.origin.y.to_le_bytes());
        out.extend_from_slice(&self.origin.z.to_le_bytes());
        for v in &self.samples {
            out.extend_from_slice(&v.x.to_le_bytes());
            out.extend_from_slice(&v.y.to_le_bytes());
            out.extend_from_slice(&v.z.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < 48 || &bytes[..8] != MAGIC {
            return Err(Error::domain("not a VFGRID1 blob"));
        }
        let read_u32 = |at: usize| u32::from_le_bytes(bytes[at..at + 4].try_into().unwrap());
        let read_f64 = |at: usize| f64::from_le_bytes(bytes[at..at + 8].try_into().unwrap());
        let size = read_u32(8) as usize;
        let channels = read_u32(12) as usize;
        let spacing = read_f64(16);
        let origin = Vec3::new(read_f64(24), read_f64(32), read_f64(40));
        let count = size * size * size * channels;
        if bytes.len() != 48 + count * 24 {
            return Err(Error::domain(format!(
                "VFGRID1 payload length mismatch: expected {} bytes, got {}",
                48 + count * 24,
                bytes.len()
            )));
        }
        let mut samples = Vec::with_capacity(count);
        for i in 0..count {
            let at = 48 + i * 24;
            samples.push(Vec3::new(read_f64(at), read_f64(at + 8), read_f64(at + 16)));
        }
        LatentGrid::new(size, spacing, origin, channels, samples)
    }
}

/// Samples the analytic field of `mol` on an `L^3` grid centered on the
/// molecule centroid. Errors when the molecule does not fit, naming the
/// smallest sufficient L.
pub fn build_grid(
    mol: &Molecule,
    elements: &ElementSet,
    size: usize,
    spacing: f64,
    params: FieldParams,
) -> Result<LatentGrid> {
    if size < 2 {
        return Err(Error::domain("grid size L must be at least 2"));
    }
    if !(spacing > 0.0) {
        return Err(Error::domain("grid spacing must be positive"));
    }
    let center = mol.centroid().unwrap_or(Vec3::ZERO);
    let half_span = (size - 1) as f64 * spacing / 2.0;
    if let Some(bb) = mol.bounding_box() {
        let reach = [
            (bb.max.x - center.x).abs(),
            (center.x - bb.min.x).abs(),
            (bb.max.y - center.y).abs(),
            (center.y - bb.min.y).abs(),
            (bb.max.z - center.z).abs(),
            (center.z - bb.min.z).abs(),
        ]
        .into_iter()
        .fold(0.0f64, f64::max);
        if reach > half_span {
            let needed = (2.0 * reach / spacing).ceil() as usize + 1;
            return Err(Error::domain(format!(
                "molecule extent exceeds the grid: L = {size} spans {:.2} A per axis, \
                 requires L >= {needed}",
                2.0 * half_span
            )));
        }
    }
    let origin = center - Vec3::new(half_span, half_span, half_span);
    let evaluator = FieldEvaluator::new(mol, elements, params)?;
    let k = elements.len();
    let n = size;

    let samples: Vec<Vec3> = (0..n * n * n)
        .into_par_iter()
        .flat_map_iter(|flat| {
            let ix = flat % n;
            let iy = (flat / n) % n;
            let iz = flat / (n * n);
            let pos = origin + Vec3::new(ix as f64, iy as f64, iz as f64) * spacing;
            (0..k).map(move |ch| (pos, ch))
        })
        .map(|(pos, ch)| evaluator.channel(pos, ch))
        .collect();

    LatentGrid::new(size, spacing, origin, k, samples)
}

/// Provider view over a [`LatentGrid`]. Out-of-extent queries clamp to the
/// boundary (extrapolated trilinear fields would be unbounded); each clamp is
/// counted as a warning, never an error.
#[derive(Debug)]
pub struct GridProvider {
    grid: LatentGrid,
    elements: ElementSet,
    clamp_events: AtomicU64,
}

impl GridProvider {
    pub fn new(grid: LatentGrid, elements: ElementSet) -> Result<Self> {
        if grid.channels() != elements.len() {
            return Err(Error::domain(format!(
                "grid has {} channels but the element set has {}",
                grid.channels(),
                elements.len()
            )));
        }
        Ok(GridProvider {
            grid,
            elements,
            clamp_events: AtomicU64::new(0),
        })
    }

    pub fn grid(&self) -> &LatentGrid {
        &self.grid
    }

    /// Number of queries answered from a clamped position so far.
    pub fn clamp_events(&self) -> u64 {
        self.clamp_events.load(Ordering::Relaxed)
    }
}

impl FieldProvider for GridProvider {
    fn elements(&self) -> &ElementSet {
        &self.elements
    }

    fn query_one(&self, q: Vec3, k: usize) -> Vec3 {
        let extent = self.grid.extent();
        let inside = extent.contains(q);
        let clamped = if inside {
            q
        } else {
            self.clamp_events.fetch_add(1, Ordering::Relaxed);
            extent.clamp(q)
        };
        self.grid.interpolate(clamped, k)
    }

    fn domain(&self) -> Option<Aabb> {
        Some(self.grid.extent())
    }
}
