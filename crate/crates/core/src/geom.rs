//! Small 3D geometry primitives shared across the crate.

use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

/// 3-vector in Cartesian coordinates (Angstrom where it denotes a position).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

pub const ZERO: Vec3 = Vec3 {
    x: 0.0,
    y: 0.0,
    z: 0.0,
};

impl Vec3 {
    pub const ZERO: Vec3 = ZERO;

    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3 { x, y, z }
    }

    pub fn dot(self, other: Vec3) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn cross(self, other: Vec3) -> Vec3 {
        Vec3 {
            x: self.y * other.z - self.z * other.y,
            y: self.z * other.x - self.x * other.z,
            z: self.x * other.y - self.y * other.x,
        }
    }

    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn distance(self, other: Vec3) -> f64 {
        (self - other).norm()
    }

    pub fn distance_sq(self, other: Vec3) -> f64 {
        (self - other).norm_sq()
    }

    /// Unit vector in the same direction; zero-length input yields zero.
    pub fn normalized(self) -> Vec3 {
        let n = self.norm();
        if n > 0.0 {
            self / n
        } else {
            Vec3::ZERO
        }
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn min_componentwise(self, other: Vec3) -> Vec3 {
        Vec3::new(self.x.min(other.x), self.y.min(other.y), self.z.min(other.z))
    }

    pub fn max_componentwise(self, other: Vec3) -> Vec3 {
        Vec3::new(self.x.max(other.x), self.y.max(other.y), self.z.max(other.z))
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl AddAssign for Vec3 {
    fn add_assign(&mut self, o: Vec3) {
        *self = *self + o;
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, s: f64) -> Vec3 {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }
}

impl Mul<Vec3> for f64 {
    type Output = Vec3;
    fn mul(self, v: Vec3) -> Vec3 {
        v * self
    }
}

impl Div<f64> for Vec3 {
    type Output = Vec3;
    fn div(self, s: f64) -> Vec3 {
        Vec3::new(self.x / s, self.y / s, self.z / s)
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3::new(-self.x, -self.y, -self.z)
    }
}

/// Axis-aligned bounding box.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Aabb {
    pub min: Vec3,
    pub max: Vec3,
}

impl Aabb {
    pub fn new(min: Vec3, max: Vec3) -> Self {
        Aabb { min, max }
    }

    /// Smallest box containing all points; `None` for an empty set.
    pub fn from_points<I: IntoIterator<Item = Vec3>>(points: I) -> Option<Aabb> {
        let mut it = points.into_iter();
        let first = it.next()?;
        let mut bb = Aabb::new(first, first);
        for p in it {
            bb.min = bb.min.min_componentwise(p);
            bb.max = bb.max.max_componentwise(p);
        }
        Some(bb)
    }

    pub fn padded(self, pad: f64) -> Aabb {
        let d = Vec3::new(pad, pad, pad);
        Aabb::new(self.min - d, self.max + d)
    }

    pub fn extent(self) -> Vec3 {
        self.max - self.min
    }

    pub fn center(self) -> Vec3 {
        (self.min + self.max) * 0.5
    }

    pub fn volume(self) -> f64 {
        let e = self.extent();
        (e.x.max(0.0)) * (e.y.max(0.0)) * (e.z.max(0.0))
    }

    pub fn contains(self, p: Vec3) -> bool {
        p.x >= self.min.x
            && p.x <= self.max.x
            && p.y >= self.min.y
            && p.y <= self.max.y
            && p.z >= self.min.z
            && p.z <= self.max.z
    }

    pub fn clamp(self, p: Vec3) -> Vec3 {
        Vec3::new(
            p.x.clamp(self.min.x, self.max.x),
            p.y.clamp(self.min.y, self.max.y),
            p.z.clamp(self.min.z, self.max.z),
        )
    }
}

/// Proper rotation, stored as a row-major 3x3 matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rotation {
    pub rows: [Vec3; 3],
}

impl Rotation {
    pub const IDENTITY: Rotation = Rotation {
        rows: [
            Vec3 { x: 1.0, y: 0.0, z: 0.0 },
            Vec3 { x: 0.0, y: 1.0, z: 0.0 },
            Vec3 { x: 0.0, y: 0.0, z: 1.0 },
        ],
    };

    pub fn apply(self, v: Vec3) -> Vec3 {
        Vec3::new(self.rows[0].dot(v), self.rows[1].dot(v), self.rows[2].dot(v))
    }

    /// Transpose equals inverse for a proper rotation.
    pub fn inverse(self) -> Rotation {
        let r = self.rows;
        Rotation {
            rows: [
                Vec3::new(r[0].x, r[1].x, r[2].x),
                Vec3::new(r[0].y, r[1].y, r[2].y),
                Vec3::new(r[0].z, r[1].z, r[2].z),
            ],
        }
    }

    /// Rotation by `angle` radians about the given axis (Rodrigues formula).
    pub fn about_axis(axis: Vec3, angle: f64) -> Rotation {
        let u = axis.normalized();
        let (s, c) = angle.sin_cos();
        let one_c = 1.0 - c;
        let row = |i: usize| {
            let e = [u.x, u.y, u.z];
            let mut r = [0.0f64; 3];
            for (j, rj) in r.iter_mut().enumerate() {
                let kron = if i == j { 1.0 } else { 0.0 };
                // Levi-Civita term of the cross-product matrix.
                let eps = match (i, j) {
                    (0, 1) => -u.z,
                    (0, 2) => u.y,
                    (1, 0) => u.z,
                    (1, 2) => -u.x,
                    (2, 0) => -u.y,
                    (2, 1) => u.x,
                    _ => 0.0,
                };
                *rj = c * kron + one_c * e[i] * e[j] + s * eps;
            }
            Vec3::new(r[0], r[1], r[2])
        };
        Rotation {
            rows: [row(0), row(1), row(2)],
        }
    }

    /// Uniformly distributed random rotation (axis from the sphere, angle in [0, 2pi)).
    pub fn random<R: rand::Rng>(rng: &mut R) -> Rotation {
        // Rejection-sample a direction to avoid trig on the poles.
        let axis = loop {
            let v = Vec3::new(
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            );
            let n = v.norm_sq();
            if n > 1e-6 && n <= 1.0 {
                break v;
            }
        };
        let angle = rng.gen_range(0.0..std::f64::consts::TAU);
        Rotation::about_axis(axis, angle)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn rotation_preserves_norm_and_inverts() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let r = Rotation::random(&mut rng);
            let v = Vec3::new(
                rng.gen_range(-5.0..5.0),
                rng.gen_range(-5.0..5.0),
                rng.gen_range(-5.0..5.0),
            );
            let rv = r.apply(v);
            assert!((rv.norm() - v.norm()).abs() < 1e-12);
            let back = r.inverse().apply(rv);
            assert!(back.distance(v) < 1e-12);
        }
    }

    #[test]
    fn rotation_is_orthogonal() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let r = Rotation::random(&mut rng);
        for i in 0..3 {
            for j in 0..3 {
                let d = r.rows[i].dot(r.rows[j]);
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((d - expect).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn aabb_from_points_and_clamp() {
        let bb = Aabb::from_points(vec![
            Vec3::new(0.0, 1.0, -1.0),
            Vec3::new(2.0, -3.0, 4.0),
        ])
        .unwrap();
        assert_eq!(bb.min, Vec3::new(0.0, -3.0, -1.0));
        assert_eq!(bb.max, Vec3::new(2.0, 1.0, 4.0));
        assert!(bb.contains(Vec3::new(1.0, 0.0, 0.0)));
        let c = bb.clamp(Vec3::new(-5.0, 0.0, 10.0));
        assert_eq!(c, Vec3::new(0.0, 0.0, 4.0));
        assert!(Aabb::from_points(std::iter::empty()).is_none());
    }
}
