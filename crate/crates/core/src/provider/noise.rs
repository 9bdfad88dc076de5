//! Deterministic Gaussian noise wrapper.
//!
//! The perturbation models decoding from a noise-corrupted latent code: it is
//! a fixed random field, frozen per (seed, element channel, query position
//! quantized at 1e-6 A), so repeated queries of the same point see the same
//! perturbed value.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::chem::ElementSet;
use crate::geom::{Aabb, Vec3};

use super::FieldProvider;

/// Isotropic Gaussian perturbation spec; `sigma_noise = 0` is the identity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub sigma_noise: f64,
    pub seed: u64,
}

impl NoiseSpec {
    pub fn new(sigma_noise: f64, seed: u64) -> Self {
        NoiseSpec { sigma_noise, seed }
    }
}

/// A provider whose outputs carry frozen N(0, sigma^2 I) offsets.
#[derive(Debug)]
pub struct NoisyProvider<P> {
    inner: P,
    spec: NoiseSpec,
}

/// Wraps a provider with deterministic noise; see [`NoisyProvider`].
pub fn wrap_noise<P: FieldProvider>(inner: P, spec: NoiseSpec) -> NoisyProvider<P> {
    NoisyProvider { inner, spec }
}

impl<P> NoisyProvider<P> {
    pub fn spec(&self) -> NoiseSpec {
        self.spec
    }

    pub fn inner(&self) -> &P {
        &self.inner
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

const QUANTUM: f64 = 1e-6;

fn perturbation(spec: NoiseSpec, k: usize, q: Vec3) -> Vec3 {
    let quantize = |x: f64| (x / QUANTUM).round() as i64 as u64;
    let mut h = splitmix64(spec.seed);
    h = splitmix64(h ^ k as u64);
    h = splitmix64(h ^ quantize(q.x));
    h = splitmix64(h ^ quantize(q.y));
    h = splitmix64(h ^ quantize(q.z));
    let mut rng = ChaCha8Rng::seed_from_u64(h);
    let mut draw = || -> f64 { StandardNormal.sample(&mut rng) };
    Vec3::new(draw(), draw(), draw()) * spec.sigma_noise
}

impl<P: FieldProvider> FieldProvider for NoisyProvider<P> {
    fn elements(&self) -> &ElementSet {
        self.inner.elements()
    }

    fn query_one(&self, q: Vec3, k: usize) -> Vec3 {
        let clean = self.inner.query_one(q, k);
        if self.spec.sigma_noise == 0.0 {
            return clean;
        }
        clean + perturbation(self.spec, k, q)
    }

    fn domain(&self) -> Option<Aabb> {
        self.inner.domain()
    }
}
