//! Field construction parameters.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Magnitude-term construction selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FieldVariant {
    /// Gaussian-weighted distance, clipped at `d_clip`; keeps an informative
    /// constant magnitude at range. The default and reference construction.
    GaussianClip,
    /// Plain Gaussian-weighted distance; decays to zero far from atoms.
    Gaussian,
    /// Saturating tanh with a widened Gaussian envelope.
    Tanh,
}

impl FieldVariant {
    pub fn parse(name: &str) -> Result<FieldVariant> {
        match name.to_ascii_lowercase().as_str() {
            "gaussian-clip" | "gaussianclip" | "clip" => Ok(FieldVariant::GaussianClip),
            "gaussian" => Ok(FieldVariant::Gaussian),
            "tanh" => Ok(FieldVariant::Tanh),
            other => Err(Error::domain(format!(
                "unknown field variant '{other}' (expected gaussian-clip, gaussian, or tanh)"
            ))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            FieldVariant::GaussianClip => "gaussian-clip",
            FieldVariant::Gaussian => "gaussian",
            FieldVariant::Tanh => "tanh",
        }
    }
}

/// Parameters of the analytic field constructions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldParams {
    pub variant: FieldVariant,
    /// Softmax temperature (Angstrom); controls direction-selection locality.
    pub sigma_sf: f64,
    /// Magnitude width (Angstrom).
    pub sigma_mag: f64,
    /// Clip distance (Angstrom) for the Gaussian-Clip magnitude.
    pub d_clip: f64,
    /// Numerical-stability constant added to direction denominators.
    pub eps_num: f64,
    /// Emit the repulsive field on absent element channels.
    pub exclusive: bool,
}

impl Default for FieldParams {
    fn default() -> Self {
        FieldParams {
            variant: FieldVariant::GaussianClip,
            sigma_sf: 0.1,
            sigma_mag: 0.45,
            d_clip: 0.8,
            eps_num: 1e-8,
            exclusive: false,
        }
    }
}

impl FieldParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.sigma_sf > 0.0) {
            return Err(Error::domain("sigma_sf must be positive"));
        }
        if !(self.sigma_mag > 0.0) {
            return Err(Error::domain("sigma_mag must be positive"));
        }
        if !(self.d_clip > 0.0) {
            return Err(Error::domain("d_clip must be positive"));
        }
        if !(self.eps_num > 0.0) {
            return Err(Error::domain("eps_num must be positive"));
        }
        Ok(())
    }

    /// Supremum of the variant's magnitude term over all distances; every
    /// field vector norm is bounded by this value.
    pub fn max_magnitude(&self) -> f64 {
        match self.variant {
            FieldVariant::GaussianClip => {
                // d * exp(-d^2 / (2 s^2)) peaks at d = s.
                let peak = self.sigma_mag.min(self.d_clip);
                (-peak * peak / (2.0 * self.sigma_mag * self.sigma_mag)).exp() * peak
            }
            FieldVariant::Gaussian => self.sigma_mag * (-0.5f64).exp(),
            FieldVariant::Tanh => {
                // No closed form; a fine scan over the decaying envelope.
                let wide = 2.0 * self.sigma_mag;
                let mut best = 0.0f64;
                let upper = 6.0 * wide;
                let steps = 20_000;
                for i in 0..=steps {
                    let d = upper * i as f64 / steps as f64;
                    let m = (d / self.sigma_mag).tanh() * (-d * d / (2.0 * wide * wide)).exp();
                    best = best.max(m);
                }
                best
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_match_reference_values() {
        let p = FieldParams::default();
        assert_eq!(p.variant, FieldVariant::GaussianClip);
        assert_eq!(p.sigma_sf, 0.1);
        assert_eq!(p.sigma_mag, 0.45);
        assert_eq!(p.d_clip, 0.8);
        assert_eq!(p.eps_num, 1e-8);
        assert!(!p.exclusive);
        assert!(p.validate().is_ok());
    }

    #[test]
    fn invalid_params_are_rejected() {
        for bad in [
            FieldParams { sigma_sf: 0.0, ..FieldParams::default() },
            FieldParams { sigma_mag: -1.0, ..FieldParams::default() },
            FieldParams { d_clip: 0.0, ..FieldParams::default() },
            FieldParams { eps_num: 0.0, ..FieldParams::default() },
        ] {
            assert!(bad.validate().is_err());
        }
    }

    #[test]
    fn max_magnitude_per_variant() {
        let p = FieldParams::default();
        // sigma_mag < d_clip, so the unclipped peak applies: 0.45 e^{-1/2}.
        assert!((p.max_magnitude() - 0.27293879687068506).abs() < 1e-15);
        let g = FieldParams { variant: FieldVariant::Gaussian, ..p };
        assert!((g.max_magnitude() - 0.27293879687068506).abs() < 1e-15);
        let t = FieldParams { variant: FieldVariant::Tanh, ..p };
        let m = t.max_magnitude();
        assert!(m > 0.6 && m < 0.8, "tanh peak {m}");
        // Tight clip moves the Gaussian-Clip peak to the clip distance.
        let tight = FieldParams { d_clip: 0.2, ..p };
        assert!((tight.max_magnitude() - (0.2f64 * (-0.04 / 0.405f64).exp())).abs() < 1e-15);
    }

    #[test]
    fn variant_names_round_trip() {
        for v in [FieldVariant::GaussianClip, FieldVariant::Gaussian, FieldVariant::Tanh] {
            assert_eq!(FieldVariant::parse(v.name()).unwrap(), v);
        }
        assert!(FieldVariant::parse("sinc").is_err());
    }
}
