//! Cosine-schedule DDPM kernels over generic latent tensors.
//!
//! The schedule defines `alpha_bar(t) = cos^2(((t/T + s)/(1 + s)) pi/2)`
//! normalized to 1 at t = 0, with per-step `beta_t = 1 - abar_t / abar_{t-1}`
//! clipped to [1e-8, 0.999] and posterior variance
//! `sigma_t^2 = (1 - abar_{t-1}) / (1 - abar_t) * beta_t`. Kernels are pure
//! and elementwise; the denoiser is an interface, with an oracle
//! implementation (exact noise from a known clean latent) for chain tests.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Shape-carrying latent payload; the grid structure is metadata only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatentTensor {
    rows: usize,
    cols: usize,
    values: Vec<f64>,
}

impl LatentTensor {
    pub fn new(rows: usize, cols: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != rows * cols {
            return Err(Error::domain(format!(
                "latent tensor expects {} values, got {}",
                rows * cols,
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::domain("latent tensor values must be finite"));
        }
        Ok(LatentTensor { rows, cols, values })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        LatentTensor {
            rows,
            cols,
            values: vec![0.0; rows * cols],
        }
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn max_abs_diff(&self, other: &LatentTensor) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    fn same_shape(&self, other: &LatentTensor) -> Result<()> {
        if self.shape() != other.shape() {
            return Err(Error::domain(format!(
                "shape mismatch: {:?} vs {:?}",
                self.shape(),
                other.shape()
            )));
        }
        Ok(())
    }

    /// Elementwise `a * self + b * other`.
    fn lin_comb(&self, a: f64, other: &LatentTensor, b: f64) -> Result<LatentTensor> {
        self.same_shape(other)?;
        Ok(LatentTensor {
            rows: self.rows,
            cols: self.cols,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(x, y)| a * x + b * y)
                .collect(),
        })
    }
}

/// Normalized squared-cosine signal-retention factor at step `t`.
pub fn cosine_alpha_bar(t: usize, t_count: usize, s: f64) -> Result<f64> {
    if t > t_count {
        return Err(Error::domain(format!("t = {t} out of range 0..={t_count}")));
    }
    if !(s > 0.0) {
        return Err(Error::domain("offset s must be positive"));
    }
    let f = |x: f64| ((x / t_count as f64 + s) / (1.0 + s) * std::f64::consts::FRAC_PI_2)
        .cos()
        .powi(2);
    Ok(f(t as f64) / f(0.0))
}

const BETA_MIN: f64 = 1e-8;
const BETA_MAX: f64 = 0.999;

/// Precomputed cosine noise schedule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiffusionSchedule {
    t_count: usize,
    s: f64,
    /// `alpha_bar[t]` for t in 0..=T (from the cosine formula).
    alpha_bar: Vec<f64>,
    /// `beta[t-1]` for steps t in 1..=T, clipped.
    beta: Vec<f64>,
    alpha: Vec<f64>,
    sigma: Vec<f64>,
}

impl DiffusionSchedule {
    /// Builds the schedule for `t_count` steps with offset `s`.
    pub fn cosine(t_count: usize, s: f64) -> Result<Self> {
        if t_count < 1 {
            return Err(Error::domain("schedule needs at least one step"));
        }
        let alpha_bar: Vec<f64> = (0..=t_count)
            .map(|t| cosine_alpha_bar(t, t_count, s))
            .collect::<Result<_>>()?;
        let mut beta = Vec::with_capacity(t_count);
        let mut alpha = Vec::with_capacity(t_count);
        let mut sigma = Vec::with_capacity(t_count);
        for t in 1..=t_count {
            let b = (1.0 - alpha_bar[t] / alpha_bar[t - 1]).clamp(BETA_MIN, BETA_MAX);
            beta.push(b);
            alpha.push(1.0 - b);
            let var = (1.0 - alpha_bar[t - 1]) / (1.0 - alpha_bar[t]) * b;
            sigma.push(var.max(0.0).sqrt());
        }
        Ok(DiffusionSchedule {
            t_count,
            s,
            alpha_bar,
            beta,
            alpha,
            sigma,
        })
    }

    /// Default configuration: T = 1000, s = 0.008.
    pub fn standard() -> Self {
        DiffusionSchedule::cosine(1000, 0.008).expect("valid defaults")
    }

    pub fn len(&self) -> usize {
        self.t_count
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn offset(&self) -> f64 {
        self.s
    }

    fn check_step(&self, t: usize) -> Result<()> {
        if t < 1 || t > self.t_count {
            return Err(Error::domain(format!(
                "step t = {t} out of range 1..={}",
                self.t_count
            )));
        }
        Ok(())
    }

    /// `alpha_bar[t]`, t in 0..=T.
    pub fn alpha_bar(&self, t: usize) -> f64 {
        self.alpha_bar[t]
    }

    pub fn beta(&self, t: usize) -> f64 {
        self.beta[t - 1]
    }

    pub fn alpha(&self, t: usize) -> f64 {
        self.alpha[t - 1]
    }

    pub fn sigma(&self, t: usize) -> f64 {
        self.sigma[t - 1]
    }

    /// CSV dump `{t, beta, alpha, alpha_bar, sigma}` for rows t = 1..=T,
    /// preceded by the t = 0 row carrying the degenerate no-step values.
    pub fn to_csv(&self) -> String {
        use std::fmt::Write;
        let mut out = String::from("t,beta,alpha,alpha_bar,sigma\n");
        let _ = writeln!(out, "0,0,1,{:.17e},0", self.alpha_bar[0]);
        for t in 1..=self.t_count {
            let _ = writeln!(
                out,
                "{t},{:.17e},{:.17e},{:.17e},{:.17e}",
                self.beta(t),
                self.alpha(t),
                self.alpha_bar(t),
                self.sigma(t)
            );
        }
        out
    }
}

/// Forward kernel sample: `z_t = sqrt(abar_t) z0 + sqrt(1 - abar_t) noise`.
/// `t = 0` is the identity.
pub fn forward_sample(
    z0: &LatentTensor,
    t: usize,
    schedule: &DiffusionSchedule,
    noise: &LatentTensor,
) -> Result<LatentTensor> {
    if t > schedule.len() {
        return Err(Error::domain(format!("t = {t} beyond schedule end")));
    }
    let abar = schedule.alpha_bar(t);
    z0.lin_comb(abar.sqrt(), noise, (1.0 - abar).sqrt())
}

/// One reverse step:
/// `z_{t-1} = (z_t - beta_t / sqrt(1 - abar_t) eps) / sqrt(alpha_t) + sigma_t noise`,
/// with the noise term forced to zero at t = 1.
pub fn reverse_step(
    z_t: &LatentTensor,
    t: usize,
    eps_pred: &LatentTensor,
    schedule: &DiffusionSchedule,
    noise: &LatentTensor,
) -> Result<LatentTensor> {
    schedule.check_step(t)?;
    let abar = schedule.alpha_bar(t);
    let beta = schedule.beta(t);
    let alpha = schedule.alpha(t);
    let mean = z_t.lin_comb(
        1.0 / alpha.sqrt(),
        eps_pred,
        -beta / ((1.0 - abar).sqrt() * alpha.sqrt()),
    )?;
    if t == 1 {
        return Ok(mean);
    }
    mean.lin_comb(1.0, noise, schedule.sigma(t))
}

/// Noise implied by an x0 prediction: `eps = (z_t - sqrt(abar_t) x0) / sqrt(1 - abar_t)`.
pub fn x0_to_eps(
    z_t: &LatentTensor,
    x0_pred: &LatentTensor,
    t: usize,
    schedule: &DiffusionSchedule,
) -> Result<LatentTensor> {
    schedule.check_step(t)?;
    let abar = schedule.alpha_bar(t);
    if abar >= 1.0 {
        return Err(Error::domain("alpha_bar = 1 leaves the noise undetermined"));
    }
    z_t.lin_comb(
        1.0 / (1.0 - abar).sqrt(),
        x0_pred,
        -abar.sqrt() / (1.0 - abar).sqrt(),
    )
}

/// Inverse of [`x0_to_eps`]: the x0 implied by a noise prediction.
pub fn eps_to_x0(
    z_t: &LatentTensor,
    eps_pred: &LatentTensor,
    t: usize,
    schedule: &DiffusionSchedule,
) -> Result<LatentTensor> {
    schedule.check_step(t)?;
    let abar = schedule.alpha_bar(t);
    if abar <= 0.0 {
        return Err(Error::domain("alpha_bar = 0 leaves x0 undetermined"));
    }
    z_t.lin_comb(1.0 / abar.sqrt(), eps_pred, -(1.0 - abar).sqrt() / abar.sqrt())
}

/// Seeded standard-normal latent tensor, for demos and chain tests.
pub fn randn_tensor(rows: usize, cols: usize, seed: u64) -> LatentTensor {
    use rand::SeedableRng;
    use rand_distr::Distribution;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let values = (0..rows * cols)
        .map(|_| rand_distr::StandardNormal.sample(&mut rng))
        .collect();
    LatentTensor {
        rows,
        cols,
        values,
    }
}

/// Per-step noise predictor interface.
pub trait Denoiser {
    fn predict_eps(
        &self,
        z_t: &LatentTensor,
        t: usize,
        schedule: &DiffusionSchedule,
    ) -> Result<LatentTensor>;
}

/// Test-harness denoiser that knows the clean latent and returns the exact
/// noise under the x0 parameterization.
#[derive(Debug, Clone)]
pub struct OracleDenoiser {
    z0: LatentTensor,
}

impl OracleDenoiser {
    pub fn new(z0: LatentTensor) -> Self {
        OracleDenoiser { z0 }
    }
}

impl Denoiser for OracleDenoiser {
    fn predict_eps(
        &self,
        z_t: &LatentTensor,
        t: usize,
        schedule: &DiffusionSchedule,
    ) -> Result<LatentTensor> {
        x0_to_eps(z_t, &self.z0, t, schedule)
    }
}

/// Runs the reverse chain from `z_start` at t = T down to t = 0 with zero
/// injected noise, returning the final latent and the max-error trajectory
/// against `reference` (when given).
pub fn reverse_chain_zero_noise<D: Denoiser>(
    z_start: &LatentTensor,
    schedule: &DiffusionSchedule,
    denoiser: &D,
    reference: Option<&LatentTensor>,
) -> Result<(LatentTensor, Vec<f64>)> {
    let (rows, cols) = z_start.shape();
    let zero = LatentTensor::zeros(rows, cols);
    let mut z = z_start.clone();
    let mut errors = Vec::new();
    for t in (1..=schedule.len()).rev() {
        let eps = denoiser.predict_eps(&z, t, schedule)?;
        z = reverse_step(&z, t, &eps, schedule, &zero)?;
        if let Some(r) = reference {
            errors.push(z.max_abs_diff(r));
        }
    }
    Ok((z, errors))
}
