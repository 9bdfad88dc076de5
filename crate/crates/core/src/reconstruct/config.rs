//! Reconstruction pipeline parameters.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::chem::Element;
use crate::error::{Error, Result};

/// Bond-inference tolerance applied after atom extraction.
pub const DEFAULT_BOND_RHO: f64 = 1.5;

/// Parameters of query-point dynamics, clustering, and query budgeting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReconstructionConfig {
    /// Euler step size.
    pub eta: f64,
    /// Convergence threshold on the field norm. The default stops particles
    /// a few nanometers-of-an-Angstrom from the attractor (residuals on the
    /// order of 1e-9 A), which the per-atom centroid then averages away.
    pub tau: f64,
    /// Maximum Euler iterations per particle.
    pub t_max: usize,
    /// DBSCAN clustering radius (Angstrom).
    pub eps_db: f64,
    /// DBSCAN minimum samples (neighborhood includes the point itself).
    pub n_min: usize,
    /// Query points per element.
    pub query_budget: BTreeMap<Element, usize>,
    /// Select query points adaptively from a larger uniform pool.
    pub adaptive: bool,
    /// Pool size multiplier for adaptive selection.
    pub pool_multiplier: usize,
    /// Spatial neighbor count for the adaptive variation score.
    pub knn_k: usize,
    /// Softmax temperature for adaptive sampling; `None` uses the mean score.
    pub softmax_temp: Option<f64>,
}

impl Default for ReconstructionConfig {
    fn default() -> Self {
        ReconstructionConfig::qm9()
    }
}

impl ReconstructionConfig {
    /// Defaults for the five-element chemistry: 500 iterations, step 0.1,
    /// clustering radius 0.1, minimum samples 3, budgets
    /// C:200 H:200 O:30 N:30 F:15. Adaptive query-point selection is on by
    /// default: with fixed budgets, uniform initialization under-samples the
    /// attraction basins of rare elements in larger molecules, while a
    /// scored pool concentrates start points where the field varies.
    pub fn qm9() -> Self {
        ReconstructionConfig {
            eta: 0.1,
            tau: 1e-9,
            t_max: 500,
            eps_db: 0.1,
            n_min: 3,
            query_budget: BTreeMap::from([
                (Element::C, 200),
                (Element::H, 200),
                (Element::O, 30),
                (Element::N, 30),
                (Element::F, 15),
            ]),
            adaptive: true,
            pool_multiplier: 16,
            knn_k: 8,
            softmax_temp: None,
        }
    }

    /// Defaults for the eight-element chemistry with the larger budgets:
    /// C:1000 H:1000 O:100 N:150 F:20 S:20 Cl:20 Br:20.
    pub fn geom_drugs() -> Self {
        ReconstructionConfig {
            query_budget: BTreeMap::from([
                (Element::C, 1000),
                (Element::H, 1000),
                (Element::O, 100),
                (Element::N, 150),
                (Element::F, 20),
                (Element::S, 20),
                (Element::Cl, 20),
                (Element::Br, 20),
            ]),
            ..ReconstructionConfig::qm9()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eta > 0.0) {
            return Err(Error::domain("eta must be positive"));
        }
        if self.tau < 0.0 || self.tau.is_nan() {
            return Err(Error::domain("tau must be non-negative"));
        }
        if self.t_max < 1 {
            return Err(Error::domain("t_max must be at least 1"));
        }
        if !(self.eps_db > 0.0) {
            return Err(Error::domain("eps_db must be positive"));
        }
        if self.n_min < 1 {
            return Err(Error::domain("n_min must be at least 1"));
        }
        if self.adaptive {
            if self.pool_multiplier < 1 {
                return Err(Error::domain("pool_multiplier must be at least 1"));
            }
            if self.knn_k < 2 {
                return Err(Error::domain("knn_k must be at least 2"));
            }
        }
        Ok(())
    }

    /// Budgets multiplied by `factor` (rounded up), for size-proportional
    /// scaling studies.
    pub fn with_scaled_budget(&self, factor: f64) -> Self {
        let mut scaled = self.clone();
        for count in scaled.query_budget.values_mut() {
            *count = ((*count as f64 * factor).ceil() as usize).max(1);
        }
        scaled
    }

    pub fn total_budget(&self) -> usize {
        self.query_budget.values().sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn qm9_defaults_match_reference_table() {
        let cfg = ReconstructionConfig::qm9();
        assert_eq!(cfg.t_max, 500);
        assert_eq!(cfg.eta, 0.1);
        assert_eq!(cfg.eps_db, 0.1);
        assert_eq!(cfg.n_min, 3);
        assert_eq!(cfg.query_budget[&Element::C], 200);
        assert_eq!(cfg.query_budget[&Element::H], 200);
        assert_eq!(cfg.query_budget[&Element::O], 30);
        assert_eq!(cfg.query_budget[&Element::N], 30);
        assert_eq!(cfg.query_budget[&Element::F], 15);
        assert!(cfg.validate().is_ok());
    }

    #[test]
    fn geom_budgets() {
        let cfg = ReconstructionConfig::geom_drugs();
        assert_eq!(cfg.query_budget[&Element::C], 1000);
        assert_eq!(cfg.query_budget[&Element::Br], 20);
        assert_eq!(cfg.total_budget(), 2330);
    }

    #[test]
    fn validation_rejects_degenerate_values() {
        let ok = ReconstructionConfig::qm9();
        assert!(ReconstructionConfig { eta: 0.0, ..ok.clone() }.validate().is_err());
        assert!(ReconstructionConfig { t_max: 0, ..ok.clone() }.validate().is_err());
        assert!(ReconstructionConfig { eps_db: -1.0, ..ok.clone() }.validate().is_err());
        assert!(ReconstructionConfig { n_min: 0, ..ok.clone() }.validate().is_err());
        assert!(ReconstructionConfig { tau: f64::INFINITY, ..ok }.validate().is_ok());
    }

    #[test]
    fn budget_scaling_rounds_up() {
        let cfg = ReconstructionConfig::qm9().with_scaled_budget(0.1);
        assert_eq!(cfg.query_budget[&Element::C], 20);
        assert_eq!(cfg.query_budget[&Element::F], 2);
    }
}
