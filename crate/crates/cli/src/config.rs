//! Shared flag groups, config-file merging, and provider construction.
//!
//! Precedence for every parameter: explicit command-line flag, then the
//! `--config` file (flat TOML `key = value`, keys matching the long flag
//! names with `-` or `_`), then the built-in default.

use std::path::Path;

use anyhow::{bail, Context, Result};
use clap::Args;

use vecfield::chem::{Element, ElementSet, Molecule};
use vecfield::field::{FieldParams, FieldVariant};
use vecfield::provider::{
    build_grid, wrap_noise, AnalyticProvider, FieldProvider, GridProvider, NoiseSpec,
    SpuriousProvider,
};
use vecfield::reconstruct::ReconstructionConfig;

/// Flat key-value configuration file.
#[derive(Debug, Default)]
pub struct ConfigFile {
    table: toml::value::Table,
}

impl ConfigFile {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else {
            return Ok(ConfigFile::default());
        };
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config file {}", path.display()))?;
        let table: toml::value::Table = toml::from_str(&text)
            .with_context(|| format!("parsing config file {}", path.display()))?;
        Ok(ConfigFile { table })
    }

    fn raw(&self, key: &str) -> Option<&toml::Value> {
        self.table
            .get(key)
            .or_else(|| self.table.get(&key.replace('_', "-")))
    }

    pub fn f64(&self, key: &str) -> Option<f64> {
        match self.raw(key) {
            Some(toml::Value::Float(f)) => Some(*f),
            Some(toml::Value::Integer(i)) => Some(*i as f64),
            _ => None,
        }
    }

    pub fn usize(&self, key: &str) -> Option<usize> {
        match self.raw(key) {
            Some(toml::Value::Integer(i)) if *i >= 0 => Some(*i as usize),
            _ => None,
        }
    }

    pub fn u64(&self, key: &str) -> Option<u64> {
        match self.raw(key) {
            Some(toml::Value::Integer(i)) if *i >= 0 => Some(*i as u64),
            _ => None,
        }
    }

    pub fn bool(&self, key: &str) -> Option<bool> {
        match self.raw(key) {
            Some(toml::Value::Boolean(b)) => Some(*b),
            _ => None,
        }
    }

    pub fn string(&self, key: &str) -> Option<String> {
        match self.raw(key) {
            Some(toml::Value::String(s)) => Some(s.clone()),
            _ => None,
        }
    }
}

/// Seed resolution: `--seed` flag, else the `VECFIELD_SEED` environment
/// variable, else the config file, else 42.
pub fn resolve_seed(flag: Option<u64>, cfg: &ConfigFile) -> Result<u64> {
    if let Some(s) = flag {
        return Ok(s);
    }
    if let Ok(env) = std::env::var("VECFIELD_SEED") {
        return env
            .trim()
            .parse()
            .with_context(|| format!("VECFIELD_SEED must be an integer, got '{env}'"));
    }
    Ok(cfg.u64("seed").unwrap_or(42))
}

/// Field-construction flags.
#[derive(Debug, Args, Clone)]
pub struct FieldArgs {
    /// Field variant: gaussian-clip (default), gaussian, or tanh.
    #[arg(long)]
    pub variant: Option<String>,
    /// Softmax temperature in Angstrom (default 0.1).
    #[arg(long)]
    pub sigma_sf: Option<f64>,
    /// Magnitude width in Angstrom (default 0.45).
    #[arg(long)]
    pub sigma_mag: Option<f64>,
    /// Magnitude clip distance in Angstrom (default 0.8).
    #[arg(long)]
    pub d_clip: Option<f64>,
    /// Direction-normalization epsilon (default 1e-8).
    #[arg(long)]
    pub eps_num: Option<f64>,
    /// Emit the repulsive field on absent element channels (default false).
    #[arg(long)]
    pub exclusive: Option<bool>,
    /// Element set: qm9 (C,H,O,N,F; default) or geom (adds S,Cl,Br).
    #[arg(long)]
    pub elements: Option<String>,
}

impl FieldArgs {
    pub fn resolve(&self, cfg: &ConfigFile) -> Result<(FieldParams, ElementSet)> {
        let defaults = FieldParams::default();
        let variant_name = self
            .variant
            .clone()
            .or_else(|| cfg.string("variant"))
            .unwrap_or_else(|| defaults.variant.name().to_string());
        let params = FieldParams {
            variant: FieldVariant::parse(&variant_name).map_err(anyhow::Error::msg)?,
            sigma_sf: self.sigma_sf.or_else(|| cfg.f64("sigma_sf")).unwrap_or(defaults.sigma_sf),
            sigma_mag: self
                .sigma_mag
                .or_else(|| cfg.f64("sigma_mag"))
                .unwrap_or(defaults.sigma_mag),
            d_clip: self.d_clip.or_else(|| cfg.f64("d_clip")).unwrap_or(defaults.d_clip),
            eps_num: self.eps_num.or_else(|| cfg.f64("eps_num")).unwrap_or(defaults.eps_num),
            exclusive: self
                .exclusive
                .or_else(|| cfg.bool("exclusive"))
                .unwrap_or(defaults.exclusive),
        };
        params.validate().map_err(anyhow::Error::msg)?;
        let set_name = self
            .elements
            .clone()
            .or_else(|| cfg.string("elements"))
            .unwrap_or_else(|| "qm9".into());
        let elements = parse_element_set(&set_name)?;
        Ok((params, elements))
    }
}

pub fn parse_element_set(name: &str) -> Result<ElementSet> {
    match name.to_ascii_lowercase().as_str() {
        "qm9" => Ok(ElementSet::qm9()),
        "geom" | "geom-drugs" => Ok(ElementSet::geom_drugs()),
        other => bail!("unknown element set '{other}' (expected qm9 or geom)"),
    }
}

/// Reconstruction flags.
#[derive(Debug, Args, Clone)]
pub struct ReconArgs {
    /// Euler step size (default 0.1).
    #[arg(long)]
    pub eta: Option<f64>,
    /// Convergence threshold on the field norm (default 1e-9).
    #[arg(long)]
    pub tau: Option<f64>,
    /// Maximum iterations per particle (default 500).
    #[arg(long)]
    pub t_max: Option<usize>,
    /// DBSCAN clustering radius in Angstrom (default 0.1).
    #[arg(long)]
    pub eps_db: Option<f64>,
    /// DBSCAN minimum samples (default 3).
    #[arg(long)]
    pub n_min: Option<usize>,
    /// Query budget override, e.g. "C:200,H:200,O:30" (defaults follow the
    /// element set: qm9 C:200 H:200 O:30 N:30 F:15; geom C:1000 H:1000
    /// O:100 N:150 F:20 S:20 Cl:20 Br:20).
    #[arg(long)]
    pub budget: Option<String>,
    /// Adaptive query-point selection from a scored pool (default false).
    #[arg(long)]
    pub adaptive: Option<bool>,
    /// Candidate pool multiplier for adaptive selection (default 4).
    #[arg(long)]
    pub pool_multiplier: Option<usize>,
    /// Neighbor count for the adaptive variation score (default 8).
    #[arg(long)]
    pub knn_k: Option<usize>,
    /// Softmax temperature for adaptive sampling (default: mean score).
    #[arg(long)]
    pub softmax_temp: Option<f64>,
}

impl ReconArgs {
    pub fn resolve(&self, cfg: &ConfigFile, elements: &ElementSet) -> Result<ReconstructionConfig> {
        let mut out = if elements.len() > 5 {
            ReconstructionConfig::geom_drugs()
        } else {
            ReconstructionConfig::qm9()
        };
        out.eta = self.eta.or_else(|| cfg.f64("eta")).unwrap_or(out.eta);
        out.tau = self.tau.or_else(|| cfg.f64("tau")).unwrap_or(out.tau);
        out.t_max = self.t_max.or_else(|| cfg.usize("t_max")).unwrap_or(out.t_max);
        out.eps_db = self.eps_db.or_else(|| cfg.f64("eps_db")).unwrap_or(out.eps_db);
        out.n_min = self.n_min.or_else(|| cfg.usize("n_min")).unwrap_or(out.n_min);
        out.adaptive = self
            .adaptive
            .or_else(|| cfg.bool("adaptive"))
            .unwrap_or(out.adaptive);
        out.pool_multiplier = self
            .pool_multiplier
            .or_else(|| cfg.usize("pool_multiplier"))
            .unwrap_or(out.pool_multiplier);
        out.knn_k = self.knn_k.or_else(|| cfg.usize("knn_k")).unwrap_or(out.knn_k);
        out.softmax_temp = self.softmax_temp.or_else(|| cfg.f64("softmax_temp")).or(out.softmax_temp);
        if let Some(spec) = self.budget.clone().or_else(|| cfg.string("budget")) {
            out.query_budget = parse_budget(&spec)?;
        }
        // Budgets must stay within the configured element set.
        for element in out.query_budget.keys() {
            if elements.channel_of(*element).is_none() {
                bail!("budget names element {element} outside the '{}-element' set", elements.len());
            }
        }
        out.validate().map_err(anyhow::Error::msg)?;
        Ok(out)
    }
}

pub fn parse_budget(spec: &str) -> Result<std::collections::BTreeMap<Element, usize>> {
    let mut budget = std::collections::BTreeMap::new();
    for part in spec.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let (sym, count) = part
            .split_once(':')
            .with_context(|| format!("budget entry '{part}' is not ELEMENT:COUNT"))?;
        let element = Element::from_symbol(sym.trim()).map_err(anyhow::Error::msg)?;
        let count: usize = count
            .trim()
            .parse()
            .with_context(|| format!("budget count in '{part}'"))?;
        budget.insert(element, count);
    }
    if budget.is_empty() {
        bail!("budget spec '{spec}' is empty");
    }
    Ok(budget)
}

/// Provider selection, parsed from strings like `analytic`,
/// `grid:5:3.0`, `noisy:0.25`, or `spurious:2:0.5`.
#[derive(Debug, Clone, PartialEq)]
pub enum ProviderKind {
    Analytic,
    Grid { size: usize, spacing: f64 },
    Noisy { sigma: f64 },
    Spurious { ghosts: usize, strength: f64 },
}

impl ProviderKind {
    pub fn parse(spec: &str) -> Result<Self> {
        let parts: Vec<&str> = spec.split(':').collect();
        match parts.as_slice() {
            ["analytic"] => Ok(ProviderKind::Analytic),
            ["grid", l, s] => Ok(ProviderKind::Grid {
                size: l.parse().with_context(|| format!("grid size in '{spec}'"))?,
                spacing: s.parse().with_context(|| format!("grid spacing in '{spec}'"))?,
            }),
            ["noisy", sigma] => Ok(ProviderKind::Noisy {
                sigma: sigma.parse().with_context(|| format!("noise sigma in '{spec}'"))?,
            }),
            ["spurious", ghosts, strength] => Ok(ProviderKind::Spurious {
                ghosts: ghosts.parse().with_context(|| format!("ghost count in '{spec}'"))?,
                strength: strength
                    .parse()
                    .with_context(|| format!("ghost strength in '{spec}'"))?,
            }),
            _ => bail!(
                "unknown provider '{spec}' (expected analytic, grid:L:SPACING, noisy:SIGMA, \
                 or spurious:GHOSTS:STRENGTH)"
            ),
        }
    }

    pub fn label(&self) -> String {
        match self {
            ProviderKind::Analytic => "analytic".into(),
            ProviderKind::Grid { size, spacing } => format!("grid:{size}:{spacing}"),
            ProviderKind::Noisy { sigma } => format!("noisy:{sigma}"),
            ProviderKind::Spurious { ghosts, strength } => format!("spurious:{ghosts}:{strength}"),
        }
    }

    /// Builds the provider over one molecule's analytic field.
    pub fn build(
        &self,
        mol: &Molecule,
        elements: &ElementSet,
        params: FieldParams,
        seed: u64,
    ) -> Result<Box<dyn FieldProvider>> {
        let provider: Box<dyn FieldProvider> = match *self {
            ProviderKind::Analytic => {
                Box::new(AnalyticProvider::new(mol, elements, params).map_err(anyhow::Error::msg)?)
            }
            ProviderKind::Grid { size, spacing } => {
                let grid =
                    build_grid(mol, elements, size, spacing, params).map_err(anyhow::Error::msg)?;
                Box::new(GridProvider::new(grid, elements.clone()).map_err(anyhow::Error::msg)?)
            }
            ProviderKind::Noisy { sigma } => {
                let inner =
                    AnalyticProvider::new(mol, elements, params).map_err(anyhow::Error::msg)?;
                Box::new(wrap_noise(inner, NoiseSpec::new(sigma, seed)))
            }
            ProviderKind::Spurious { ghosts, strength } => Box::new(
                SpuriousProvider::new(mol, elements, params, ghosts, strength, seed)
                    .map_err(anyhow::Error::msg)?,
            ),
        };
        Ok(provider)
    }
}
