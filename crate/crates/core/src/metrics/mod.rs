//! Distributional evaluation of molecule corpora: Wasserstein-1 and
//! total-variation distances over geometry and type statistics, aggregated
//! into a benchmark-style report.

mod distance;
mod geometry;
mod report;

pub use distance::{total_variation, wasserstein1, CategoricalDistribution};
pub use geometry::{extract_geometry, MolecularGeometry};
pub use report::{evaluate_corpus, MetricsReport};
