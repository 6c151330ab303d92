//! Geometric data analysis on categorical survey data.
//!
//! This crate fits Correspondence Analysis (CA) on contingency tables and
//! Multiple Correspondence Analysis (MCA) on 0/1 indicator matrices under the
//! chi-squared metric, plus a standardized-variable PCA for numeric baselines.
//! Around the factorization it provides:
//!
//! * schema-driven coding of survey CSV files into indicator matrices,
//!   including variable doubling and demotion of sparse modalities to
//!   supplementary status ([`tabular`]);
//! * per-axis diagnostics (contributions, squared cosines), Benzécri-modified
//!   inertia rates, supplementary-element projection and category centroids
//!   ([`ca`]);
//! * a permutation-based typicality test of a subcloud against a reference
//!   cloud, using a Mahalanobis statistic on factor coordinates
//!   ([`inference`]);
//! * mass-weighted Ward hierarchical clustering of factor coordinates with
//!   cophenetic (ultrametric) distances ([`cluster`]);
//! * deterministic SVG factor-plane plots and axis report tables
//!   ([`plot`], [`report`]).
//!
//! All fitted structures are immutable and safe to share across threads.

pub mod ca;
pub mod cluster;
pub mod inference;
pub mod model_io;
pub mod plot;
pub mod report;
pub mod tabular;

pub use ca::{FactorModel, ModelKind, Projection};
pub use cluster::Dendrogram;
pub use inference::{Cloud, Subcloud, TypicalityResult};
pub use tabular::{CodedTable, ContingencyTable, IndicatorMatrix, SurveySchema};
