//! Correspondence analysis engine: CA on contingency tables, MCA on
//! indicator matrices, standardized-variable PCA, and the shared factor-model
//! diagnostics (contributions, squared cosines, modified inertia rates,
//! supplementary projections, category centroids).

mod fit;
mod project;
mod svd;

pub use fit::{fit_ca, fit_mca, fit_pca_standardized};
pub use project::{Projection, ProjectionRole};

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

/// Singular values below this fraction of the largest are treated as zero.
pub(crate) const RANK_TOL: f64 = 1e-12;

/// Squared distances at or below this are the cloud origin: squared cosines
/// there are floating-point dust and are reported as zero.
pub(crate) const ORIGIN_TOL: f64 = 1e-24;

#[derive(Debug, Error)]
pub enum CaError {
    #[error("degenerate table: {0}")]
    DegenerateTable(String),
    #[error("indicator matrix has no main columns")]
    EmptyActiveBlock,
    #[error("individual {0:?} answers no active question")]
    UnansweredIndividual(String),
    #[error("column {0} has zero standard deviation")]
    ConstantColumn(usize),
    #[error("need at least 2 rows, got {0}")]
    TooFewRows(usize),
    #[error("axis {axis} out of range: model retains {retained} axes")]
    BadAxis { axis: usize, retained: usize },
    #[error("axis {0} has zero eigenvalue")]
    ZeroEigenvalue(usize),
    #[error("row index {0} out of range")]
    RowOutOfRange(usize),
    #[error("column index {0} out of range")]
    ColOutOfRange(usize),
    #[error("{0:?} is a supplementary point")]
    SupplementaryPoint(String),
    #[error("point {0:?} lies at the cloud origin, cos2 undefined")]
    OriginPoint(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("profile sums to zero")]
    ZeroProfile,
    #[error("invalid profile: {0}")]
    BadProfile(String),
    #[error("empty index set")]
    EmptySet,
    #[error("modified rates need Q >= 2, got {0}")]
    QTooSmall(usize),
    #[error("operation requires a {expected} model")]
    KindMismatch { expected: &'static str },
    #[error("unknown point label {0:?}")]
    UnknownLabel(String),
}

/// What kind of cloud the model factorizes, with the kind-specific state
/// needed to project new elements.
#[derive(Clone, Debug, PartialEq)]
pub enum ModelKind {
    /// CA of a contingency table.
    Ca,
    /// MCA: CA of the main block of an indicator matrix.
    Mca { q_active: usize },
    /// PCA of standardized columns; keeps the standardization so new rows
    /// can be projected.
    Pca { means: Vec<f64>, sdevs: Vec<f64> },
}

impl ModelKind {
    pub fn name(&self) -> &'static str {
        match self {
            ModelKind::Ca => "ca",
            ModelKind::Mca { .. } => "mca",
            ModelKind::Pca { .. } => "pca",
        }
    }
}

/// A fitted factorization: masses, eigenvalues and principal coordinates for
/// the row and column clouds, with per-point diagnostics and any
/// supplementary projections attached at fit time.
///
/// `eigenvalues` holds the full positive spectrum (so that they sum to the
/// total inertia); coordinate and diagnostic matrices are truncated to
/// `n_axes` retained axes. Immutable once fitted.
#[derive(Clone, Debug)]
pub struct FactorModel {
    pub(crate) kind: ModelKind,
    pub(crate) row_labels: Vec<String>,
    pub(crate) col_labels: Vec<String>,
    pub(crate) row_masses: DVector<f64>,
    pub(crate) col_masses: DVector<f64>,
    pub(crate) eigenvalues: Vec<f64>,
    pub(crate) total_inertia: f64,
    pub(crate) row_coords: DMatrix<f64>,
    pub(crate) col_coords: DMatrix<f64>,
    pub(crate) row_contrib: DMatrix<f64>,
    pub(crate) col_contrib: DMatrix<f64>,
    pub(crate) row_cos2: DMatrix<f64>,
    pub(crate) col_cos2: DMatrix<f64>,
    pub(crate) row_dist2: DVector<f64>,
    pub(crate) col_dist2: DVector<f64>,
    /// CA/MCA: the correspondence matrix P of the main block.
    /// PCA: the standardized data matrix Z.
    pub(crate) correspondence: DMatrix<f64>,
    pub(crate) supplementary: Vec<Projection>,
    pub(crate) n_axes: usize,
}

impl FactorModel {
    pub fn kind(&self) -> &ModelKind {
        &self.kind
    }

    /// Number of retained coordinate axes.
    pub fn n_axes(&self) -> usize {
        self.n_axes
    }

    /// Rank of the factorization (count of positive eigenvalues).
    pub fn rank(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Positive eigenvalues in descending order; they sum to the total
    /// inertia.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn total_inertia(&self) -> f64 {
        self.total_inertia
    }

    /// Raw inertia rates, one per positive eigenvalue.
    pub fn rates(&self) -> Vec<f64> {
        self.eigenvalues.iter().map(|l| l / self.total_inertia).collect()
    }

    pub fn row_labels(&self) -> &[String] {
        &self.row_labels
    }

    pub fn col_labels(&self) -> &[String] {
        &self.col_labels
    }

    pub fn n_rows(&self) -> usize {
        self.row_coords.nrows()
    }

    pub fn n_cols(&self) -> usize {
        self.col_coords.nrows()
    }

    pub fn row_masses(&self) -> &DVector<f64> {
        &self.row_masses
    }

    pub fn col_masses(&self) -> &DVector<f64> {
        &self.col_masses
    }

    /// Principal coordinates of the main row points, one row per point,
    /// one column per retained axis.
    pub fn row_coords(&self) -> &DMatrix<f64> {
        &self.row_coords
    }

    pub fn col_coords(&self) -> &DMatrix<f64> {
        &self.col_coords
    }

    pub fn row_contributions(&self) -> &DMatrix<f64> {
        &self.row_contrib
    }

    pub fn col_contributions(&self) -> &DMatrix<f64> {
        &self.col_contrib
    }

    pub fn row_cos2(&self) -> &DMatrix<f64> {
        &self.row_cos2
    }

    pub fn col_cos2(&self) -> &DMatrix<f64> {
        &self.col_cos2
    }

    /// Squared chi-squared (resp. standardized-Euclidean) distance of each
    /// main row point to the cloud origin.
    pub fn row_dist2(&self) -> &DVector<f64> {
        &self.row_dist2
    }

    pub fn col_dist2(&self) -> &DVector<f64> {
        &self.col_dist2
    }

    /// Supplementary projections attached at fit time.
    pub fn supplementary(&self) -> &[Projection] {
        &self.supplementary
    }

    /// Returns the model with extra supplementary projections attached;
    /// used by front ends that project elements after fitting.
    pub fn with_supplementary(mut self, extra: Vec<Projection>) -> Self {
        self.supplementary.extend(extra);
        self
    }

    fn check_axis(&self, axis: usize) -> Result<(), CaError> {
        if axis >= self.n_axes {
            return Err(CaError::BadAxis { axis, retained: self.n_axes });
        }
        Ok(())
    }

    /// Contributions of every row and column point to one axis, each set
    /// summing to one.
    pub fn contributions(&self, axis: usize) -> Result<(Vec<f64>, Vec<f64>), CaError> {
        self.check_axis(axis)?;
        if self.eigenvalues[axis] == 0.0 {
            return Err(CaError::ZeroEigenvalue(axis));
        }
        Ok((
            self.row_contrib.column(axis).iter().copied().collect(),
            self.col_contrib.column(axis).iter().copied().collect(),
        ))
    }

    /// Squared cosine of a main row point with an axis.
    pub fn row_cos2_at(&self, row: usize, axis: usize) -> Result<f64, CaError> {
        self.check_axis(axis)?;
        if row >= self.n_rows() {
            return Err(CaError::RowOutOfRange(row));
        }
        if self.row_dist2[row] <= ORIGIN_TOL {
            return Err(CaError::OriginPoint(self.row_labels[row].clone()));
        }
        Ok(self.row_cos2[(row, axis)])
    }

    /// Squared cosine of a main column point with an axis.
    pub fn col_cos2_at(&self, col: usize, axis: usize) -> Result<f64, CaError> {
        self.check_axis(axis)?;
        if col >= self.n_cols() {
            return Err(CaError::ColOutOfRange(col));
        }
        if self.col_dist2[col] <= ORIGIN_TOL {
            return Err(CaError::OriginPoint(self.col_labels[col].clone()));
        }
        Ok(self.col_cos2[(col, axis)])
    }

    /// Chi-squared distance between two main row profiles,
    /// `sqrt(sum_j (p_aj/r_a - p_bj/r_b)^2 / c_j)`. At full rank this equals
    /// the Euclidean distance between the rows' factor coordinates.
    ///
    /// Defined for CA/MCA models only; the PCA row cloud lives in the plain
    /// standardized metric.
    pub fn chi2_distance(&self, a: usize, b: usize) -> Result<f64, CaError> {
        if matches!(self.kind, ModelKind::Pca { .. }) {
            return Err(CaError::KindMismatch { expected: "ca or mca" });
        }
        let n = self.n_rows();
        if a >= n {
            return Err(CaError::RowOutOfRange(a));
        }
        if b >= n {
            return Err(CaError::RowOutOfRange(b));
        }
        let ra = self.row_masses[a];
        let rb = self.row_masses[b];
        let mut d2 = 0.0;
        for j in 0..self.correspondence.ncols() {
            let diff = self.correspondence[(a, j)] / ra - self.correspondence[(b, j)] / rb;
            d2 += diff * diff / self.col_masses[j];
        }
        Ok(d2.sqrt())
    }

    /// Label-addressed variant of [`chi2_distance`](Self::chi2_distance);
    /// supplementary labels are rejected since the chi-squared metric is
    /// defined on the main cloud.
    pub fn chi2_distance_between(&self, a: &str, b: &str) -> Result<f64, CaError> {
        let ia = self.main_row_index(a)?;
        let ib = self.main_row_index(b)?;
        self.chi2_distance(ia, ib)
    }

    fn main_row_index(&self, label: &str) -> Result<usize, CaError> {
        if let Some(i) = self.row_labels.iter().position(|l| l == label) {
            return Ok(i);
        }
        if self.supplementary.iter().any(|p| p.label == label) {
            return Err(CaError::SupplementaryPoint(label.into()));
        }
        Err(CaError::UnknownLabel(label.into()))
    }
}

/// One axis of the Benzécri-modified rate table.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ModifiedRate {
    /// Zero-based axis index into the eigenvalue list.
    pub axis: usize,
    pub eigenvalue: f64,
    pub modified: f64,
    pub rate: f64,
}

/// Benzécri-modified inertia rates for MCA eigenvalues.
///
/// Keeps the eigenvalues strictly above the average `1/Q`, maps each to
/// `(Q/(Q-1))^2 (lambda - 1/Q)^2`, and normalizes over the retained set.
/// Returns an empty table when no eigenvalue exceeds the average.
pub fn modified_rates(eigenvalues: &[f64], q: usize) -> Result<Vec<ModifiedRate>, CaError> {
    if q < 2 {
        return Err(CaError::QTooSmall(q));
    }
    let average = 1.0 / q as f64;
    let factor = (q as f64 / (q as f64 - 1.0)).powi(2);
    let retained: Vec<(usize, f64, f64)> = eigenvalues
        .iter()
        .enumerate()
        .filter(|(_, &l)| l > average)
        .map(|(axis, &l)| (axis, l, factor * (l - average) * (l - average)))
        .collect();
    let total: f64 = retained.iter().map(|(_, _, m)| m).sum();
    Ok(retained
        .into_iter()
        .map(|(axis, eigenvalue, modified)| ModifiedRate {
            axis,
            eigenvalue,
            modified,
            rate: modified / total,
        })
        .collect())
}
