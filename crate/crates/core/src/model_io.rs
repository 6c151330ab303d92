//! JSON serialization of fitted models.
//!
//! The layout (`format = "gda-model/1"`) is stable and self-sufficient:
//! reports, plots, typicality tests and clustering can all run from a stored
//! model without refitting. Floats are written in shortest round-trip form,
//! so serialization is lossless and byte-deterministic.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ca::{modified_rates, FactorModel, ModelKind, ModifiedRate, Projection};

#[derive(Debug, Error)]
pub enum ModelIoError {
    #[error("json error: {0}")]
    Json(String),
    #[error("invalid model file: {0}")]
    Invalid(String),
}

pub const FORMAT: &str = "gda-model/1";

/// One side of the cloud: labels, masses, coordinates and diagnostics.
/// Matrices are row-major nested lists, one inner list per point, one entry
/// per retained axis.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PointSet {
    pub labels: Vec<String>,
    pub masses: Vec<f64>,
    pub coords: Vec<Vec<f64>>,
    pub contributions: Vec<Vec<f64>>,
    pub cos2: Vec<Vec<f64>>,
    pub dist2: Vec<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PcaState {
    pub means: Vec<f64>,
    pub sdevs: Vec<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ModelFile {
    pub format: String,
    /// `ca`, `mca` or `pca`.
    pub kind: String,
    /// Number of active questions (MCA only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q_active: Option<usize>,
    /// Standardization state (PCA only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pca: Option<PcaState>,
    pub total_inertia: f64,
    /// Full positive spectrum, descending.
    pub eigenvalues: Vec<f64>,
    /// Raw inertia rates, one per eigenvalue.
    pub rates: Vec<f64>,
    /// Benzécri-modified rates (MCA only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub modified_rates: Option<Vec<ModifiedRate>>,
    /// Number of retained coordinate axes.
    pub n_axes: usize,
    pub rows: PointSet,
    pub cols: PointSet,
    pub supplementary: Vec<Projection>,
    /// CA/MCA: correspondence matrix of the main block; PCA: standardized
    /// data. Kept so profile distances and re-projections work from a
    /// stored model.
    pub correspondence: Vec<Vec<f64>>,
}

fn matrix_to_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

fn rows_to_matrix(rows: &[Vec<f64>], ncols: usize, what: &str) -> Result<DMatrix<f64>, ModelIoError> {
    for r in rows {
        if r.len() != ncols {
            return Err(ModelIoError::Invalid(format!(
                "{what}: expected {ncols} columns, found {}",
                r.len()
            )));
        }
    }
    Ok(DMatrix::from_fn(rows.len(), ncols, |i, j| rows[i][j]))
}

/// Converts a fitted model into its stable file representation.
pub fn to_file(model: &FactorModel) -> ModelFile {
    let (kind, q_active, pca) = match model.kind() {
        ModelKind::Ca => ("ca", None, None),
        ModelKind::Mca { q_active } => ("mca", Some(*q_active), None),
        ModelKind::Pca { means, sdevs } => (
            "pca",
            None,
            Some(PcaState { means: means.clone(), sdevs: sdevs.clone() }),
        ),
    };
    let modified = q_active.map(|q| modified_rates(model.eigenvalues(), q).expect("q >= 2"));
    ModelFile {
        format: FORMAT.into(),
        kind: kind.into(),
        q_active,
        pca,
        total_inertia: model.total_inertia(),
        eigenvalues: model.eigenvalues().to_vec(),
        rates: model.rates(),
        modified_rates: modified,
        n_axes: model.n_axes(),
        rows: PointSet {
            labels: model.row_labels().to_vec(),
            masses: model.row_masses().iter().copied().collect(),
            coords: matrix_to_rows(model.row_coords()),
            contributions: matrix_to_rows(model.row_contributions()),
            cos2: matrix_to_rows(model.row_cos2()),
            dist2: model.row_dist2().iter().copied().collect(),
        },
        cols: PointSet {
            labels: model.col_labels().to_vec(),
            masses: model.col_masses().iter().copied().collect(),
            coords: matrix_to_rows(model.col_coords()),
            contributions: matrix_to_rows(model.col_contributions()),
            cos2: matrix_to_rows(model.col_cos2()),
            dist2: model.col_dist2().iter().copied().collect(),
        },
        supplementary: model.supplementary().to_vec(),
        correspondence: matrix_to_rows(&model.correspondence),
    }
}

pub fn to_json(model: &FactorModel) -> String {
    serde_json::to_string_pretty(&to_file(model)).expect("model serializes")
}

/// Rebuilds a [`FactorModel`] from its file representation, validating
/// dimensions.
pub fn from_file(file: &ModelFile) -> Result<FactorModel, ModelIoError> {
    if file.format != FORMAT {
        return Err(ModelIoError::Invalid(format!(
            "unsupported format {:?}",
            file.format
        )));
    }
    let kind = match file.kind.as_str() {
        "ca" => ModelKind::Ca,
        "mca" => ModelKind::Mca {
            q_active: file
                .q_active
                .ok_or_else(|| ModelIoError::Invalid("mca model without q_active".into()))?,
        },
        "pca" => {
            let state = file
                .pca
                .as_ref()
                .ok_or_else(|| ModelIoError::Invalid("pca model without standardization".into()))?;
            ModelKind::Pca { means: state.means.clone(), sdevs: state.sdevs.clone() }
        }
        other => return Err(ModelIoError::Invalid(format!("unknown kind {other:?}"))),
    };
    let l = file.n_axes;
    let (nr, nc) = (file.rows.labels.len(), file.cols.labels.len());
    let check = |set: &PointSet, n: usize, what: &str| -> Result<(), ModelIoError> {
        if set.masses.len() != n || set.dist2.len() != n || set.coords.len() != n {
            return Err(ModelIoError::Invalid(format!("{what}: inconsistent point count")));
        }
        Ok(())
    };
    check(&file.rows, nr, "rows")?;
    check(&file.cols, nc, "cols")?;
    for p in &file.supplementary {
        if p.coords.len() != l || p.cos2.len() != l {
            return Err(ModelIoError::Invalid(format!(
                "supplementary {:?}: expected {l} axes",
                p.label
            )));
        }
    }
    // the correspondence matrix (P or Z) always spans the main columns
    let corr_cols = nc;
    Ok(FactorModel {
        kind,
        row_labels: file.rows.labels.clone(),
        col_labels: file.cols.labels.clone(),
        row_masses: DVector::from_vec(file.rows.masses.clone()),
        col_masses: DVector::from_vec(file.cols.masses.clone()),
        eigenvalues: file.eigenvalues.clone(),
        total_inertia: file.total_inertia,
        row_coords: rows_to_matrix(&file.rows.coords, l, "row coords")?,
        col_coords: rows_to_matrix(&file.cols.coords, l, "col coords")?,
        row_contrib: rows_to_matrix(&file.rows.contributions, l, "row contributions")?,
        col_contrib: rows_to_matrix(&file.cols.contributions, l, "col contributions")?,
        row_cos2: rows_to_matrix(&file.rows.cos2, l, "row cos2")?,
        col_cos2: rows_to_matrix(&file.cols.cos2, l, "col cos2")?,
        row_dist2: DVector::from_vec(file.rows.dist2.clone()),
        col_dist2: DVector::from_vec(file.cols.dist2.clone()),
        correspondence: rows_to_matrix(&file.correspondence, corr_cols, "correspondence")?,
        supplementary: file.supplementary.clone(),
        n_axes: l,
    })
}

pub fn from_json(text: &str) -> Result<FactorModel, ModelIoError> {
    let file: ModelFile =
        serde_json::from_str(text).map_err(|e| ModelIoError::Json(e.to_string()))?;
    from_file(&file)
}
