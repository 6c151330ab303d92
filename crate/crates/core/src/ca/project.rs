use super::{CaError, FactorModel, ModelKind, ORIGIN_TOL};

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProjectionRole {
    SupplementaryRow,
    SupplementaryCol,
    Centroid,
}

/// A point mapped into an existing factor space without influencing the
/// axes: a supplementary row/column profile or a group centroid.
#[derive(Clone, Debug, serde::Serialize, serde::Deserialize)]
pub struct Projection {
    pub label: String,
    pub role: ProjectionRole,
    /// Principal coordinates on the model's retained axes.
    pub coords: Vec<f64>,
    /// Squared cosine with each retained axis; all zero for a point at the
    /// cloud origin.
    pub cos2: Vec<f64>,
    /// Exact squared distance of the point to the cloud origin.
    pub dist2: f64,
}

fn check_profile(counts: &[f64]) -> Result<f64, CaError> {
    let mut total = 0.0;
    for (idx, &x) in counts.iter().enumerate() {
        if !x.is_finite() || x < 0.0 {
            return Err(CaError::BadProfile(format!("entry {idx} is {x}")));
        }
        total += x;
    }
    if total <= 0.0 {
        return Err(CaError::ZeroProfile);
    }
    Ok(total)
}

impl FactorModel {
    /// Projects a supplementary row given its counts over the main columns,
    /// using the transition formula
    /// `f_l = (1/sqrt(lambda_l)) * sum_j (x_j/total) g_jl`.
    pub fn project_supplementary_row(
        &self,
        label: &str,
        counts: &[f64],
    ) -> Result<Projection, CaError> {
        if matches!(self.kind, ModelKind::Pca { .. }) {
            return Err(CaError::KindMismatch { expected: "ca or mca" });
        }
        if counts.len() != self.n_cols() {
            return Err(CaError::DimensionMismatch(format!(
                "profile has {} entries, model has {} main columns",
                counts.len(),
                self.n_cols()
            )));
        }
        let total = check_profile(counts)?;
        let coords: Vec<f64> = (0..self.n_axes)
            .map(|l| {
                let transition: f64 = (0..self.n_cols())
                    .map(|j| counts[j] / total * self.col_coords[(j, l)])
                    .sum();
                transition / self.eigenvalues[l].sqrt()
            })
            .collect();
        let mut dist2 = 0.0;
        for j in 0..self.n_cols() {
            let diff = counts[j] / total - self.col_masses[j];
            dist2 += diff * diff / self.col_masses[j];
        }
        Ok(projection(label, ProjectionRole::SupplementaryRow, coords, dist2))
    }

    /// Dual of [`project_supplementary_row`](Self::project_supplementary_row)
    /// for a supplementary column given its counts over the main rows.
    pub fn project_supplementary_col(
        &self,
        label: &str,
        counts: &[f64],
    ) -> Result<Projection, CaError> {
        if matches!(self.kind, ModelKind::Pca { .. }) {
            return Err(CaError::KindMismatch { expected: "ca or mca" });
        }
        if counts.len() != self.n_rows() {
            return Err(CaError::DimensionMismatch(format!(
                "profile has {} entries, model has {} main rows",
                counts.len(),
                self.n_rows()
            )));
        }
        let total = check_profile(counts)?;
        let coords: Vec<f64> = (0..self.n_axes)
            .map(|l| {
                let transition: f64 = (0..self.n_rows())
                    .map(|i| counts[i] / total * self.row_coords[(i, l)])
                    .sum();
                transition / self.eigenvalues[l].sqrt()
            })
            .collect();
        let mut dist2 = 0.0;
        for i in 0..self.n_rows() {
            let diff = counts[i] / total - self.row_masses[i];
            dist2 += diff * diff / self.row_masses[i];
        }
        Ok(projection(label, ProjectionRole::SupplementaryCol, coords, dist2))
    }

    /// Projects a new data row into a standardized-variable PCA model by
    /// applying the stored standardization and rotating onto the principal
    /// axes.
    pub fn project_data_row(&self, label: &str, values: &[f64]) -> Result<Projection, CaError> {
        let ModelKind::Pca { means, sdevs } = &self.kind else {
            return Err(CaError::KindMismatch { expected: "pca" });
        };
        if values.len() != self.n_cols() {
            return Err(CaError::DimensionMismatch(format!(
                "row has {} values, model has {} variables",
                values.len(),
                self.n_cols()
            )));
        }
        let z: Vec<f64> = values
            .iter()
            .zip(means.iter().zip(sdevs))
            .map(|(x, (m, s))| (x - m) / s)
            .collect();
        let k = self.n_cols() as f64;
        let coords: Vec<f64> = (0..self.n_axes)
            .map(|l| {
                // recover the unit eigenvector from the scaled loading
                let scale = k.sqrt() * self.eigenvalues[l].sqrt();
                (0..self.n_cols()).map(|j| z[j] * self.col_coords[(j, l)] / scale).sum()
            })
            .collect();
        let dist2 = z.iter().map(|x| x * x).sum();
        Ok(projection(label, ProjectionRole::SupplementaryRow, coords, dist2))
    }

    /// Mass-weighted mean point of a set of main rows, with its squared
    /// cosines. Equals the supplementary projection of the rows' aggregated
    /// profile.
    pub fn category_centroid(&self, label: &str, rows: &[usize]) -> Result<Projection, CaError> {
        if rows.is_empty() {
            return Err(CaError::EmptySet);
        }
        for &i in rows {
            if i >= self.n_rows() {
                return Err(CaError::RowOutOfRange(i));
            }
        }
        let total_mass: f64 = rows.iter().map(|&i| self.row_masses[i]).sum();
        let coords: Vec<f64> = (0..self.n_axes)
            .map(|l| {
                rows.iter().map(|&i| self.row_masses[i] * self.row_coords[(i, l)]).sum::<f64>()
                    / total_mass
            })
            .collect();

        // exact squared distance to the origin via the aggregated profile
        // (CA/MCA) or the aggregated standardized row (PCA)
        let dist2 = match &self.kind {
            ModelKind::Pca { .. } => {
                let mut d2 = 0.0;
                for j in 0..self.correspondence.ncols() {
                    let zbar: f64 = rows
                        .iter()
                        .map(|&i| self.row_masses[i] * self.correspondence[(i, j)])
                        .sum::<f64>()
                        / total_mass;
                    d2 += zbar * zbar;
                }
                d2
            }
            _ => {
                let mut d2 = 0.0;
                for j in 0..self.correspondence.ncols() {
                    let h: f64 = rows
                        .iter()
                        .map(|&i| self.correspondence[(i, j)])
                        .sum::<f64>()
                        / total_mass;
                    let diff = h - self.col_masses[j];
                    d2 += diff * diff / self.col_masses[j];
                }
                d2
            }
        };
        Ok(projection(label, ProjectionRole::Centroid, coords, dist2))
    }
}

fn projection(label: &str, role: ProjectionRole, coords: Vec<f64>, dist2: f64) -> Projection {
    let cos2 = coords
        .iter()
        .map(|f| if dist2 > ORIGIN_TOL { f * f / dist2 } else { 0.0 })
        .collect();
    Projection { label: label.into(), role, coords, cos2, dist2 }
}
