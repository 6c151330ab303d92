//! Axis report tables: modalities (or rows) sorted by descending
//! contribution with their principal coordinate, supplementary points listed
//! separately with coordinates and squared cosines.

use crate::ca::{CaError, FactorModel, ProjectionRole};

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportTarget {
    Rows,
    Cols,
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct ReportLine {
    pub label: String,
    /// Contribution to the axis as a fraction of the axis inertia.
    pub contribution: f64,
    pub coordinate: f64,
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct SupplementaryLine {
    pub label: String,
    pub coordinate: f64,
    pub cos2: f64,
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct AxisReport {
    /// Zero-based axis index.
    pub axis: usize,
    pub eigenvalue: f64,
    pub rate: f64,
    pub target: ReportTarget,
    pub lines: Vec<ReportLine>,
    pub supplementary: Vec<SupplementaryLine>,
}

/// Builds the per-axis table for one side of the cloud, sorted by
/// descending contribution (ties by label).
pub fn axis_report(
    model: &FactorModel,
    axis: usize,
    target: ReportTarget,
) -> Result<AxisReport, CaError> {
    if axis >= model.n_axes() {
        return Err(CaError::BadAxis { axis, retained: model.n_axes() });
    }
    let (labels, contrib, coords) = match target {
        ReportTarget::Rows => (model.row_labels(), model.row_contributions(), model.row_coords()),
        ReportTarget::Cols => (model.col_labels(), model.col_contributions(), model.col_coords()),
    };
    let mut lines: Vec<ReportLine> = labels
        .iter()
        .enumerate()
        .map(|(i, label)| ReportLine {
            label: label.clone(),
            contribution: contrib[(i, axis)],
            coordinate: coords[(i, axis)],
        })
        .collect();
    lines.sort_by(|a, b| {
        b.contribution
            .partial_cmp(&a.contribution)
            .unwrap()
            .then_with(|| a.label.cmp(&b.label))
    });

    let wanted = |role: ProjectionRole| match target {
        ReportTarget::Rows => {
            role == ProjectionRole::SupplementaryRow || role == ProjectionRole::Centroid
        }
        ReportTarget::Cols => role == ProjectionRole::SupplementaryCol,
    };
    let supplementary = model
        .supplementary()
        .iter()
        .filter(|p| wanted(p.role))
        .map(|p| SupplementaryLine {
            label: p.label.clone(),
            coordinate: p.coords[axis],
            cos2: p.cos2[axis],
        })
        .collect();

    Ok(AxisReport {
        axis,
        eigenvalue: model.eigenvalues()[axis],
        rate: model.eigenvalues()[axis] / model.total_inertia(),
        target,
        lines,
        supplementary,
    })
}

impl AxisReport {
    /// Human-readable table; percentages at two decimals, coordinates at
    /// seven.
    pub fn to_text(&self) -> String {
        let width = self
            .lines
            .iter()
            .map(|l| l.label.len())
            .chain(self.supplementary.iter().map(|l| l.label.len()))
            .max()
            .unwrap_or(8)
            .max(8);
        let mut out = String::new();
        out.push_str(&format!(
            "Axis {}  eigenvalue {:.6}  rate {:.2}%\n",
            self.axis + 1,
            self.eigenvalue,
            self.rate * 100.0
        ));
        out.push_str(&format!(
            "{:<width$}  {:>10}  {:>12}\n",
            "label", "contrib%", "coord"
        ));
        for line in &self.lines {
            out.push_str(&format!(
                "{:<width$}  {:>10.2}  {:>12.7}\n",
                line.label,
                line.contribution * 100.0,
                line.coordinate
            ));
        }
        if !self.supplementary.is_empty() {
            out.push_str(&format!(
                "\nsupplementary\n{:<width$}  {:>12}  {:>8}\n",
                "label", "coord", "cos2"
            ));
            for line in &self.supplementary {
                out.push_str(&format!(
                    "{:<width$}  {:>12.7}  {:>8.4}\n",
                    line.label, line.coordinate, line.cos2
                ));
            }
        }
        out
    }

    /// Machine-readable CSV; floats are written in shortest round-trip form
    /// so they parse back bit-identically.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("label,role,contribution,coordinate,cos2\n");
        for line in &self.lines {
            out.push_str(&format!(
                "{},main,{},{},\n",
                csv_field(&line.label),
                line.contribution,
                line.coordinate
            ));
        }
        for line in &self.supplementary {
            out.push_str(&format!(
                "{},supplementary,,{},{}\n",
                csv_field(&line.label),
                line.coordinate,
                line.cos2
            ));
        }
        out
    }
}

fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
