use std::path::{Path, PathBuf};

use gda_core::plot::RateMode;
use gda_core::report::ReportTarget;
use serde::Deserialize;

use crate::CliError;

/// Run configuration, loaded from a TOML file. Relative paths are resolved
/// against the config file's directory.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub input: InputConfig,
    #[serde(default)]
    pub analysis: AnalysisConfig,
    pub ca: Option<CaConfig>,
    pub pca: Option<PcaConfig>,
    #[serde(default, rename = "centroid")]
    pub centroids: Vec<CentroidConfig>,
    pub typicality: Option<TypicalityConfig>,
    #[serde(default)]
    pub cluster: ClusterConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AnalysisKind {
    Ca,
    Mca,
    Pca,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputConfig {
    /// Data CSV: a survey table (mca, or ca via crosstab), a counts matrix
    /// (ca without a crosstab block) or a numeric matrix (pca).
    pub csv: PathBuf,
    /// Survey schema TOML; required for mca and for crosstab ca.
    pub schema: Option<PathBuf>,
    pub kind: AnalysisKind,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AnalysisConfig {
    /// Coordinate axes to retain (None = full rank).
    pub max_axes: Option<usize>,
    /// Which rate labels plots carry.
    pub rates: RateMode,
    /// One-based axis pair used by plots by default.
    pub axes: Vec<usize>,
    /// Demotion threshold; falls back to the schema's value.
    pub sparse_threshold: Option<u64>,
    /// Questions forced to supplementary for this run (main/supplementary
    /// interchange without editing the schema).
    pub supplementary_questions: Vec<String>,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self {
            max_axes: None,
            rates: RateMode::Raw,
            axes: vec![1, 2],
            sparse_threshold: None,
            supplementary_questions: Vec::new(),
        }
    }
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CaConfig {
    /// Crosstab mode: cross these two questions of the survey CSV.
    pub row_question: Option<String>,
    pub col_question: Option<String>,
    /// Counts-matrix mode: labels of supplementary rows/columns.
    #[serde(default)]
    pub supplementary_rows: Vec<String>,
    #[serde(default)]
    pub supplementary_cols: Vec<String>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PcaConfig {
    /// Row ids projected as supplementary individuals instead of fitting.
    #[serde(default)]
    pub supplementary_rows: Vec<String>,
}

/// A centroid group: either an explicit id list or all individuals with a
/// given answer.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CentroidConfig {
    pub label: String,
    #[serde(default)]
    pub ids: Vec<String>,
    pub question: Option<String>,
    pub modality: Option<String>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TypicalityConfig {
    #[serde(default = "default_n_perm")]
    pub n_perm: usize,
    #[serde(default)]
    pub seed: u64,
    /// One-based axes the test runs on; empty = all retained axes.
    #[serde(default)]
    pub axes: Vec<usize>,
    /// Subcloud by explicit individual ids...
    #[serde(default)]
    pub ids: Vec<String>,
    /// ...or by an answer...
    pub question: Option<String>,
    pub modality: Option<String>,
    /// ...or by supplementary projections stored in the model (external
    /// points).
    #[serde(default)]
    pub supplementary_labels: Vec<String>,
}

fn default_n_perm() -> usize {
    999
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ClusterConfig {
    pub target: ReportTarget,
    /// Optional cut into k clusters.
    pub k: Option<usize>,
    /// One-based axes; empty = all retained.
    pub axes: Vec<usize>,
}

impl Default for ClusterConfig {
    fn default() -> Self {
        Self { target: ReportTarget::Cols, k: None, axes: Vec::new() }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub dir: PathBuf,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { dir: PathBuf::from("out") }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let mut config: RunConfig = toml::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        config.input.csv = resolve(base, &config.input.csv);
        if let Some(schema) = &config.input.schema {
            config.input.schema = Some(resolve(base, schema));
        }
        config.output.dir = resolve(base, &config.output.dir);
        config.validate()?;
        Ok(config)
    }

    fn validate(&self) -> Result<(), CliError> {
        if self.analysis.axes.iter().any(|&a| a == 0) {
            return Err(CliError::Config("axes are one-based; 0 is not an axis".into()));
        }
        if self.input.kind == AnalysisKind::Mca && self.input.schema.is_none() {
            return Err(CliError::Config("mca input needs a schema".into()));
        }
        if let Some(ca) = &self.ca {
            if ca.row_question.is_some() != ca.col_question.is_some() {
                return Err(CliError::Config(
                    "crosstab mode needs both row_question and col_question".into(),
                ));
            }
            if ca.row_question.is_some() && self.input.schema.is_none() {
                return Err(CliError::Config("crosstab mode needs a schema".into()));
            }
        }
        if let Some(t) = &self.typicality {
            if t.n_perm == 0 {
                return Err(CliError::Config("n_perm must be at least 1".into()));
            }
            let selectors = [
                !t.ids.is_empty(),
                t.question.is_some(),
                !t.supplementary_labels.is_empty(),
            ];
            if selectors.iter().filter(|&&s| s).count() != 1 {
                return Err(CliError::Config(
                    "typicality needs exactly one subcloud selector: ids, question+modality, or supplementary_labels"
                        .into(),
                ));
            }
            if t.question.is_some() != t.modality.is_some() {
                return Err(CliError::Config(
                    "typicality modality selector needs both question and modality".into(),
                ));
            }
        }
        for c in &self.centroids {
            let by_ids = !c.ids.is_empty();
            let by_modality = c.question.is_some() && c.modality.is_some();
            if by_ids == by_modality {
                return Err(CliError::Config(format!(
                    "centroid {:?} needs either ids or question+modality",
                    c.label
                )));
            }
        }
        Ok(())
    }
}

fn resolve(base: &Path, path: &Path) -> PathBuf {
    if path.is_absolute() {
        path.to_path_buf()
    } else {
        base.join(path)
    }
}

/// Parses a `--axes a,b` override (one-based).
pub fn parse_axes(text: &str) -> Result<(usize, usize), CliError> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 2 {
        return Err(CliError::Config(format!("--axes wants two comma-separated axes, got {text:?}")));
    }
    let a: usize = parts[0].trim().parse().map_err(|_| {
        CliError::Config(format!("bad axis {:?}", parts[0]))
    })?;
    let b: usize = parts[1].trim().parse().map_err(|_| {
        CliError::Config(format!("bad axis {:?}", parts[1]))
    })?;
    if a == 0 || b == 0 || a == b {
        return Err(CliError::Config("axes are one-based and must differ".into()));
    }
    Ok((a, b))
}
