use serde::{Deserialize, Serialize};

use super::TabularError;

/// Role of a question (all of its modalities) in the analysis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QuestionRole {
    Active,
    Supplementary,
}

impl Default for QuestionRole {
    fn default() -> Self {
        QuestionRole::Active
    }
}

/// One categorical question with its ordered modality labels.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Question {
    pub id: String,
    #[serde(default)]
    pub label: String,
    pub modalities: Vec<String>,
    #[serde(default)]
    pub role: QuestionRole,
}

/// Coding schema for a categorical survey: the ordered question list, the
/// main/supplementary partition, and how missing and sparse responses are
/// handled.
///
/// Schemas are usually loaded from a TOML file:
///
/// ```toml
/// id_column = "id"
/// sparse_threshold = 16
///
/// [[question]]
/// id = "q1"
/// label = "difficulty dressing"
/// modalities = ["NO", "YES", "YESPLUS"]
/// role = "active"
/// ```
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SurveySchema {
    /// Name of the individual-identifier column in the CSV.
    pub id_column: String,
    #[serde(rename = "question")]
    pub questions: Vec<Question>,
    /// Main indicator columns with totals at or below this count are demoted
    /// to supplementary by [`IndicatorMatrix::demote_sparse`] when driven
    /// from a run configuration.
    ///
    /// [`IndicatorMatrix::demote_sparse`]: super::IndicatorMatrix::demote_sparse
    #[serde(default = "default_sparse_threshold")]
    pub sparse_threshold: u64,
    /// When true, each question gets an extra explicit missing-value modality
    /// column instead of coding missing answers as an all-zero block.
    #[serde(default)]
    pub missing_as_modality: bool,
    /// Cell values treated as a missing answer.
    #[serde(default = "default_missing_values")]
    pub missing_values: Vec<String>,
    /// When true (the default), a cell value that is neither a known modality
    /// nor a missing marker is an error; when false it is coded as missing.
    #[serde(default = "default_strict")]
    pub strict: bool,
}

fn default_sparse_threshold() -> u64 {
    16
}

fn default_missing_values() -> Vec<String> {
    vec![String::new()]
}

fn default_strict() -> bool {
    true
}

/// Label given to the synthetic missing-value modality when
/// `missing_as_modality` is set.
pub const MISSING_MODALITY: &str = "NA";

impl SurveySchema {
    /// Parses a schema from TOML text and validates it.
    pub fn from_toml_str(text: &str) -> Result<Self, TabularError> {
        let schema: SurveySchema =
            toml::from_str(text).map_err(|e| TabularError::SchemaParse(e.to_string()))?;
        schema.validate()?;
        Ok(schema)
    }

    /// Reads and parses a schema file.
    pub fn from_toml_file(path: &std::path::Path) -> Result<Self, TabularError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| TabularError::Io(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    /// Checks the schema invariants: unique question ids, unique modality
    /// labels within each question, at least one modality per question.
    pub fn validate(&self) -> Result<(), TabularError> {
        if self.questions.is_empty() {
            return Err(TabularError::SchemaParse("no questions".into()));
        }
        let mut seen = std::collections::HashSet::new();
        for q in &self.questions {
            if !seen.insert(q.id.as_str()) {
                return Err(TabularError::DuplicateQuestionId(q.id.clone()));
            }
            if q.modalities.is_empty() {
                return Err(TabularError::SchemaParse(format!(
                    "question {} has no modalities",
                    q.id
                )));
            }
            let mut mods = std::collections::HashSet::new();
            for m in &q.modalities {
                if !mods.insert(m.as_str()) {
                    return Err(TabularError::DuplicateModality(q.id.clone(), m.clone()));
                }
            }
            if self.missing_as_modality && q.modalities.iter().any(|m| m == MISSING_MODALITY) {
                return Err(TabularError::DuplicateModality(
                    q.id.clone(),
                    MISSING_MODALITY.into(),
                ));
            }
        }
        Ok(())
    }

    /// Looks a question up by id, returning its position as well.
    pub fn question(&self, id: &str) -> Option<(usize, &Question)> {
        self.questions.iter().enumerate().find(|(_, q)| q.id == id)
    }

    pub fn n_questions(&self) -> usize {
        self.questions.len()
    }

    /// Number of active questions.
    pub fn n_active(&self) -> usize {
        self.questions
            .iter()
            .filter(|q| q.role == QuestionRole::Active)
            .count()
    }

    /// Total modality count over all questions, including the synthetic
    /// missing modalities when `missing_as_modality` is set.
    pub fn total_modalities(&self) -> usize {
        let extra = if self.missing_as_modality {
            self.questions.len()
        } else {
            0
        };
        self.questions.iter().map(|q| q.modalities.len()).sum::<usize>() + extra
    }

    pub fn is_missing_value(&self, value: &str) -> bool {
        self.missing_values.iter().any(|m| m == value)
    }
}
