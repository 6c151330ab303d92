//! Coding of categorical survey data: schemas, coded tables, indicator
//! matrices (disjunctive coding, doubling, sparse demotion) and contingency
//! tables.

mod coded;
mod contingency;
mod indicator;
mod ingest;
mod schema;

pub use coded::CodedTable;
pub use contingency::{crosstab, ContingencyTable};
pub use indicator::{build_indicator, ColumnInfo, ColumnRole, IndicatorMatrix};
pub use ingest::ingest_csv;
pub use schema::{Question, QuestionRole, SurveySchema, MISSING_MODALITY};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum TabularError {
    #[error("i/o error: {0}")]
    Io(String),
    #[error("schema error: {0}")]
    SchemaParse(String),
    #[error("duplicate question id {0}")]
    DuplicateQuestionId(String),
    #[error("duplicate modality {1:?} in question {0}")]
    DuplicateModality(String, String),
    #[error("csv error: {0}")]
    Csv(String),
    #[error("column {0} not found in CSV header")]
    MissingColumn(String),
    #[error("unknown modality {1:?} for question {0}")]
    UnknownModality(String, String),
    #[error("duplicate individual id {0:?}")]
    DuplicateIndividualId(String),
    #[error("modality index {index} out of range for question {question}")]
    BadModalityIndex { question: String, index: u32 },
    #[error("table has no individuals")]
    EmptyTable,
    #[error("negative entry {value} in column {column}")]
    NegativeEntry { column: String, value: f64 },
    #[error("demotion at threshold {threshold} leaves no main column")]
    AllColumnsDemoted { threshold: u64 },
    #[error("unknown question {0}")]
    UnknownQuestion(String),
    #[error("contingency table has a negative count at ({0}, {1})")]
    NegativeCount(usize, usize),
    #[error("main block of the table is degenerate: {0}")]
    Degenerate(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
}
