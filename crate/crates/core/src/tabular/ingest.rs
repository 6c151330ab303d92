use std::collections::HashSet;
use std::path::Path;

use super::{CodedTable, SurveySchema, TabularError};

/// Reads an RFC 4180 CSV file (comma separated, UTF-8, first row a header)
/// and codes it against `schema`.
///
/// The header must contain the schema's id column and every question id.
/// Cell values listed in `schema.missing_values` code as missing; any other
/// value that is not a known modality of its question is an error in strict
/// mode and codes as missing otherwise.
pub fn ingest_csv(path: &Path, schema: &SurveySchema) -> Result<CodedTable, TabularError> {
    let file = std::fs::File::open(path)
        .map_err(|e| TabularError::Io(format!("{}: {e}", path.display())))?;
    ingest_reader(file, schema)
}

/// Same as [`ingest_csv`] but from any reader; used by the CSV-from-string
/// front ends.
pub fn ingest_reader<R: std::io::Read>(
    reader: R,
    schema: &SurveySchema,
) -> Result<CodedTable, TabularError> {
    schema.validate()?;
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| TabularError::Csv(e.to_string()))?
        .clone();

    let find = |name: &str| -> Result<usize, TabularError> {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| TabularError::MissingColumn(name.into()))
    };
    let id_col = find(&schema.id_column)?;
    let question_cols: Vec<usize> = schema
        .questions
        .iter()
        .map(|q| find(&q.id))
        .collect::<Result<_, _>>()?;

    let mut ids = Vec::new();
    let mut codes = Vec::new();
    let mut seen = HashSet::new();
    for record in rdr.records() {
        let record = record.map_err(|e| TabularError::Csv(e.to_string()))?;
        let id = record.get(id_col).unwrap_or("").to_string();
        if !seen.insert(id.clone()) {
            return Err(TabularError::DuplicateIndividualId(id));
        }
        let mut row = Vec::with_capacity(schema.questions.len());
        for (question, &col) in schema.questions.iter().zip(&question_cols) {
            let value = record.get(col).unwrap_or("");
            let code = if schema.is_missing_value(value) {
                None
            } else {
                match question.modalities.iter().position(|m| m == value) {
                    Some(idx) => Some(idx as u32),
                    None if schema.strict => {
                        return Err(TabularError::UnknownModality(
                            question.id.clone(),
                            value.into(),
                        ))
                    }
                    None => None,
                }
            };
            row.push(code);
        }
        ids.push(id);
        codes.push(row);
    }
    CodedTable::new(schema.clone(), ids, codes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tabular::{Question, QuestionRole};

    fn two_question_schema() -> SurveySchema {
        SurveySchema {
            id_column: "id".into(),
            questions: vec![
                Question {
                    id: "q1".into(),
                    label: String::new(),
                    modalities: vec!["yes".into(), "no".into()],
                    role: QuestionRole::Active,
                },
                Question {
                    id: "q2".into(),
                    label: String::new(),
                    modalities: vec!["yes".into(), "no".into()],
                    role: QuestionRole::Active,
                },
            ],
            sparse_threshold: 16,
            missing_as_modality: false,
            missing_values: vec![String::new()],
            strict: true,
        }
    }

    #[test]
    fn parses_four_line_csv() {
        let csv = "id,q1,q2\na,yes,no\nb,no,no\nc,yes,yes\nd,no,yes\n";
        let t = ingest_reader(csv.as_bytes(), &two_question_schema()).unwrap();
        assert_eq!(t.n(), 4);
        assert_eq!(t.n_questions(), 2);
        assert_eq!(t.code(0, 0), Some(0));
        assert_eq!(t.code(1, 0), Some(1));
        assert_eq!(t.code(3, 1), Some(0));
    }

    #[test]
    fn strict_mode_rejects_unknown_modality() {
        let csv = "id,q1,q2\na,yes,no\nb,maybe,no\n";
        let err = ingest_reader(csv.as_bytes(), &two_question_schema());
        match err {
            Err(TabularError::UnknownModality(q, v)) => {
                assert_eq!(q, "q1");
                assert_eq!(v, "maybe");
            }
            other => panic!("expected UnknownModality, got {other:?}"),
        }
    }

    #[test]
    fn lenient_mode_codes_unknown_as_missing() {
        let csv = "id,q1,q2\na,yes,no\nb,maybe,no\n";
        let mut schema = two_question_schema();
        schema.strict = false;
        let t = ingest_reader(csv.as_bytes(), &schema).unwrap();
        assert_eq!(t.code(1, 0), None);
    }

    #[test]
    fn missing_marker_codes_as_missing() {
        let csv = "id,q1,q2\na,yes,\nb,no,yes\n";
        let t = ingest_reader(csv.as_bytes(), &two_question_schema()).unwrap();
        assert_eq!(t.code(0, 1), None);
    }

    #[test]
    fn rejects_duplicate_ids_and_missing_columns() {
        let schema = two_question_schema();
        let dup = "id,q1,q2\na,yes,no\na,no,no\n";
        assert!(matches!(
            ingest_reader(dup.as_bytes(), &schema),
            Err(TabularError::DuplicateIndividualId(_))
        ));
        let missing = "id,q1\na,yes\n";
        assert!(matches!(
            ingest_reader(missing.as_bytes(), &schema),
            Err(TabularError::MissingColumn(c)) if c == "q2"
        ));
    }

    #[test]
    fn quoted_fields_parse_per_rfc4180() {
        let csv = "id,q1,q2\n\"a,1\",yes,no\nb,\"no\",yes\n";
        let t = ingest_reader(csv.as_bytes(), &two_question_schema()).unwrap();
        assert_eq!(t.ids()[0], "a,1");
        assert_eq!(t.code(1, 0), Some(1));
    }
}
