use super::{SurveySchema, TabularError};

/// A survey table after coding: one row per individual, one `Option<u32>`
/// modality index per question. `None` is the explicit missing marker.
///
/// Construction validates that every stored index addresses a modality of its
/// question. Fit-level requirements (at least two individuals, at least one
/// answered active question per individual) are checked at fit time, not
/// here, since they depend on the model being built.
#[derive(Clone, Debug)]
pub struct CodedTable {
    schema: SurveySchema,
    ids: Vec<String>,
    codes: Vec<Vec<Option<u32>>>,
}

impl CodedTable {
    pub fn new(
        schema: SurveySchema,
        ids: Vec<String>,
        codes: Vec<Vec<Option<u32>>>,
    ) -> Result<Self, TabularError> {
        schema.validate()?;
        if codes.is_empty() {
            return Err(TabularError::EmptyTable);
        }
        if ids.len() != codes.len() {
            return Err(TabularError::DimensionMismatch(format!(
                "{} ids for {} rows",
                ids.len(),
                codes.len()
            )));
        }
        let q = schema.n_questions();
        for row in &codes {
            if row.len() != q {
                return Err(TabularError::DimensionMismatch(format!(
                    "row with {} answers, schema has {q} questions",
                    row.len()
                )));
            }
            for (question, code) in schema.questions.iter().zip(row) {
                if let Some(idx) = code {
                    if *idx as usize >= question.modalities.len() {
                        return Err(TabularError::BadModalityIndex {
                            question: question.id.clone(),
                            index: *idx,
                        });
                    }
                }
            }
        }
        Ok(Self { schema, ids, codes })
    }

    /// Number of individuals.
    pub fn n(&self) -> usize {
        self.codes.len()
    }

    /// Number of questions.
    pub fn n_questions(&self) -> usize {
        self.schema.n_questions()
    }

    pub fn schema(&self) -> &SurveySchema {
        &self.schema
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    /// Modality index of individual `i` on question `q`, `None` if missing.
    pub fn code(&self, i: usize, q: usize) -> Option<u32> {
        self.codes[i][q]
    }

    /// Individuals (by row index) whose answer to `question_id` is `modality`.
    pub fn rows_with_modality(
        &self,
        question_id: &str,
        modality: &str,
    ) -> Result<Vec<usize>, TabularError> {
        let (q, question) = self
            .schema
            .question(question_id)
            .ok_or_else(|| TabularError::UnknownQuestion(question_id.into()))?;
        let m = question
            .modalities
            .iter()
            .position(|x| x == modality)
            .ok_or_else(|| TabularError::UnknownModality(question_id.into(), modality.into()))?
            as u32;
        Ok((0..self.n())
            .filter(|&i| self.codes[i][q] == Some(m))
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tabular::{Question, QuestionRole};

    pub(crate) fn schema(questions: &[(&str, &[&str])]) -> SurveySchema {
        SurveySchema {
            id_column: "id".into(),
            questions: questions
                .iter()
                .map(|(id, mods)| Question {
                    id: (*id).into(),
                    label: String::new(),
                    modalities: mods.iter().map(|m| (*m).into()).collect(),
                    role: QuestionRole::Active,
                })
                .collect(),
            sparse_threshold: 16,
            missing_as_modality: false,
            missing_values: vec![String::new()],
            strict: true,
        }
    }

    #[test]
    fn rejects_out_of_range_modality_index() {
        let s = schema(&[("q1", &["a", "b"])]);
        let err = CodedTable::new(s, vec!["i1".into()], vec![vec![Some(2)]]);
        assert!(matches!(err, Err(TabularError::BadModalityIndex { .. })));
    }

    #[test]
    fn rejects_empty_table() {
        let s = schema(&[("q1", &["a", "b"])]);
        assert!(matches!(
            CodedTable::new(s, vec![], vec![]),
            Err(TabularError::EmptyTable)
        ));
    }

    #[test]
    fn selects_rows_by_modality() {
        let s = schema(&[("q1", &["a", "b"])]);
        let t = CodedTable::new(
            s,
            vec!["i1".into(), "i2".into(), "i3".into()],
            vec![vec![Some(0)], vec![Some(1)], vec![Some(0)]],
        )
        .unwrap();
        assert_eq!(t.rows_with_modality("q1", "a").unwrap(), vec![0, 2]);
        assert!(t.rows_with_modality("q9", "a").is_err());
    }
}
