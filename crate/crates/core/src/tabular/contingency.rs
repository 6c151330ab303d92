use nalgebra::DMatrix;

use super::{CodedTable, ColumnRole, TabularError};

/// A nonnegative count matrix with labelled, role-tagged rows and columns.
/// Supplementary rows and columns ride along for projection but take no part
/// in axis construction.
#[derive(Clone, Debug)]
pub struct ContingencyTable {
    counts: DMatrix<f64>,
    row_labels: Vec<String>,
    col_labels: Vec<String>,
    row_roles: Vec<ColumnRole>,
    col_roles: Vec<ColumnRole>,
}

impl ContingencyTable {
    /// Builds a table with every row and column main.
    pub fn new(
        counts: DMatrix<f64>,
        row_labels: Vec<String>,
        col_labels: Vec<String>,
    ) -> Result<Self, TabularError> {
        let row_roles = vec![ColumnRole::Main; counts.nrows()];
        let col_roles = vec![ColumnRole::Main; counts.ncols()];
        Self::with_roles(counts, row_labels, col_labels, row_roles, col_roles)
    }

    pub fn with_roles(
        counts: DMatrix<f64>,
        row_labels: Vec<String>,
        col_labels: Vec<String>,
        row_roles: Vec<ColumnRole>,
        col_roles: Vec<ColumnRole>,
    ) -> Result<Self, TabularError> {
        if row_labels.len() != counts.nrows()
            || col_labels.len() != counts.ncols()
            || row_roles.len() != counts.nrows()
            || col_roles.len() != counts.ncols()
        {
            return Err(TabularError::DimensionMismatch(format!(
                "counts {}x{} with {} row / {} col labels",
                counts.nrows(),
                counts.ncols(),
                row_labels.len(),
                col_labels.len()
            )));
        }
        for i in 0..counts.nrows() {
            for j in 0..counts.ncols() {
                if counts[(i, j)] < 0.0 {
                    return Err(TabularError::NegativeCount(i, j));
                }
            }
        }
        let table = Self { counts, row_labels, col_labels, row_roles, col_roles };
        table.check_main_block()?;
        Ok(table)
    }

    fn check_main_block(&self) -> Result<(), TabularError> {
        let rows = self.main_rows();
        let cols = self.main_cols();
        if rows.is_empty() || cols.is_empty() {
            return Err(TabularError::Degenerate("no main rows or columns".into()));
        }
        let mut grand = 0.0;
        for &i in &rows {
            let mut total = 0.0;
            for &j in &cols {
                total += self.counts[(i, j)];
            }
            if total == 0.0 {
                return Err(TabularError::Degenerate(format!(
                    "main row {:?} is all zero over main columns",
                    self.row_labels[i]
                )));
            }
            grand += total;
        }
        for &j in &cols {
            let total: f64 = rows.iter().map(|&i| self.counts[(i, j)]).sum();
            if total == 0.0 {
                return Err(TabularError::Degenerate(format!(
                    "main column {:?} is all zero over main rows",
                    self.col_labels[j]
                )));
            }
        }
        debug_assert!(grand > 0.0);
        Ok(())
    }

    pub fn counts(&self) -> &DMatrix<f64> {
        &self.counts
    }

    pub fn row_labels(&self) -> &[String] {
        &self.row_labels
    }

    pub fn col_labels(&self) -> &[String] {
        &self.col_labels
    }

    pub fn row_roles(&self) -> &[ColumnRole] {
        &self.row_roles
    }

    pub fn col_roles(&self) -> &[ColumnRole] {
        &self.col_roles
    }

    pub fn main_rows(&self) -> Vec<usize> {
        role_indices(&self.row_roles)
    }

    pub fn main_cols(&self) -> Vec<usize> {
        role_indices(&self.col_roles)
    }

    pub fn grand_total_main(&self) -> f64 {
        let cols = self.main_cols();
        self.main_rows()
            .iter()
            .map(|&i| cols.iter().map(|&j| self.counts[(i, j)]).sum::<f64>())
            .sum()
    }
}

fn role_indices(roles: &[ColumnRole]) -> Vec<usize> {
    roles
        .iter()
        .enumerate()
        .filter(|(_, r)| **r == ColumnRole::Main)
        .map(|(i, _)| i)
        .collect()
}

/// Cross-tabulates two questions of a coded table: cell `(a, b)` counts the
/// individuals answering modality `a` on `row_q` and `b` on `col_q`.
/// Individuals missing either answer are excluded, so the grand total is the
/// number answering both. Modalities observed in no included individual are
/// dropped to keep the table nondegenerate.
pub fn crosstab(
    table: &CodedTable,
    row_q: &str,
    col_q: &str,
) -> Result<ContingencyTable, TabularError> {
    let schema = table.schema();
    let (ri, row_question) = schema
        .question(row_q)
        .ok_or_else(|| TabularError::UnknownQuestion(row_q.into()))?;
    let (ci, col_question) = schema
        .question(col_q)
        .ok_or_else(|| TabularError::UnknownQuestion(col_q.into()))?;

    let nr = row_question.modalities.len();
    let nc = col_question.modalities.len();
    let mut counts = DMatrix::zeros(nr, nc);
    for i in 0..table.n() {
        if let (Some(a), Some(b)) = (table.code(i, ri), table.code(i, ci)) {
            counts[(a as usize, b as usize)] += 1.0;
        }
    }

    let keep_rows: Vec<usize> = (0..nr).filter(|&i| counts.row(i).sum() > 0.0).collect();
    let keep_cols: Vec<usize> = (0..nc).filter(|&j| counts.column(j).sum() > 0.0).collect();
    if keep_rows.is_empty() || keep_cols.is_empty() {
        return Err(TabularError::Degenerate(
            "crosstab has no co-answered individuals".into(),
        ));
    }
    let trimmed = DMatrix::from_fn(keep_rows.len(), keep_cols.len(), |i, j| {
        counts[(keep_rows[i], keep_cols[j])]
    });
    let row_labels = keep_rows
        .iter()
        .map(|&i| row_question.modalities[i].clone())
        .collect();
    let col_labels = keep_cols
        .iter()
        .map(|&j| col_question.modalities[j].clone())
        .collect();
    ContingencyTable::new(trimmed, row_labels, col_labels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tabular::{Question, QuestionRole, SurveySchema};

    fn table(codes: Vec<Vec<Option<u32>>>) -> CodedTable {
        let schema = SurveySchema {
            id_column: "id".into(),
            questions: vec![
                Question {
                    id: "q1".into(),
                    label: String::new(),
                    modalities: vec!["a".into(), "b".into()],
                    role: QuestionRole::Active,
                },
                Question {
                    id: "q2".into(),
                    label: String::new(),
                    modalities: vec!["x".into(), "y".into()],
                    role: QuestionRole::Active,
                },
            ],
            sparse_threshold: 16,
            missing_as_modality: false,
            missing_values: vec![String::new()],
            strict: true,
        };
        let ids = (0..codes.len()).map(|i| format!("i{i}")).collect();
        CodedTable::new(schema, ids, codes).unwrap()
    }

    #[test]
    fn all_four_combinations_give_unit_cells() {
        let t = table(vec![
            vec![Some(0), Some(0)],
            vec![Some(0), Some(1)],
            vec![Some(1), Some(0)],
            vec![Some(1), Some(1)],
        ]);
        let ct = crosstab(&t, "q1", "q2").unwrap();
        assert_eq!(ct.counts().as_slice(), &[1.0, 1.0, 1.0, 1.0]);
        assert_eq!(ct.grand_total_main(), 4.0);
    }

    #[test]
    fn question_crossed_with_itself_is_diagonal() {
        let t = table(vec![
            vec![Some(0), Some(0)],
            vec![Some(0), Some(1)],
            vec![Some(1), Some(0)],
        ]);
        let ct = crosstab(&t, "q1", "q1").unwrap();
        assert_eq!(ct.counts()[(0, 0)], 2.0);
        assert_eq!(ct.counts()[(1, 1)], 1.0);
        assert_eq!(ct.counts()[(0, 1)], 0.0);
        assert_eq!(ct.counts()[(1, 0)], 0.0);
    }

    /// Six individuals, expected cells recomputed by exhaustive enumeration
    /// of answer pairs.
    #[test]
    fn six_individuals_match_enumeration() {
        let codes = vec![
            vec![Some(0), Some(1)],
            vec![Some(1), Some(1)],
            vec![Some(0), Some(0)],
            vec![Some(1), None],
            vec![Some(0), Some(1)],
            vec![None, Some(0)],
        ];
        let t = table(codes.clone());
        let ct = crosstab(&t, "q1", "q2").unwrap();
        let mut expected = [[0.0f64; 2]; 2];
        let mut both = 0.0;
        for row in &codes {
            if let (Some(a), Some(b)) = (row[0], row[1]) {
                expected[a as usize][b as usize] += 1.0;
                both += 1.0;
            }
        }
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(ct.counts()[(i, j)], expected[i][j]);
            }
        }
        assert_eq!(ct.grand_total_main(), both);
    }

    #[test]
    fn missing_answers_are_excluded_from_grand_total() {
        let t = table(vec![
            vec![Some(0), None],
            vec![Some(1), Some(1)],
            vec![None, Some(0)],
        ]);
        let ct = crosstab(&t, "q1", "q2").unwrap();
        assert_eq!(ct.grand_total_main(), 1.0);
    }

    #[test]
    fn unknown_question_errors() {
        let t = table(vec![vec![Some(0), Some(0)], vec![Some(1), Some(1)]]);
        assert!(matches!(
            crosstab(&t, "q1", "nope"),
            Err(TabularError::UnknownQuestion(_))
        ));
    }
}
