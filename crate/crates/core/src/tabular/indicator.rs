use nalgebra::DMatrix;

use super::{CodedTable, QuestionRole, TabularError, MISSING_MODALITY};

/// Role of a single indicator column.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ColumnRole {
    Main,
    Supplementary,
}

/// Metadata of one indicator column: the owning question, the modality it
/// codes, and whether it participates in axis construction.
#[derive(Clone, Debug)]
pub struct ColumnInfo {
    pub question_id: String,
    pub modality: String,
    pub role: ColumnRole,
}

impl ColumnInfo {
    /// Display label, question id and modality concatenated (the usual
    /// biplot labelling, e.g. `AcDif5YESPLUS`).
    pub fn label(&self) -> String {
        format!("{}{}", self.question_id, self.modality)
    }
}

/// Individuals × modalities coding matrix.
///
/// [`build_indicator`] produces 0/1 disjunctive coding; [`double_columns`]
/// outputs may hold any nonnegative score. Column roles start from the
/// schema's question roles and can be narrowed per column by
/// [`demote_sparse`].
///
/// [`build_indicator`]: fn@build_indicator
/// [`double_columns`]: IndicatorMatrix::double_columns
/// [`demote_sparse`]: IndicatorMatrix::demote_sparse
#[derive(Clone, Debug)]
pub struct IndicatorMatrix {
    data: DMatrix<f64>,
    columns: Vec<ColumnInfo>,
    row_ids: Vec<String>,
    q_active: usize,
}

/// Disjunctive coding of a coded table: one column per modality, exactly one
/// 1 in each answered question's block, all zeros for a missing answer.
///
/// When the schema sets `missing_as_modality`, each question instead gets an
/// explicit trailing missing column so that every row block sums to one.
pub fn build_indicator(table: &CodedTable) -> Result<IndicatorMatrix, TabularError> {
    let schema = table.schema();
    let n = table.n();
    if n == 0 {
        return Err(TabularError::EmptyTable);
    }
    let with_missing = schema.missing_as_modality;
    let j_total = schema.total_modalities();

    let mut columns = Vec::with_capacity(j_total);
    let mut offsets = Vec::with_capacity(schema.n_questions());
    for q in &schema.questions {
        let role = match q.role {
            QuestionRole::Active => ColumnRole::Main,
            QuestionRole::Supplementary => ColumnRole::Supplementary,
        };
        offsets.push(columns.len());
        for m in &q.modalities {
            columns.push(ColumnInfo {
                question_id: q.id.clone(),
                modality: m.clone(),
                role,
            });
        }
        if with_missing {
            columns.push(ColumnInfo {
                question_id: q.id.clone(),
                modality: MISSING_MODALITY.into(),
                role,
            });
        }
    }

    let mut data = DMatrix::zeros(n, j_total);
    for i in 0..n {
        for (q, question) in schema.questions.iter().enumerate() {
            match table.code(i, q) {
                Some(m) => data[(i, offsets[q] + m as usize)] = 1.0,
                None if with_missing => {
                    data[(i, offsets[q] + question.modalities.len())] = 1.0
                }
                None => {}
            }
        }
    }

    Ok(IndicatorMatrix {
        data,
        columns,
        row_ids: table.ids().to_vec(),
        q_active: schema.n_active(),
    })
}

impl IndicatorMatrix {
    /// Builds an indicator matrix directly from parts; used by tests and the
    /// doubling/demotion constructors.
    pub fn from_parts(
        data: DMatrix<f64>,
        columns: Vec<ColumnInfo>,
        row_ids: Vec<String>,
        q_active: usize,
    ) -> Result<Self, TabularError> {
        if data.ncols() != columns.len() {
            return Err(TabularError::DimensionMismatch(format!(
                "{} data columns, {} column descriptors",
                data.ncols(),
                columns.len()
            )));
        }
        if data.nrows() != row_ids.len() {
            return Err(TabularError::DimensionMismatch(format!(
                "{} data rows, {} row ids",
                data.nrows(),
                row_ids.len()
            )));
        }
        for (j, col) in columns.iter().enumerate() {
            for i in 0..data.nrows() {
                if data[(i, j)] < 0.0 {
                    return Err(TabularError::NegativeEntry {
                        column: col.label(),
                        value: data[(i, j)],
                    });
                }
            }
        }
        Ok(Self { data, columns, row_ids, q_active })
    }

    pub fn n(&self) -> usize {
        self.data.nrows()
    }

    pub fn n_columns(&self) -> usize {
        self.data.ncols()
    }

    pub fn q_active(&self) -> usize {
        self.q_active
    }

    pub fn data(&self) -> &DMatrix<f64> {
        &self.data
    }

    pub fn columns(&self) -> &[ColumnInfo] {
        &self.columns
    }

    pub fn row_ids(&self) -> &[String] {
        &self.row_ids
    }

    pub fn column_totals(&self) -> Vec<f64> {
        (0..self.data.ncols()).map(|j| self.data.column(j).sum()).collect()
    }

    /// Indices of main columns.
    pub fn main_columns(&self) -> Vec<usize> {
        self.columns
            .iter()
            .enumerate()
            .filter(|(_, c)| c.role == ColumnRole::Main)
            .map(|(j, _)| j)
            .collect()
    }

    /// Demotes every main column whose total is at or below `threshold` to
    /// supplementary. Entries are untouched; only roles change. Returns the
    /// new matrix and the demoted column indices.
    pub fn demote_sparse(&self, threshold: u64) -> Result<(Self, Vec<usize>), TabularError> {
        let totals = self.column_totals();
        let mut columns = self.columns.clone();
        let mut demoted = Vec::new();
        for (j, col) in columns.iter_mut().enumerate() {
            if col.role == ColumnRole::Main && totals[j] <= threshold as f64 {
                col.role = ColumnRole::Supplementary;
                demoted.push(j);
            }
        }
        if !columns.iter().any(|c| c.role == ColumnRole::Main) {
            return Err(TabularError::AllColumnsDemoted { threshold });
        }
        Ok((
            Self {
                data: self.data.clone(),
                columns,
                row_ids: self.row_ids.clone(),
                q_active: self.q_active,
            },
            demoted,
        ))
    }

    /// Replaces each column `x` by the pair `(x, m - x)` where `m` is that
    /// column's declared maximum, making all row sums equal to the sum of the
    /// maxima. Labels get `+` and `-` suffixes.
    pub fn double_columns(&self, maxima: &[f64]) -> Result<Self, TabularError> {
        if maxima.len() != self.data.ncols() {
            return Err(TabularError::DimensionMismatch(format!(
                "{} maxima for {} columns",
                maxima.len(),
                self.data.ncols()
            )));
        }
        let n = self.data.nrows();
        let mut data = DMatrix::zeros(n, 2 * self.data.ncols());
        let mut columns = Vec::with_capacity(2 * self.columns.len());
        for (j, col) in self.columns.iter().enumerate() {
            let m = maxima[j];
            for i in 0..n {
                let x = self.data[(i, j)];
                if x < 0.0 {
                    return Err(TabularError::NegativeEntry {
                        column: col.label(),
                        value: x,
                    });
                }
                let complement = m - x;
                if complement < 0.0 {
                    return Err(TabularError::NegativeEntry {
                        column: format!("{}-", col.label()),
                        value: complement,
                    });
                }
                data[(i, 2 * j)] = x;
                data[(i, 2 * j + 1)] = complement;
            }
            let mut plus = col.clone();
            plus.modality = format!("{}+", col.modality);
            let mut minus = col.clone();
            minus.modality = format!("{}-", col.modality);
            columns.push(plus);
            columns.push(minus);
        }
        Ok(Self {
            data,
            columns,
            row_ids: self.row_ids.clone(),
            q_active: self.q_active,
        })
    }

    /// Doubling with one shared maximum for every column.
    pub fn double_columns_uniform(&self, m: f64) -> Result<Self, TabularError> {
        self.double_columns(&vec![m; self.data.ncols()])
    }
}
