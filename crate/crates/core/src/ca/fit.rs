use nalgebra::{DMatrix, DVector};

use crate::tabular::{ColumnRole, ContingencyTable, IndicatorMatrix};

use super::svd::jacobi_svd;
use super::{CaError, FactorModel, ModelKind, ORIGIN_TOL, RANK_TOL};

/// Dense SVD with the factors truncated to the numerically positive
/// spectrum.
fn sorted_svd(m: &DMatrix<f64>) -> (DMatrix<f64>, Vec<f64>, DMatrix<f64>) {
    let (u, sigma, v) = jacobi_svd(m);
    let max = sigma.first().copied().unwrap_or(0.0);
    let tol = RANK_TOL * max;
    let rank = sigma.iter().take_while(|&&s| s > tol).count();

    let us = DMatrix::from_fn(u.nrows(), rank, |i, l| u[(i, l)]);
    let vs = DMatrix::from_fn(v.nrows(), rank, |j, l| v[(j, l)]);
    (us, sigma[..rank].to_vec(), vs)
}

/// Orients each axis so the column point carrying the largest contribution
/// has a positive coordinate, ties broken by lowest column index.
fn orient_axes(row_coords: &mut DMatrix<f64>, col_coords: &mut DMatrix<f64>, col_masses: &DVector<f64>) {
    for axis in 0..col_coords.ncols() {
        let mut best = 0;
        let mut best_val = f64::NEG_INFINITY;
        for j in 0..col_coords.nrows() {
            let v = col_masses[j] * col_coords[(j, axis)] * col_coords[(j, axis)];
            if v > best_val {
                best_val = v;
                best = j;
            }
        }
        if col_coords[(best, axis)] < 0.0 {
            for i in 0..row_coords.nrows() {
                row_coords[(i, axis)] = -row_coords[(i, axis)];
            }
            for j in 0..col_coords.nrows() {
                col_coords[(j, axis)] = -col_coords[(j, axis)];
            }
        }
    }
}

fn contributions(
    masses: &DVector<f64>,
    coords: &DMatrix<f64>,
    eigenvalues: &[f64],
) -> DMatrix<f64> {
    DMatrix::from_fn(coords.nrows(), coords.ncols(), |i, l| {
        masses[i] * coords[(i, l)] * coords[(i, l)] / eigenvalues[l]
    })
}

fn cosines(coords: &DMatrix<f64>, dist2: &DVector<f64>) -> DMatrix<f64> {
    DMatrix::from_fn(coords.nrows(), coords.ncols(), |i, l| {
        if dist2[i] > ORIGIN_TOL {
            coords[(i, l)] * coords[(i, l)] / dist2[i]
        } else {
            0.0
        }
    })
}

/// Core CA computation on a main-block count matrix: correspondence matrix,
/// marginal masses, SVD of the standardized residuals, principal coordinates.
struct CaCore {
    p: DMatrix<f64>,
    row_masses: DVector<f64>,
    col_masses: DVector<f64>,
    eigenvalues: Vec<f64>,
    total_inertia: f64,
    row_coords: DMatrix<f64>,
    col_coords: DMatrix<f64>,
    n_axes: usize,
}

fn correspondence_core(main: &DMatrix<f64>, max_axes: Option<usize>) -> Result<CaCore, CaError> {
    let (nr, nc) = (main.nrows(), main.ncols());
    let grand: f64 = main.sum();
    if grand <= 0.0 {
        return Err(CaError::DegenerateTable("grand total is zero".into()));
    }
    let p = main / grand;
    let row_masses = DVector::from_fn(nr, |i, _| p.row(i).sum());
    let col_masses = DVector::from_fn(nc, |j, _| p.column(j).sum());
    for i in 0..nr {
        if row_masses[i] <= 0.0 {
            return Err(CaError::DegenerateTable(format!("row {i} has zero mass")));
        }
    }
    for j in 0..nc {
        if col_masses[j] <= 0.0 {
            return Err(CaError::DegenerateTable(format!("column {j} has zero mass")));
        }
    }

    // standardized residuals; the centering term removes the trivial axis
    let s = DMatrix::from_fn(nr, nc, |i, j| {
        (p[(i, j)] - row_masses[i] * col_masses[j]) / (row_masses[i] * col_masses[j]).sqrt()
    });
    let total_inertia = s.iter().map(|x| x * x).sum();

    let (u, sigma, v) = sorted_svd(&s);
    let rank = sigma.len();
    let eigenvalues: Vec<f64> = sigma.iter().map(|s| s * s).collect();

    let default_axes = nr.min(nc).saturating_sub(1);
    let n_axes = max_axes.unwrap_or(default_axes).min(rank);

    let mut row_coords = DMatrix::from_fn(nr, n_axes, |i, l| {
        u[(i, l)] * sigma[l] / row_masses[i].sqrt()
    });
    let mut col_coords = DMatrix::from_fn(nc, n_axes, |j, l| {
        v[(j, l)] * sigma[l] / col_masses[j].sqrt()
    });
    orient_axes(&mut row_coords, &mut col_coords, &col_masses);

    Ok(CaCore {
        p,
        row_masses,
        col_masses,
        eigenvalues,
        total_inertia,
        row_coords,
        col_coords,
        n_axes,
    })
}

/// Squared chi-squared distance of each row profile to the average profile.
fn profile_dist2(p: &DMatrix<f64>, row_masses: &DVector<f64>, col_masses: &DVector<f64>) -> DVector<f64> {
    DVector::from_fn(p.nrows(), |i, _| {
        let mut d2 = 0.0;
        for j in 0..p.ncols() {
            let diff = p[(i, j)] / row_masses[i] - col_masses[j];
            d2 += diff * diff / col_masses[j];
        }
        d2
    })
}

fn assemble(
    kind: ModelKind,
    core: CaCore,
    row_labels: Vec<String>,
    col_labels: Vec<String>,
) -> FactorModel {
    let retained: Vec<f64> = core.eigenvalues[..core.n_axes].to_vec();
    let row_dist2 = profile_dist2(&core.p, &core.row_masses, &core.col_masses);
    let col_dist2 = profile_dist2(&core.p.transpose(), &core.col_masses, &core.row_masses);
    let row_contrib = contributions(&core.row_masses, &core.row_coords, &retained);
    let col_contrib = contributions(&core.col_masses, &core.col_coords, &retained);
    let row_cos2 = cosines(&core.row_coords, &row_dist2);
    let col_cos2 = cosines(&core.col_coords, &col_dist2);
    FactorModel {
        kind,
        row_labels,
        col_labels,
        row_masses: core.row_masses,
        col_masses: core.col_masses,
        eigenvalues: core.eigenvalues,
        total_inertia: core.total_inertia,
        row_coords: core.row_coords,
        col_coords: core.col_coords,
        row_contrib,
        col_contrib,
        row_cos2,
        col_cos2,
        row_dist2,
        col_dist2,
        correspondence: core.p,
        supplementary: Vec::new(),
        n_axes: core.n_axes,
    }
}

/// Correspondence analysis of a contingency table under the chi-squared
/// metric.
///
/// Main rows and columns build the axes; supplementary rows and columns are
/// projected through the transition formulas and attached to the model.
/// `max_axes` limits the retained coordinate axes (default: full rank).
/// A table of exact independence yields a model with no positive eigenvalue.
pub fn fit_ca(table: &ContingencyTable, max_axes: Option<usize>) -> Result<FactorModel, CaError> {
    let main_rows = table.main_rows();
    let main_cols = table.main_cols();
    let counts = table.counts();
    let main = DMatrix::from_fn(main_rows.len(), main_cols.len(), |i, j| {
        counts[(main_rows[i], main_cols[j])]
    });
    for i in 0..main.nrows() {
        if main.row(i).sum() <= 0.0 {
            return Err(CaError::DegenerateTable(format!(
                "main row {:?} is all zero",
                table.row_labels()[main_rows[i]]
            )));
        }
    }
    for j in 0..main.ncols() {
        if main.column(j).sum() <= 0.0 {
            return Err(CaError::DegenerateTable(format!(
                "main column {:?} is all zero",
                table.col_labels()[main_cols[j]]
            )));
        }
    }

    let row_labels: Vec<String> = main_rows.iter().map(|&i| table.row_labels()[i].clone()).collect();
    let col_labels: Vec<String> = main_cols.iter().map(|&j| table.col_labels()[j].clone()).collect();
    let core = correspondence_core(&main, max_axes)?;
    let mut model = assemble(ModelKind::Ca, core, row_labels, col_labels);

    let mut supplementary = Vec::new();
    for (i, role) in table.row_roles().iter().enumerate() {
        if *role == ColumnRole::Supplementary {
            let counts_row: Vec<f64> = main_cols.iter().map(|&j| counts[(i, j)]).collect();
            supplementary.push(model.project_supplementary_row(
                &table.row_labels()[i],
                &counts_row,
            )?);
        }
    }
    for (j, role) in table.col_roles().iter().enumerate() {
        if *role == ColumnRole::Supplementary {
            let counts_col: Vec<f64> = main_rows.iter().map(|&i| counts[(i, j)]).collect();
            supplementary.push(model.project_supplementary_col(
                &table.col_labels()[j],
                &counts_col,
            )?);
        }
    }
    model.supplementary = supplementary;
    Ok(model)
}

/// Multiple correspondence analysis: CA of the main column block of an
/// indicator matrix.
///
/// Every individual must answer at least one active question (rows of the
/// main block may not be all zero) and every main column must have a
/// positive total. Supplementary columns (schema role or demoted) are
/// projected and attached. With complete data the row masses are constant
/// and the total inertia is `J_main/Q - 1`.
pub fn fit_mca(ind: &IndicatorMatrix, max_axes: Option<usize>) -> Result<FactorModel, CaError> {
    let main_cols = ind.main_columns();
    if main_cols.is_empty() {
        return Err(CaError::EmptyActiveBlock);
    }
    let q_active = ind.q_active();
    if ind.n() < 2 {
        return Err(CaError::TooFewRows(ind.n()));
    }
    let data = ind.data();
    let main = DMatrix::from_fn(ind.n(), main_cols.len(), |i, j| data[(i, main_cols[j])]);
    for i in 0..main.nrows() {
        if main.row(i).sum() <= 0.0 {
            return Err(CaError::UnansweredIndividual(ind.row_ids()[i].clone()));
        }
    }
    for j in 0..main.ncols() {
        if main.column(j).sum() <= 0.0 {
            return Err(CaError::DegenerateTable(format!(
                "main modality column {:?} has zero total",
                ind.columns()[main_cols[j]].label()
            )));
        }
    }

    let row_labels = ind.row_ids().to_vec();
    let col_labels: Vec<String> = main_cols.iter().map(|&j| ind.columns()[j].label()).collect();
    let core = correspondence_core(&main, max_axes)?;
    let mut model = assemble(ModelKind::Mca { q_active }, core, row_labels, col_labels);

    let mut supplementary = Vec::new();
    for (j, info) in ind.columns().iter().enumerate() {
        if info.role == ColumnRole::Supplementary {
            let counts_col: Vec<f64> = (0..ind.n()).map(|i| data[(i, j)]).collect();
            if counts_col.iter().sum::<f64>() <= 0.0 {
                // a modality nobody chose has no profile to project
                continue;
            }
            supplementary.push(model.project_supplementary_col(&info.label(), &counts_col)?);
        }
    }
    model.supplementary = supplementary;
    Ok(model)
}

/// PCA of standardized variables: columns are centered and scaled to unit
/// (population) standard deviation, and the correlation structure is
/// eigendecomposed.
///
/// Row points get uniform masses `1/I`; eigenvalues are those of the
/// correlation matrix and sum to the number of variables. Column coordinates
/// are scaled so the factor-model identities (contributions and axis
/// inertias) hold with uniform column masses `1/K`.
pub fn fit_pca_standardized(
    data: &DMatrix<f64>,
    row_labels: Vec<String>,
    col_labels: Vec<String>,
    max_axes: Option<usize>,
) -> Result<FactorModel, CaError> {
    let (n, k) = (data.nrows(), data.ncols());
    if n < 2 {
        return Err(CaError::TooFewRows(n));
    }
    if row_labels.len() != n || col_labels.len() != k {
        return Err(CaError::DimensionMismatch(format!(
            "{n}x{k} data with {} row / {} col labels",
            row_labels.len(),
            col_labels.len()
        )));
    }

    let mut means = Vec::with_capacity(k);
    let mut sdevs = Vec::with_capacity(k);
    for j in 0..k {
        let mean = data.column(j).sum() / n as f64;
        let var = data.column(j).iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n as f64;
        if var <= 0.0 {
            return Err(CaError::ConstantColumn(j));
        }
        means.push(mean);
        sdevs.push(var.sqrt());
    }
    let z = DMatrix::from_fn(n, k, |i, j| (data[(i, j)] - means[j]) / sdevs[j]);
    let corr = z.transpose() * &z / n as f64;
    let total_inertia = corr.diagonal().sum();

    let eig = nalgebra::SymmetricEigen::new(corr.clone());
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b].partial_cmp(&eig.eigenvalues[a]).unwrap().then(a.cmp(&b))
    });
    let max = eig.eigenvalues[order[0]];
    let kept: Vec<usize> = order.into_iter().filter(|&l| eig.eigenvalues[l] > RANK_TOL * max).collect();
    let eigenvalues: Vec<f64> = kept.iter().map(|&l| eig.eigenvalues[l]).collect();
    let rank = kept.len();
    let n_axes = max_axes.unwrap_or(rank).min(rank);

    let basis = DMatrix::from_fn(k, n_axes, |j, l| eig.eigenvectors[(j, kept[l])]);
    let mut row_coords = &z * &basis;
    let sqrt_k = (k as f64).sqrt();
    let mut col_coords = DMatrix::from_fn(k, n_axes, |j, l| {
        sqrt_k * basis[(j, l)] * eigenvalues[l].sqrt()
    });
    let col_masses = DVector::from_element(k, 1.0 / k as f64);
    orient_axes(&mut row_coords, &mut col_coords, &col_masses);

    let row_masses = DVector::from_element(n, 1.0 / n as f64);
    let row_dist2 = DVector::from_fn(n, |i, _| z.row(i).norm_squared());
    // spectral identity: the full squared loading of a variable is K * R_jj
    let col_dist2 = DVector::from_fn(k, |j, _| k as f64 * corr[(j, j)]);

    let retained: Vec<f64> = eigenvalues[..n_axes].to_vec();
    let row_contrib = contributions(&row_masses, &row_coords, &retained);
    let col_contrib = contributions(&col_masses, &col_coords, &retained);
    let row_cos2 = cosines(&row_coords, &row_dist2);
    let col_cos2 = cosines(&col_coords, &col_dist2);

    Ok(FactorModel {
        kind: ModelKind::Pca { means, sdevs },
        row_labels,
        col_labels,
        row_masses,
        col_masses,
        eigenvalues,
        total_inertia,
        row_coords,
        col_coords,
        row_contrib,
        col_contrib,
        row_cos2,
        col_cos2,
        row_dist2,
        col_dist2,
        correspondence: z,
        supplementary: Vec::new(),
        n_axes,
    })
}
