//! Shared test oracles, independent of the library's fitting route.
//!
//! The CA oracle eigendecomposes the uncentered row-profile operator
//! `D_r^{-1/2} P D_c^{-1} P^T D_r^{-1/2}`, removes the known trivial
//! eigenpair (eigenvalue 1, eigenvector sqrt(r)) by deflation, and derives
//! column coordinates through the transition formula. The library instead
//! SVDs the centered standardized residual matrix, so agreement checks the
//! algebra, not the code path.

#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct CaOracle {
    pub row_masses: DVector<f64>,
    pub col_masses: DVector<f64>,
    pub eigenvalues: Vec<f64>,
    pub total_inertia: f64,
    pub row_coords: DMatrix<f64>,
    pub col_coords: DMatrix<f64>,
    /// Squared chi2 distance of each row profile to the average profile,
    /// computed from profiles (not from coordinates).
    pub row_dist2: Vec<f64>,
    /// Contributions straight from the squared eigenvector entries of the
    /// row-side operator (algebraically mass * coord^2 / eigenvalue, but
    /// free of the 1/lambda amplification).
    pub row_contrib: DMatrix<f64>,
    /// Same from the column-side operator's eigenvectors.
    pub col_contrib: DMatrix<f64>,
}

/// Eigenvalues at or below this are unresolvable by the absolute-precision
/// eigendecomposition route and are treated as zero when comparing ranks.
pub const ORACLE_EIGEN_TOL: f64 = 1e-9;

pub fn ca_oracle(counts: &DMatrix<f64>) -> CaOracle {
    let grand = counts.sum();
    let p = counts / grand;
    let nr = p.nrows();
    let nc = p.ncols();
    let r = DVector::from_fn(nr, |i, _| p.row(i).sum());
    let c = DVector::from_fn(nc, |j, _| p.column(j).sum());

    // M0 = D_r^{-1/2} P D_c^{-1} P^T D_r^{-1/2}
    let mut m0 = DMatrix::zeros(nr, nr);
    for a in 0..nr {
        for b in 0..nr {
            let mut acc = 0.0;
            for j in 0..nc {
                acc += p[(a, j)] * p[(b, j)] / c[j];
            }
            m0[(a, b)] = acc / (r[a] * r[b]).sqrt();
        }
    }
    // deflate the trivial eigenpair (1, sqrt(r)); sqrt(r) is already unit
    let v0 = DVector::from_fn(nr, |i, _| r[i].sqrt());
    let m = &m0 - &v0 * v0.transpose();

    let eig = nalgebra::SymmetricEigen::new(m);
    let mut order: Vec<usize> = (0..nr).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].partial_cmp(&eig.eigenvalues[a]).unwrap());
    let kept: Vec<usize> = order
        .into_iter()
        .filter(|&k| eig.eigenvalues[k] > ORACLE_EIGEN_TOL)
        .collect();

    let eigenvalues: Vec<f64> = kept.iter().map(|&k| eig.eigenvalues[k]).collect();
    let row_coords = DMatrix::from_fn(nr, kept.len(), |i, l| {
        eig.eigenvectors[(i, kept[l])] * eigenvalues[l].sqrt() / r[i].sqrt()
    });
    // transition: g_jl = (1/sqrt(lambda_l)) sum_i (p_ij / c_j) f_il
    let col_coords = DMatrix::from_fn(nc, kept.len(), |j, l| {
        (0..nr).map(|i| p[(i, j)] / c[j] * row_coords[(i, l)]).sum::<f64>()
            / eigenvalues[l].sqrt()
    });
    let row_contrib = DMatrix::from_fn(nr, kept.len(), |i, l| {
        eig.eigenvectors[(i, kept[l])].powi(2)
    });

    // column-side operator for the column contributions
    let mut n0 = DMatrix::zeros(nc, nc);
    for a in 0..nc {
        for b in 0..nc {
            let mut acc = 0.0;
            for i in 0..nr {
                acc += p[(i, a)] * p[(i, b)] / r[i];
            }
            n0[(a, b)] = acc / (c[a] * c[b]).sqrt();
        }
    }
    let w0 = DVector::from_fn(nc, |j, _| c[j].sqrt());
    let n_deflated = &n0 - &w0 * w0.transpose();
    let eig_c = nalgebra::SymmetricEigen::new(n_deflated);
    let mut order_c: Vec<usize> = (0..nc).collect();
    order_c.sort_by(|&a, &b| eig_c.eigenvalues[b].partial_cmp(&eig_c.eigenvalues[a]).unwrap());
    let kept_c: Vec<usize> = order_c
        .into_iter()
        .filter(|&k| eig_c.eigenvalues[k] > ORACLE_EIGEN_TOL)
        .collect();
    assert_eq!(kept.len(), kept_c.len(), "row and column spectra disagree");
    let col_contrib = DMatrix::from_fn(nc, kept_c.len(), |j, l| {
        eig_c.eigenvectors[(j, kept_c[l])].powi(2)
    });

    // total inertia: mass-weighted squared chi2 distance of row profiles to
    // the average profile
    let mut total_inertia = 0.0;
    let mut row_dist2 = vec![0.0; nr];
    for i in 0..nr {
        for j in 0..nc {
            let diff = p[(i, j)] / r[i] - c[j];
            row_dist2[i] += diff * diff / c[j];
        }
        total_inertia += r[i] * row_dist2[i];
    }

    CaOracle {
        row_masses: r,
        col_masses: c,
        eigenvalues,
        total_inertia,
        row_coords,
        col_coords,
        row_dist2,
        row_contrib,
        col_contrib,
    }
}

/// Random contingency table with integer entries in `0..=max_entry` and no
/// all-zero row or column.
pub fn random_table(rng: &mut ChaCha8Rng, nrows: usize, ncols: usize, max_entry: u32) -> DMatrix<f64> {
    loop {
        let m = DMatrix::from_fn(nrows, ncols, |_, _| {
            rng.random_range(0..=max_entry) as f64
        });
        let rows_ok = (0..nrows).all(|i| m.row(i).sum() > 0.0);
        let cols_ok = (0..ncols).all(|j| m.column(j).sum() > 0.0);
        if rows_ok && cols_ok {
            return m;
        }
    }
}

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Largest absolute difference between two coordinate matrices allowing an
/// independent sign per axis; panics on shape mismatch.
pub fn coord_error_up_to_sign(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    assert_eq!(a.nrows(), b.nrows(), "row count");
    assert_eq!(a.ncols(), b.ncols(), "axis count");
    let mut worst: f64 = 0.0;
    for l in 0..a.ncols() {
        let dot: f64 = (0..a.nrows()).map(|i| a[(i, l)] * b[(i, l)]).sum();
        let sign = if dot >= 0.0 { 1.0 } else { -1.0 };
        for i in 0..a.nrows() {
            worst = worst.max((a[(i, l)] - sign * b[(i, l)]).abs());
        }
    }
    worst
}

/// Per-axis sign that aligns the first `axes` columns of `b` with `a` (by
/// coordinate correlation).
pub fn axis_signs(a: &DMatrix<f64>, b: &DMatrix<f64>, axes: usize) -> Vec<f64> {
    (0..axes)
        .map(|l| {
            let dot: f64 = (0..a.nrows()).map(|i| a[(i, l)] * b[(i, l)]).sum();
            if dot >= 0.0 {
                1.0
            } else {
                -1.0
            }
        })
        .collect()
}
