//! One-sided Jacobi SVD.
//!
//! Plane rotations orthogonalize the columns of the input; the rotations
//! accumulate into V, the column norms become the singular values and the
//! normalized columns the left vectors. The method is deterministic, needs
//! no pivoting heuristics and delivers high relative accuracy on the small
//! dense matrices CA works with (the squared singular values reproduce the
//! Frobenius norm to machine precision, which the inertia decomposition
//! depends on).

use nalgebra::DMatrix;

const MAX_SWEEPS: usize = 60;
const CONVERGENCE: f64 = 1e-15;

/// Thin SVD `A = U diag(sigma) V^T` with singular values sorted descending.
/// Returns `(u, sigma, v)` where `u` is `m x k`, `v` is `n x k`,
/// `k = min(m, n)`.
pub fn jacobi_svd(a: &DMatrix<f64>) -> (DMatrix<f64>, Vec<f64>, DMatrix<f64>) {
    if a.nrows() < a.ncols() {
        let (v, sigma, u) = jacobi_svd(&a.transpose());
        return (u, sigma, v);
    }
    let m = a.nrows();
    let n = a.ncols();
    let mut work = a.clone();
    let mut v = DMatrix::<f64>::identity(n, n);

    for _sweep in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n.saturating_sub(1) {
            for q in p + 1..n {
                let mut alpha = 0.0;
                let mut beta = 0.0;
                let mut gamma = 0.0;
                for i in 0..m {
                    let x = work[(i, p)];
                    let y = work[(i, q)];
                    alpha += x * x;
                    beta += y * y;
                    gamma += x * y;
                }
                if gamma == 0.0 || gamma.abs() <= CONVERGENCE * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for i in 0..m {
                    let x = work[(i, p)];
                    let y = work[(i, q)];
                    work[(i, p)] = c * x - s * y;
                    work[(i, q)] = s * x + c * y;
                }
                for i in 0..n {
                    let x = v[(i, p)];
                    let y = v[(i, q)];
                    v[(i, p)] = c * x - s * y;
                    v[(i, q)] = s * x + c * y;
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let mut sigma: Vec<f64> = (0..n).map(|j| work.column(j).norm()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| sigma[b].partial_cmp(&sigma[a]).unwrap().then(a.cmp(&b)));

    let mut u = DMatrix::zeros(m, n);
    let mut v_sorted = DMatrix::zeros(n, n);
    let mut sigma_sorted = Vec::with_capacity(n);
    for (slot, &j) in order.iter().enumerate() {
        let norm = sigma[j];
        sigma_sorted.push(norm);
        if norm > 0.0 {
            for i in 0..m {
                u[(i, slot)] = work[(i, j)] / norm;
            }
        }
        for i in 0..n {
            v_sorted[(i, slot)] = v[(i, j)];
        }
    }
    sigma.clear();
    (u, sigma_sorted, v_sorted)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn reconstruction_error(a: &DMatrix<f64>, u: &DMatrix<f64>, s: &[f64], v: &DMatrix<f64>) -> f64 {
        let k = s.len();
        let mut err: f64 = 0.0;
        for i in 0..a.nrows() {
            for j in 0..a.ncols() {
                let mut acc = 0.0;
                for l in 0..k {
                    acc += u[(i, l)] * s[l] * v[(j, l)];
                }
                err = err.max((acc - a[(i, j)]).abs());
            }
        }
        err
    }

    #[test]
    fn factors_random_matrices_to_machine_precision() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..30 {
            let m = rng.random_range(2..9);
            let n = rng.random_range(2..7);
            let a = DMatrix::from_fn(m, n, |_, _| rng.random::<f64>() * 2.0 - 1.0);
            let (u, s, v) = jacobi_svd(&a);
            assert!(reconstruction_error(&a, &u, &s, &v) < 1e-13);
            // orthonormal factors
            let utu = u.transpose() * &u;
            let vtv = v.transpose() * &v;
            for i in 0..s.len() {
                for j in 0..s.len() {
                    let id = if i == j { 1.0 } else { 0.0 };
                    assert!((utu[(i, j)] - id).abs() < 1e-13);
                    assert!((vtv[(i, j)] - id).abs() < 1e-13);
                }
            }
            // spectrum reproduces the Frobenius norm
            let fro2: f64 = a.iter().map(|x| x * x).sum();
            let s2: f64 = s.iter().map(|x| x * x).sum();
            assert_relative_eq!(fro2, s2, epsilon = 1e-13 * fro2.max(1.0));
            // descending order
            for w in s.windows(2) {
                assert!(w[0] >= w[1]);
            }
        }
    }

    #[test]
    fn handles_rank_deficiency() {
        // second column is a multiple of the first
        let a = DMatrix::from_row_slice(4, 2, &[1.0, 2.0, 2.0, 4.0, -1.0, -2.0, 0.5, 1.0]);
        let (u, s, v) = jacobi_svd(&a);
        assert!(s[1] < 1e-14 * s[0]);
        assert!(reconstruction_error(&a, &u, &s, &v) < 1e-13);
    }

    #[test]
    fn wide_matrices_transpose_correctly() {
        let a = DMatrix::from_row_slice(2, 4, &[1.0, 0.0, 2.0, -1.0, 3.0, 1.0, 0.0, 2.0]);
        let (u, s, v) = jacobi_svd(&a);
        assert_eq!(u.nrows(), 2);
        assert_eq!(v.nrows(), 4);
        assert_eq!(s.len(), 2);
        assert!(reconstruction_error(&a, &u, &s, &v) < 1e-13);
    }

    #[test]
    fn known_singular_values_of_a_diagonal_matrix() {
        let a = DMatrix::from_row_slice(3, 3, &[3.0, 0.0, 0.0, 0.0, 5.0, 0.0, 0.0, 0.0, 2.0]);
        let (_, s, _) = jacobi_svd(&a);
        assert_relative_eq!(s[0], 5.0, epsilon = 1e-14);
        assert_relative_eq!(s[1], 3.0, epsilon = 1e-14);
        assert_relative_eq!(s[2], 2.0, epsilon = 1e-14);
    }
}
