//! Permutation-based typicality test of a subcloud against a reference
//! cloud. The test statistic is the Mahalanobis norm of the deviation of the
//! subcloud mean point from the reference mean, in the metric of the
//! reference cloud's mass-weighted covariance.

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::ca::FactorModel;

#[derive(Debug, Error)]
pub enum InferenceError {
    #[error("reference covariance is singular on the retained axes")]
    SingularCovariance,
    #[error("subcloud of size {m} too large for reference of size {n}")]
    SubcloudTooLarge { m: usize, n: usize },
    #[error("subcloud is empty")]
    EmptySubcloud,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("{0}")]
    BadInput(String),
}

/// A weighted point cloud: `I x L` coordinates with one positive mass per
/// point.
#[derive(Clone, Debug)]
pub struct Cloud {
    coords: DMatrix<f64>,
    masses: DVector<f64>,
}

impl Cloud {
    pub fn new(coords: DMatrix<f64>, masses: Vec<f64>) -> Result<Self, InferenceError> {
        if masses.len() != coords.nrows() {
            return Err(InferenceError::DimensionMismatch(format!(
                "{} masses for {} points",
                masses.len(),
                coords.nrows()
            )));
        }
        if coords.nrows() == 0 {
            return Err(InferenceError::BadInput("empty cloud".into()));
        }
        if masses.iter().any(|&m| !(m > 0.0)) {
            return Err(InferenceError::BadInput("masses must be positive".into()));
        }
        Ok(Self { coords, masses: DVector::from_vec(masses) })
    }

    /// Row cloud of a fitted model on the given axes (defaults to all
    /// retained axes with eigenvalue above 1e-10).
    pub fn from_model_rows(model: &FactorModel, axes: Option<&[usize]>) -> Result<Self, InferenceError> {
        let default: Vec<usize> = (0..model.n_axes())
            .filter(|&l| model.eigenvalues()[l] > 1e-10)
            .collect();
        let axes: Vec<usize> = match axes {
            Some(a) => a.to_vec(),
            None => default,
        };
        for &l in &axes {
            if l >= model.n_axes() {
                return Err(InferenceError::BadInput(format!("axis {l} not in model")));
            }
        }
        let coords = DMatrix::from_fn(model.n_rows(), axes.len(), |i, k| {
            model.row_coords()[(i, axes[k])]
        });
        Cloud::new(coords, model.row_masses().iter().copied().collect())
    }

    pub fn len(&self) -> usize {
        self.coords.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.nrows() == 0
    }

    pub fn dim(&self) -> usize {
        self.coords.ncols()
    }

    pub fn coords(&self) -> &DMatrix<f64> {
        &self.coords
    }

    /// Mass-weighted mean point.
    pub fn mean(&self) -> DVector<f64> {
        let total: f64 = self.masses.sum();
        let mut mean = DVector::zeros(self.dim());
        for i in 0..self.len() {
            for l in 0..self.dim() {
                mean[l] += self.masses[i] * self.coords[(i, l)];
            }
        }
        mean / total
    }

    /// Mass-weighted covariance about the mean.
    pub fn covariance(&self) -> DMatrix<f64> {
        let total: f64 = self.masses.sum();
        let mean = self.mean();
        let mut cov = DMatrix::zeros(self.dim(), self.dim());
        for i in 0..self.len() {
            let w = self.masses[i] / total;
            for a in 0..self.dim() {
                let da = self.coords[(i, a)] - mean[a];
                for b in 0..self.dim() {
                    cov[(a, b)] += w * da * (self.coords[(i, b)] - mean[b]);
                }
            }
        }
        cov
    }
}

/// Points tested against a reference cloud: either a subset of the
/// reference's own rows or external points of the same dimension.
#[derive(Clone, Debug)]
pub enum Subcloud {
    Members(Vec<usize>),
    External(DMatrix<f64>),
}

impl Subcloud {
    fn size(&self) -> usize {
        match self {
            Subcloud::Members(m) => m.len(),
            Subcloud::External(x) => x.nrows(),
        }
    }

    /// Unweighted mean of the subcloud points.
    fn mean(&self, reference: &Cloud) -> Result<DVector<f64>, InferenceError> {
        let dim = reference.dim();
        let mut mean = DVector::zeros(dim);
        match self {
            Subcloud::Members(members) => {
                if members.is_empty() {
                    return Err(InferenceError::EmptySubcloud);
                }
                for &i in members {
                    if i >= reference.len() {
                        return Err(InferenceError::BadInput(format!(
                            "member index {i} out of range"
                        )));
                    }
                    for l in 0..dim {
                        mean[l] += reference.coords()[(i, l)];
                    }
                }
                Ok(mean / members.len() as f64)
            }
            Subcloud::External(points) => {
                if points.nrows() == 0 {
                    return Err(InferenceError::EmptySubcloud);
                }
                if points.ncols() != dim {
                    return Err(InferenceError::DimensionMismatch(format!(
                        "external points have dim {}, reference {dim}",
                        points.ncols()
                    )));
                }
                for i in 0..points.nrows() {
                    for l in 0..dim {
                        mean[l] += points[(i, l)];
                    }
                }
                Ok(mean / points.nrows() as f64)
            }
        }
    }
}

/// Fixed reference geometry: mean and inverted covariance, shared by the
/// observed statistic and every permutation draw.
struct ReferenceMetric {
    mean: DVector<f64>,
    inv_cov: DMatrix<f64>,
}

impl ReferenceMetric {
    fn build(reference: &Cloud) -> Result<Self, InferenceError> {
        let cov = reference.covariance();
        let inv_cov = cov
            .cholesky()
            .ok_or(InferenceError::SingularCovariance)?
            .inverse();
        Ok(Self { mean: reference.mean(), inv_cov })
    }

    fn statistic(&self, subcloud_mean: &DVector<f64>) -> f64 {
        let d = subcloud_mean - &self.mean;
        (d.transpose() * &self.inv_cov * &d)[(0, 0)]
    }
}

/// Mahalanobis statistic `D^2` of a subcloud against a reference cloud:
/// the squared deviation of the subcloud mean from the reference mean in
/// the inverse-covariance metric of the reference.
pub fn mahalanobis_statistic(reference: &Cloud, subcloud: &Subcloud) -> Result<f64, InferenceError> {
    let metric = ReferenceMetric::build(reference)?;
    Ok(metric.statistic(&subcloud.mean(reference)?))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestMode {
    Exhaustive,
    MonteCarlo,
}

/// Outcome of [`typicality_test`].
#[derive(Clone, Debug, serde::Serialize, serde::Deserialize)]
pub struct TypicalityResult {
    pub observed_statistic: f64,
    pub permutation_count: usize,
    pub p_value: f64,
    pub mode: TestMode,
    pub seed: u64,
}

/// Advances `members` to the next size-`m` combination of `0..n` in
/// lexicographic order; false once the last combination has been visited.
fn next_combination(members: &mut [usize], n: usize) -> bool {
    let m = members.len();
    let mut i = m;
    while i > 0 {
        i -= 1;
        if members[i] < i + n - m {
            members[i] += 1;
            for k in i + 1..m {
                members[k] = members[k - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Number of `m`-subsets of `n` items, saturating.
fn binomial_saturating(n: usize, m: usize) -> usize {
    let m = m.min(n - m);
    let mut result: u128 = 1;
    for i in 0..m {
        result = result.saturating_mul((n - i) as u128) / (i + 1) as u128;
        if result > usize::MAX as u128 {
            return usize::MAX;
        }
    }
    result as usize
}

/// Permutation typicality test of a subcloud with respect to a reference
/// cloud.
///
/// The null distribution re-draws size-`m` subsets of the reference cloud
/// uniformly without replacement, holding the reference covariance fixed.
/// Internal subclouds whose subset count does not exceed `n_perm` are
/// enumerated exhaustively (exact proportion); otherwise `n_perm` Monte
/// Carlo draws are taken and the add-one estimator
/// `p = (1 + #{draws >= observed}) / (1 + n_perm)` keeps p-values positive.
/// Each draw uses its own substream of the seeded generator, so the result
/// is reproducible bit-for-bit and independent of evaluation order.
pub fn typicality_test(
    reference: &Cloud,
    subcloud: &Subcloud,
    n_perm: usize,
    seed: u64,
) -> Result<TypicalityResult, InferenceError> {
    if n_perm == 0 {
        return Err(InferenceError::BadInput("n_perm must be at least 1".into()));
    }
    let n = reference.len();
    let m = subcloud.size();
    if m == 0 {
        return Err(InferenceError::EmptySubcloud);
    }
    if m > n {
        return Err(InferenceError::SubcloudTooLarge { m, n });
    }
    let metric = ReferenceMetric::build(reference)?;
    let observed = metric.statistic(&subcloud.mean(reference)?);

    let subset_statistic = |members: &[usize]| -> f64 {
        let dim = reference.dim();
        let mut mean = DVector::zeros(dim);
        for &i in members {
            for l in 0..dim {
                mean[l] += reference.coords()[(i, l)];
            }
        }
        mean /= members.len() as f64;
        metric.statistic(&mean)
    };

    let internal = matches!(subcloud, Subcloud::Members(_));
    let total_subsets = binomial_saturating(n, m);
    if internal && total_subsets <= n_perm {
        // exhaustive: every subset, exact proportion (the observed subset is
        // among them, so p stays positive)
        let mut at_or_above = 0usize;
        let mut members: Vec<usize> = (0..m).collect();
        loop {
            if subset_statistic(&members) >= observed {
                at_or_above += 1;
            }
            if !next_combination(&mut members, n) {
                break;
            }
        }
        return Ok(TypicalityResult {
            observed_statistic: observed,
            permutation_count: total_subsets,
            p_value: at_or_above as f64 / total_subsets as f64,
            mode: TestMode::Exhaustive,
            seed,
        });
    }

    let mut at_or_above = 0usize;
    for draw in 0..n_perm {
        // per-draw substream, so draws are independent of evaluation order
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(draw as u64 + 1);
        let mut indices: Vec<usize> = (0..n).collect();
        let (subset, _) = indices.partial_shuffle(&mut rng, m);
        if subset_statistic(subset) >= observed {
            at_or_above += 1;
        }
    }
    Ok(TypicalityResult {
        observed_statistic: observed,
        permutation_count: n_perm,
        p_value: (1 + at_or_above) as f64 / (1 + n_perm) as f64,
        mode: TestMode::MonteCarlo,
        seed,
    })
}
