//! Mass-weighted Ward hierarchical clustering of points in factor space.
//!
//! Merge heights are the Ward variance criterion (the increase in
//! mass-weighted inertia caused by the merge), so the heights over a full
//! agglomeration sum to the cloud's total inertia, and the cophenetic
//! distances form an ultrametric.

use nalgebra::DMatrix;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ClusterError {
    #[error("need at least 2 points, got {0}")]
    DegenerateInput(usize),
    #[error("cannot cut {leaves} leaves into {k} clusters")]
    BadK { k: usize, leaves: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("{0}")]
    BadInput(String),
}

/// One agglomeration step. `a` and `b` are node ids: leaves are `0..P`,
/// the cluster created by merge `k` is `P + k`.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Merge {
    pub a: usize,
    pub b: usize,
    /// Ward merge cost (variance criterion), nondecreasing over the
    /// sequence.
    pub height: f64,
    /// Mass of the merged cluster.
    pub mass: f64,
}

/// A stepwise dendrogram over `P` labelled leaves.
#[derive(Clone, Debug)]
pub struct Dendrogram {
    n_leaves: usize,
    labels: Vec<String>,
    merges: Vec<Merge>,
}

/// Mass-weighted Ward agglomeration on Euclidean coordinates.
///
/// The cost of merging clusters `a` and `b` is
/// `m_a m_b / (m_a + m_b) * ||g_a - g_b||^2` on their centroids; after each
/// merge the remaining costs follow from the Lance-Williams recurrence. At
/// every step the cheapest pair merges; ties break deterministically toward
/// the pair containing the smallest leaf index. `axes` restricts the
/// distance to a subset of coordinate columns.
pub fn ward_cluster(
    coords: &DMatrix<f64>,
    masses: &[f64],
    axes: Option<&[usize]>,
    labels: Vec<String>,
) -> Result<Dendrogram, ClusterError> {
    let p = coords.nrows();
    if p < 2 {
        return Err(ClusterError::DegenerateInput(p));
    }
    if masses.len() != p {
        return Err(ClusterError::DimensionMismatch(format!(
            "{} masses for {p} points",
            masses.len()
        )));
    }
    if labels.len() != p {
        return Err(ClusterError::DimensionMismatch(format!(
            "{} labels for {p} points",
            labels.len()
        )));
    }
    if masses.iter().any(|&m| !(m > 0.0)) {
        return Err(ClusterError::BadInput("masses must be positive".into()));
    }
    let axes: Vec<usize> = match axes {
        Some(a) => {
            for &l in a {
                if l >= coords.ncols() {
                    return Err(ClusterError::BadInput(format!("axis {l} out of range")));
                }
            }
            a.to_vec()
        }
        None => (0..coords.ncols()).collect(),
    };

    #[derive(Clone, Copy)]
    struct Slot {
        node: usize,
        mass: f64,
        rep: usize, // smallest leaf index in the cluster, for tie-breaking
    }
    let mut slots: Vec<Option<Slot>> = (0..p)
        .map(|i| Some(Slot { node: i, mass: masses[i], rep: i }))
        .collect();

    // pairwise Ward costs, kept symmetric
    let mut cost = DMatrix::zeros(p, p);
    for i in 0..p {
        for j in i + 1..p {
            let d2: f64 = axes
                .iter()
                .map(|&l| {
                    let d = coords[(i, l)] - coords[(j, l)];
                    d * d
                })
                .sum();
            let c = masses[i] * masses[j] / (masses[i] + masses[j]) * d2;
            cost[(i, j)] = c;
            cost[(j, i)] = c;
        }
    }

    let mut merges = Vec::with_capacity(p - 1);
    for step in 0..p - 1 {
        let mut best: Option<(f64, usize, usize, usize, usize)> = None;
        for i in 0..p {
            let Some(si) = slots[i] else { continue };
            for j in i + 1..p {
                let Some(sj) = slots[j] else { continue };
                let key = (
                    cost[(i, j)],
                    si.rep.min(sj.rep),
                    si.rep.max(sj.rep),
                );
                let better = match &best {
                    None => true,
                    Some((c, lo, hi, _, _)) => key < (*c, *lo, *hi),
                };
                if better {
                    best = Some((key.0, key.1, key.2, i, j));
                }
            }
        }
        let (height, _, _, i, j) = best.expect("at least one active pair");
        let si = slots[i].unwrap();
        let sj = slots[j].unwrap();
        let merged_mass = si.mass + sj.mass;
        // put the cluster holding the smaller leaf first
        let (a, b) = if si.rep < sj.rep { (si.node, sj.node) } else { (sj.node, si.node) };
        merges.push(Merge { a, b, height, mass: merged_mass });

        for k in 0..p {
            if k == i || k == j {
                continue;
            }
            let Some(sk) = slots[k] else { continue };
            let updated = ((si.mass + sk.mass) * cost[(i, k)]
                + (sj.mass + sk.mass) * cost[(j, k)]
                - sk.mass * height)
                / (merged_mass + sk.mass);
            cost[(i, k)] = updated;
            cost[(k, i)] = updated;
        }
        slots[i] = Some(Slot {
            node: p + step,
            mass: merged_mass,
            rep: si.rep.min(sj.rep),
        });
        slots[j] = None;
    }

    Ok(Dendrogram { n_leaves: p, labels, merges })
}

impl Dendrogram {
    pub fn n_leaves(&self) -> usize {
        self.n_leaves
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn merges(&self) -> &[Merge] {
        &self.merges
    }

    /// Sum of merge costs; equals the cloud's mass-weighted inertia for a
    /// full-rank agglomeration.
    pub fn total_cost(&self) -> f64 {
        self.merges.iter().map(|m| m.height).sum()
    }

    /// Cophenetic (ultrametric) distance matrix: entry `(x, y)` is the
    /// height of the first merge uniting leaves `x` and `y`.
    pub fn cophenetic_matrix(&self) -> DMatrix<f64> {
        let p = self.n_leaves;
        let mut coph = DMatrix::zeros(p, p);
        let mut members: Vec<Vec<usize>> = Vec::with_capacity(self.merges.len());
        for merge in &self.merges {
            // each node merges exactly once, so its member list can be taken
            let left = if merge.a < p {
                vec![merge.a]
            } else {
                std::mem::take(&mut members[merge.a - p])
            };
            let right = if merge.b < p {
                vec![merge.b]
            } else {
                std::mem::take(&mut members[merge.b - p])
            };
            for &x in &left {
                for &y in &right {
                    coph[(x, y)] = merge.height;
                    coph[(y, x)] = merge.height;
                }
            }
            let mut set = left;
            set.extend(right);
            members.push(set);
        }
        coph
    }

    /// Height at which leaves `x` and `y` first join.
    pub fn cophenetic(&self, x: usize, y: usize) -> f64 {
        self.cophenetic_matrix()[(x, y)]
    }

    /// Partition into `k` clusters by removing the `k - 1` last (highest)
    /// merges. Returns one cluster id per leaf; ids are assigned in order of
    /// each cluster's smallest leaf.
    pub fn cut(&self, k: usize) -> Result<Vec<usize>, ClusterError> {
        let p = self.n_leaves;
        if k == 0 || k > p {
            return Err(ClusterError::BadK { k, leaves: p });
        }
        let mut parent: Vec<usize> = (0..2 * p - 1).collect();
        fn find(parent: &mut Vec<usize>, x: usize) -> usize {
            if parent[x] != x {
                let root = find(parent, parent[x]);
                parent[x] = root;
            }
            parent[x]
        }
        for (step, merge) in self.merges.iter().take(p - k).enumerate() {
            let ra = find(&mut parent, merge.a);
            let rb = find(&mut parent, merge.b);
            parent[ra] = p + step;
            parent[rb] = p + step;
        }
        let roots: Vec<usize> = (0..p).map(|leaf| find(&mut parent, leaf)).collect();
        let mut id_of_root = std::collections::HashMap::new();
        let mut assignment = vec![0usize; p];
        for leaf in 0..p {
            let next = id_of_root.len();
            let id = *id_of_root.entry(roots[leaf]).or_insert(next);
            assignment[leaf] = id;
        }
        Ok(assignment)
    }

    /// Renders the documented nested-list text format, e.g.
    /// `(merge height=0.5 mass=2 (leaf "a") (leaf "b"))`.
    pub fn to_text(&self) -> String {
        fn render(d: &Dendrogram, node: usize, indent: usize, out: &mut String) {
            let pad = "  ".repeat(indent);
            if node < d.n_leaves {
                out.push_str(&format!(
                    "{pad}(leaf \"{}\")",
                    d.labels[node].replace('"', "\\\"")
                ));
            } else {
                let merge = &d.merges[node - d.n_leaves];
                out.push_str(&format!(
                    "{pad}(merge height={} mass={}\n",
                    merge.height, merge.mass
                ));
                render(d, merge.a, indent + 1, out);
                out.push('\n');
                render(d, merge.b, indent + 1, out);
                out.push(')');
            }
        }
        let mut out = String::new();
        render(self, 2 * self.n_leaves - 2, 0, &mut out);
        out.push('\n');
        out
    }
}

/// Mass-weighted inertia of a cloud about its barycenter; the quantity Ward
/// merge costs decompose.
pub fn cloud_inertia(coords: &DMatrix<f64>, masses: &[f64]) -> f64 {
    let total: f64 = masses.iter().sum();
    let dim = coords.ncols();
    let mut center = vec![0.0; dim];
    for i in 0..coords.nrows() {
        for l in 0..dim {
            center[l] += masses[i] * coords[(i, l)];
        }
    }
    for c in &mut center {
        *c /= total;
    }
    let mut inertia = 0.0;
    for i in 0..coords.nrows() {
        for l in 0..dim {
            let d = coords[(i, l)] - center[l];
            inertia += masses[i] * d * d;
        }
    }
    inertia
}
