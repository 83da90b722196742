//! Small dense linear-algebra helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

pub type Mat = DMatrix<f64>;
pub type Vector = DVector<f64>;

/// Relative gap used to split sorted eigenvalues into clusters.
pub const CLUSTER_REL_GAP: f64 = 1e-7;

fn rank_threshold(sigma_max: f64, tol: f64) -> f64 {
    tol * sigma_max.max(1.0)
}

fn singular_values(a: &Mat) -> Vec<f64> {
    if a.ncols() > a.nrows() {
        a.transpose().singular_values().iter().copied().collect()
    } else {
        a.singular_values().iter().copied().collect()
    }
}

fn numerical_rank(a: &Mat, tol: f64) -> usize {
    if a.is_empty() {
        return 0;
    }
    let sv = singular_values(a);
    let sigma_max = sv.iter().cloned().fold(0.0, f64::max);
    let thr = rank_threshold(sigma_max, tol);
    sv.iter().filter(|s| **s > thr).count()
}

/// Gram-Schmidt with column pivoting, appending up to `count` new orthonormal
/// vectors to `q`. nalgebra's singular vectors drift when singular values
/// cluster, so bases are built this way and the SVD only decides the rank.
fn pivoted_gram_schmidt(q: &mut Vec<Vector>, cols: &Mat, count: usize) {
    let mut resid: Vec<Vector> = cols.column_iter().map(|c| c.into_owned()).collect();
    let project = |v: &mut Vector, q: &[Vector]| {
        for _ in 0..2 {
            for b in q {
                let p = b.dot(v);
                v.axpy(-p, b, 1.0);
            }
        }
    };
    for r in resid.iter_mut() {
        project(r, q);
    }
    for _ in 0..count {
        let Some((j, norm)) = resid
            .iter()
            .map(Vector::norm)
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(&b.1))
        else {
            return;
        };
        if norm == 0.0 {
            return;
        }
        let mut v = resid[j].clone() / norm;
        project(&mut v, q);
        let v = v.normalize();
        for r in resid.iter_mut() {
            let p = v.dot(r);
            r.axpy(-p, &v, 1.0);
        }
        q.push(v);
    }
}

/// Orthonormal (Euclidean) basis of `{x : a x = 0}` as columns.
pub fn null_space(a: &Mat, tol: f64) -> Mat {
    let n = a.ncols();
    if n == 0 {
        return Mat::zeros(0, 0);
    }
    let row_space = column_space(&a.transpose(), tol);
    let r = row_space.ncols();
    let mut q: Vec<Vector> = row_space.column_iter().map(|c| c.into_owned()).collect();
    pivoted_gram_schmidt(&mut q, &Mat::identity(n, n), n - r);
    from_columns(n, &q[r..])
}

/// Orthonormal (Euclidean) basis of the column span of `a`.
pub fn column_space(a: &Mat, tol: f64) -> Mat {
    let n = a.nrows();
    if a.ncols() == 0 || n == 0 {
        return Mat::zeros(n, 0);
    }
    let mut q = Vec::new();
    pivoted_gram_schmidt(&mut q, a, numerical_rank(a, tol));
    from_columns(n, &q)
}

pub fn rank(a: &Mat, tol: f64) -> usize {
    column_space(a, tol).ncols()
}

pub fn from_columns(nrows: usize, cols: &[Vector]) -> Mat {
    let mut m = Mat::zeros(nrows, cols.len());
    for (j, c) in cols.iter().enumerate() {
        m.set_column(j, c);
    }
    m
}

/// Canonical basis of the column span: the reduced row-echelon form of the
/// row space, returned as columns. Unique for a given subspace.
pub fn canonical_basis(cols: &Mat, tol: f64) -> Mat {
    let n = cols.nrows();
    let mut rows = cols.transpose();
    let k = rows.nrows();
    let scale = rows.amax().max(1.0);
    let mut pivot_row = 0;
    for col in 0..n {
        if pivot_row == k {
            break;
        }
        let (best, best_val) = (pivot_row..k)
            .map(|r| (r, rows[(r, col)].abs()))
            .fold((pivot_row, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if best_val <= tol * scale {
            continue;
        }
        rows.swap_rows(pivot_row, best);
        let p = rows[(pivot_row, col)];
        for c in 0..n {
            rows[(pivot_row, c)] /= p;
        }
        for r in 0..k {
            if r != pivot_row {
                let f = rows[(r, col)];
                if f != 0.0 {
                    for c in 0..n {
                        rows[(r, c)] -= f * rows[(pivot_row, c)];
                    }
                }
            }
        }
        pivot_row += 1;
    }
    // Clear rounding dust so axis-aligned subspaces come out exact.
    let mut out = rows.rows(0, pivot_row).transpose();
    out.iter_mut().for_each(|x| {
        if x.abs() <= 64.0 * f64::EPSILON {
            *x = 0.0;
        }
    });
    out
}

pub fn g_inner(gram: &Mat, x: &Vector, y: &Vector) -> f64 {
    (x.transpose() * gram * y)[(0, 0)]
}

/// Gram–Schmidt with respect to `gram`, in column order (two passes).
/// Columns that become numerically dependent are dropped.
pub fn g_orthonormalize(cols: &Mat, gram: &Mat, tol: f64) -> Mat {
    let mut out: Vec<Vector> = Vec::new();
    for j in 0..cols.ncols() {
        let mut v = cols.column(j).into_owned();
        let norm0 = g_inner(gram, &v, &v).max(0.0).sqrt();
        for _ in 0..2 {
            for q in &out {
                let p = g_inner(gram, q, &v);
                v -= q * p;
            }
        }
        let norm = g_inner(gram, &v, &v).max(0.0).sqrt();
        if norm > tol * norm0.max(1.0) {
            out.push(v / norm);
        }
    }
    from_columns(cols.nrows(), &out)
}

/// Row-major nested vectors, for serialization.
pub fn rows_of(m: &Mat) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

pub fn max_abs(m: &Mat) -> f64 {
    m.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

/// Cholesky factor `L` with `G = L Lᵀ`, or `None` when `G` is not SPD.
pub fn cholesky_lower(g: &Mat) -> Option<Mat> {
    if !is_symmetric(g, 1e-12 * max_abs(g).max(1.0)) {
        return None;
    }
    g.clone().cholesky().map(|c| c.l())
}

pub fn is_symmetric(m: &Mat, tol: f64) -> bool {
    m.is_square() && max_abs(&(m - m.transpose())) <= tol
}

/// Ascending eigenvalues and matching orthonormal eigenvectors (columns).
/// Each eigenvector's largest-magnitude entry (first on ties) is made positive.
pub fn sym_eigen_sorted(m: &Mat) -> (Vec<f64>, Mat) {
    let n = m.nrows();
    let sym = (m + m.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]).then(a.cmp(&b)));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vecs = Mat::zeros(n, n);
    for (j, &i) in order.iter().enumerate() {
        let mut v = eig.eigenvectors.column(i).into_owned();
        let amax = v.amax();
        if let Some(lead) = v.iter().position(|x| (x.abs() - amax).abs() <= 1e-12 * amax.max(1e-300)) {
            if v[lead] < 0.0 {
                v = -v;
            }
        }
        vecs.set_column(j, &v);
    }
    (values, vecs)
}

/// A run of numerically equal eigenvalues in a sorted spectrum.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct Cluster {
    pub value: f64,
    pub start: usize,
    pub len: usize,
}

/// Splits an ascending spectrum wherever consecutive values differ by more
/// than `rel · (1 + max |λ|)`.
pub fn cluster_eigenvalues(sorted: &[f64], rel: f64) -> Vec<Cluster> {
    let scale = 1.0 + sorted.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    let gap = rel * scale;
    let mut clusters: Vec<Cluster> = Vec::new();
    for (i, &v) in sorted.iter().enumerate() {
        match clusters.last_mut() {
            Some(c) if v - sorted[i - 1] <= gap => c.len += 1,
            _ => clusters.push(Cluster { value: v, start: i, len: 1 }),
        }
    }
    for c in &mut clusters {
        c.value = sorted[c.start..c.start + c.len].iter().sum::<f64>() / c.len as f64;
    }
    clusters
}
