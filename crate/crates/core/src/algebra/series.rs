use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{column_space, from_columns, null_space, Mat, Vector};

use super::metric::MetricLieAlgebra;
use super::subspace::Subspace;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SeriesKind {
    Derived,
    LowerCentral,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "class")]
pub enum SeriesVerdict {
    Nilpotent { step: usize },
    Solvable { length: usize },
    Neither,
}

#[derive(Debug, Clone, Serialize)]
pub struct SeriesReport {
    pub kind: SeriesKind,
    pub terms: Vec<Subspace>,
    pub verdict: SeriesVerdict,
}

impl SeriesReport {
    pub fn dims(&self) -> Vec<usize> {
        self.terms.iter().map(Subspace::dim).collect()
    }
}

/// `span{[u, v] : u ∈ U, v ∈ V}`.
pub fn bracket_span(l: &MetricLieAlgebra, u: &Subspace, v: &Subspace, tol: f64) -> Subspace {
    let n = l.dim();
    let mut cols = Vec::new();
    for a in u.vectors() {
        for b in v.vectors() {
            cols.push(l.bracket(&a, &b));
        }
    }
    if cols.is_empty() {
        return Subspace::zero(n);
    }
    Subspace::span(&from_columns(n, &cols), tol)
}

fn run(l: &MetricLieAlgebra, kind: SeriesKind, tol: f64) -> (Vec<Subspace>, bool) {
    let n = l.dim();
    let full = Subspace::full(n);
    let mut terms = vec![full.clone()];
    loop {
        let last = terms.last().unwrap();
        if last.is_zero() {
            return (terms, true);
        }
        let next = match kind {
            SeriesKind::Derived => bracket_span(l, last, last, tol),
            SeriesKind::LowerCentral => bracket_span(l, &full, last, tol),
        };
        if next.dim() >= last.dim() {
            return (terms, false);
        }
        terms.push(next);
    }
}

/// Derived or lower-central series, stopped at zero or at the first
/// repeated dimension. The verdict is the strongest class that applies.
pub fn series(l: &MetricLieAlgebra, kind: SeriesKind, tol: f64) -> SeriesReport {
    let (terms, reached_zero) = run(l, kind, tol);
    let verdict = match (kind, reached_zero) {
        (SeriesKind::LowerCentral, true) => SeriesVerdict::Nilpotent { step: terms.len() - 1 },
        _ => verdict_for(l, tol),
    };
    SeriesReport { kind, terms, verdict }
}

fn verdict_for(l: &MetricLieAlgebra, tol: f64) -> SeriesVerdict {
    let (lc, nil) = run(l, SeriesKind::LowerCentral, tol);
    if nil {
        return SeriesVerdict::Nilpotent { step: lc.len() - 1 };
    }
    let (d, sol) = run(l, SeriesKind::Derived, tol);
    if sol {
        SeriesVerdict::Solvable { length: d.len() - 1 }
    } else {
        SeriesVerdict::Neither
    }
}

pub fn is_nilpotent(l: &MetricLieAlgebra, tol: f64) -> bool {
    run(l, SeriesKind::LowerCentral, tol).1
}

pub fn is_solvable(l: &MetricLieAlgebra, tol: f64) -> bool {
    run(l, SeriesKind::Derived, tol).1
}

/// `[𝔤, 𝔤]`.
pub fn derived_algebra(l: &MetricLieAlgebra, tol: f64) -> Subspace {
    let full = Subspace::full(l.dim());
    bracket_span(l, &full, &full, tol)
}

fn vec_of(m: &Mat) -> Vector {
    Vector::from_iterator(m.len(), m.iter().copied())
}

/// `{x : ad_x = 0}`.
pub fn center(l: &MetricLieAlgebra, tol: f64) -> Subspace {
    let n = l.dim();
    let cols: Vec<Vector> = (0..n).map(|i| vec_of(&l.ad_basis(i))).collect();
    Subspace::span(&null_space(&from_columns(n * n, &cols), tol), tol)
}

/// `{x : [x, 𝔤] ⊆ 𝔷(𝔤)}`.
pub fn second_center(l: &MetricLieAlgebra, tol: f64) -> Subspace {
    let n = l.dim();
    let z = center(l, tol).orthonormal_basis();
    let proj = Mat::identity(n, n) - &z * z.transpose();
    let cols: Vec<Vector> = (0..n).map(|i| vec_of(&(&proj * l.ad_basis(i)))).collect();
    Subspace::span(&null_space(&from_columns(n * n, &cols), tol), tol)
}

/// Nilradical of a solvable algebra as the set of ad-nilpotent elements.
///
/// The associative algebra `A` generated by `ad 𝔤` is simultaneously
/// triangularizable, so `ad_x` is nilpotent iff `tr(ad_x B) = 0` for every
/// `B ∈ A`; that is a linear system in `x`. The answer is then checked to be
/// a nilpotent ideal containing `[𝔤, 𝔤]`.
pub fn nilradical_solvable(l: &MetricLieAlgebra, tol: f64) -> Result<Subspace> {
    let n = l.dim();
    if !is_solvable(l, tol) {
        return Err(Error::NotSolvable);
    }
    if is_nilpotent(l, tol) {
        return Ok(Subspace::full(n));
    }
    let ads: Vec<Mat> = (0..n).map(|i| l.ad_basis(i)).collect();
    let algebra = associative_closure(&ads, tol);
    let mut rows = Mat::zeros(algebra.len(), n);
    for (r, b) in algebra.iter().enumerate() {
        for (i, a) in ads.iter().enumerate() {
            rows[(r, i)] = (a * b).trace();
        }
    }
    let nil = Subspace::span(&null_space(&rows, tol), tol);

    let full = Subspace::full(n);
    let ideal = nil.containment_residual(&bracket_span(l, &full, &nil, tol));
    let derived = nil.containment_residual(&derived_algebra(l, tol));
    let scale = ads.iter().map(|a| a.norm()).fold(1.0, f64::max);
    let mut nilpotency: f64 = 0.0;
    for v in nil.orthonormal_basis().column_iter() {
        let a = l.ad(&v.into_owned())? / scale;
        let mut p = Mat::identity(n, n);
        for _ in 0..n {
            p = &p * &a;
        }
        nilpotency = nilpotency.max(p.norm());
    }
    let check = tol.sqrt().max(tol * 1e3);
    if ideal > check || derived > check || nilpotency > check {
        return Err(Error::VerificationFailed(format!(
            "nilradical candidate of dim {}: ideal residual {ideal:e}, [s,s] residual {derived:e}, nilpotency residual {nilpotency:e}",
            nil.dim()
        )));
    }
    Ok(nil)
}

/// Frobenius-orthonormal basis of the span of all nonempty products of `gens`.
fn associative_closure(gens: &[Mat], tol: f64) -> Vec<Mat> {
    let n = gens.first().map_or(0, |g| g.nrows());
    let scale = gens.iter().map(|g| g.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return Vec::new();
    }
    let gens: Vec<Mat> = gens.iter().map(|g| g / scale).collect();
    let mut basis: Vec<Vector> = Vec::new();
    let mut frontier: Vec<Mat> = gens.clone();
    while !frontier.is_empty() {
        let before = basis.len();
        let mut cols = basis.clone();
        cols.extend(frontier.iter().map(vec_of));
        let span = column_space(&from_columns(n * n, &cols), tol);
        basis = (0..span.ncols()).map(|j| span.column(j).into_owned()).collect();
        if basis.len() == before {
            break;
        }
        let current: Vec<Mat> = basis.iter().map(|v| Mat::from_column_slice(n, n, v.as_slice())).collect();
        frontier = current.iter().flat_map(|b| gens.iter().map(move |g| b * g)).collect();
    }
    basis.iter().map(|v| Mat::from_column_slice(n, n, v.as_slice())).collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct GradedBasis {
    /// Columns form a g-orthonormal basis, grade by grade.
    #[serde(skip)]
    pub basis: Mat,
    pub grading: Vec<Subspace>,
    /// Largest `|g([e_i, e_j], e_i)|` in the returned frame.
    pub residual: f64,
}

impl GradedBasis {
    pub fn grade_dims(&self) -> Vec<usize> {
        self.grading.iter().map(Subspace::dim).collect()
    }
}

/// Orthonormal basis adapted to `𝔫 = 𝔫₁ ⊕ … ⊕ 𝔫_r`, where `𝔫_k` is the
/// orthogonal complement of `C^{k+1}` inside `C^k` (lower central series).
pub fn graded_orthonormal_basis(l: &MetricLieAlgebra, tol: f64) -> Result<GradedBasis> {
    let (terms, nil) = run(l, SeriesKind::LowerCentral, tol);
    if !nil {
        return Err(Error::NotNilpotent);
    }
    let n = l.dim();
    let gram = l.gram();
    let mut cols: Vec<Vector> = Vec::new();
    let mut grading = Vec::new();
    for w in terms.windows(2) {
        let (upper, lower) = (&w[0], &w[1]);
        let grade = upper.intersection(&lower.g_complement(gram, tol), tol);
        let onb = grade.g_orthonormal_basis(gram);
        cols.extend(onb.column_iter().map(|c| c.into_owned()));
        grading.push(grade);
    }
    let basis = from_columns(n, &cols);
    let mut residual: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let (ei, ej) = (&cols[i], &cols[j]);
            residual = residual.max(l.inner(&l.bracket(ei, ej), ei).abs());
        }
    }
    if residual > tol.max(1e-9) * l.structure().max_abs().max(1.0) {
        return Err(Error::VerificationFailed(format!("graded frame residual {residual:e}")));
    }
    Ok(GradedBasis { basis, grading, residual })
}
