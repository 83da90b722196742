//! The m-Bakry–Émery tensor and the totally left-invariant quasi-Einstein solver.

mod verify;

use serde::Serialize;

use crate::algebra::{center, killing_form, MetricLieAlgebra, Subspace};
use crate::curvature::{ricci_oracle, CurvatureReport};
use crate::error::{Error, Result};
use crate::linalg::{cluster_eigenvalues, null_space, Mat, Vector, CLUSTER_REL_GAP};

pub use verify::{
    kirillov_frame, verify_heisenberg_extension_form, verify_nilpotent_structure_theorem,
    verify_solvable_conditions, verify_two_eigenvalue_structure, Check, VerdictReport,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct QEFlags {
    pub x_killing: bool,
    pub x_central: bool,
    pub einstein: bool,
}

/// A solution of `Ric + ½ L_X g − (1/m) X♭⊗X♭ = λ g` with left-invariant `X`.
#[derive(Debug, Clone, Serialize)]
pub struct QESolution {
    pub lambda: f64,
    pub m: f64,
    /// Declared-basis coordinates of `X`.
    #[serde(serialize_with = "ser_vec")]
    pub x: Vector,
    /// Frobenius norm of the Bakry–Émery tensor minus `λ G`.
    pub residual: f64,
    pub flags: QEFlags,
}

fn ser_vec<S: serde::Serializer>(v: &Vector, s: S) -> std::result::Result<S::Ok, S::Error> {
    v.as_slice().serialize(s)
}

/// `F = (1/m) X Xᵀ G`, so that the Ricci operator equals `λ I + F`.
#[derive(Debug, Clone)]
pub struct QEOperator {
    pub f: Mat,
}

impl QEOperator {
    pub fn new(l: &MetricLieAlgebra, sol: &QESolution) -> QEOperator {
        QEOperator { f: &sol.x * sol.x.transpose() * l.gram() / sol.m }
    }

    pub fn rank(&self, tol: f64) -> usize {
        crate::linalg::rank(&self.f, tol)
    }

    pub fn image(&self, tol: f64) -> Subspace {
        Subspace::span(&self.f, tol)
    }
}

/// `L_X g = −(ad_Xᵀ G + G ad_X)` as a bilinear form.
pub fn lie_derivative_metric(l: &MetricLieAlgebra, x: &Vector) -> Result<Mat> {
    let a = l.ad(x)?;
    let g = l.gram();
    Ok(-(a.transpose() * g + g * &a))
}

/// Frobenius norm of `L_X g`.
pub fn killing_defect(l: &MetricLieAlgebra, x: &Vector) -> Result<f64> {
    Ok(lie_derivative_metric(l, x)?.norm())
}

/// `{x : ad_x is skew for g}`.
pub fn killing_subalgebra(l: &MetricLieAlgebra, tol: f64) -> Subspace {
    let n = l.dim();
    let g = l.gram();
    let mut m = Mat::zeros(n * n, n);
    for i in 0..n {
        let a = l.ad_basis(i);
        let s = g * &a + a.transpose() * g;
        for (r, v) in s.iter().enumerate() {
            m[(r, i)] = *v;
        }
    }
    Subspace::span(&null_space(&m, tol), tol)
}

/// `Ric + ½ L_X g − (1/m) X♭⊗X♭` with `X♭ = G X`.
pub fn bakry_emery(l: &MetricLieAlgebra, x: &Vector, m: f64, tol: f64) -> Result<Mat> {
    let ric = ricci_oracle(l, tol)?;
    bakry_emery_with(l, &ric, x, m)
}

fn bakry_emery_with(l: &MetricLieAlgebra, ric: &CurvatureReport, x: &Vector, m: f64) -> Result<Mat> {
    if m == 0.0 {
        return Err(Error::ZeroM);
    }
    let xf = l.gram() * x;
    Ok(&ric.ricci + lie_derivative_metric(l, x)? * 0.5 - &xf * xf.transpose() / m)
}

/// All totally left-invariant solutions.
///
/// With `X` Killing the equation reads `r = λ I + (1/m) X Xᵀ G` for the
/// Ricci operator `r`, so the spectrum is one cluster (Einstein, `X = 0`) or
/// clusters of sizes `(n−1, 1)` with `X` along the simple eigenvector. Each
/// candidate is kept only if its full residual is within `tol`.
pub fn qe_solve(l: &MetricLieAlgebra, m: f64, tol: f64) -> Result<Vec<QESolution>> {
    if m == 0.0 {
        return Err(Error::ZeroM);
    }
    let ric = ricci_oracle(l, tol)?;
    let n = l.dim();
    let clusters = cluster_eigenvalues(&ric.eigenvalues, CLUSTER_REL_GAP);
    let z = center(l, tol);
    let mut out = Vec::new();
    let accept = |lambda: f64, x: Vector, out: &mut Vec<QESolution>| -> Result<()> {
        let be = bakry_emery_with(l, &ric, &x, m)?;
        let residual = (be - l.gram() * lambda).norm();
        if residual > tol {
            return Ok(());
        }
        let einstein = x.iter().all(|v| *v == 0.0);
        let xn = l.inner(&x, &x).sqrt().max(1.0);
        let flags = QEFlags {
            x_killing: killing_defect(l, &x)? <= tol * xn,
            x_central: einstein || z.contains_vector(&(&x / xn), tol.sqrt()),
            einstein,
        };
        out.push(QESolution { lambda, m, x, residual, flags });
        Ok(())
    };
    if clusters.len() == 1 {
        accept(clusters[0].value, Vector::zeros(n), &mut out)?;
        return Ok(out);
    }
    if clusters.len() != 2 {
        return Ok(out);
    }
    // (index of the simple eigenvalue, value of the other cluster)
    let mut splits = Vec::new();
    for (single, other) in [(0, 1), (1, 0)] {
        if clusters[single].len == 1 && clusters[other].len == n - 1 {
            splits.push((clusters[single].start, clusters[other].value));
        }
    }
    for (idx, lambda) in splits {
        let mu = ric.eigenvalues[idx];
        let s = m * (mu - lambda);
        if s < -tol {
            continue;
        }
        let u = ric.eigenvectors.column(idx).into_owned();
        if killing_defect(l, &u)? > tol.sqrt() {
            continue;
        }
        let x = u * s.max(0.0).sqrt();
        accept(lambda, x.clone(), &mut out)?;
        accept(lambda, -x, &mut out)?;
    }
    Ok(out)
}

/// Solutions with `X ≠ 0`.
pub fn nontrivial(sols: &[QESolution]) -> Vec<&QESolution> {
    sols.iter().filter(|s| !s.flags.einstein).collect()
}

/// `‖B‖` of the Killing form, as a convenience for reports.
pub fn killing_form_norm(l: &MetricLieAlgebra) -> f64 {
    killing_form(l).norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{is_derivation, StructureTensor};
    use crate::linalg::max_abs;
    use crate::scalar::Scalar;

    const TOL: f64 = 1e-9;

    fn from(n: usize, e: &[(usize, usize, usize, f64)]) -> MetricLieAlgebra {
        let e: Vec<_> = e.iter().map(|&(i, j, k, v)| (i, j, k, Scalar::Float(v))).collect();
        let st = StructureTensor::from_entries(n, &e).unwrap();
        MetricLieAlgebra::with_identity(MetricLieAlgebra::default_labels(n), st).unwrap()
    }

    #[test]
    fn lie_derivative_of_affine_algebra() {
        let l = from(2, &[(0, 1, 1, 1.0)]);
        let ld = lie_derivative_metric(&l, &l.basis_vector(0)).unwrap();
        assert_eq!(ld, Mat::from_row_slice(2, 2, &[0.0, 0.0, 0.0, -2.0]));
    }

    #[test]
    fn heisenberg_closed_form() {
        let l = from(3, &[(0, 1, 2, 1.0)]);
        let x = Vector::from_vec(vec![0.0, 0.0, 2f64.sqrt()]);
        let be = bakry_emery(&l, &x, 2.0, TOL).unwrap();
        assert!(max_abs(&(be + Mat::identity(3, 3) * 0.5)) < 1e-15);
        let sols = qe_solve(&l, 2.0, TOL).unwrap();
        assert_eq!(sols.len(), 2);
        assert!((sols[0].lambda + 0.5).abs() < 1e-12);
        assert!((sols[0].x[2] - 2f64.sqrt()).abs() < 1e-12);
        assert!((sols[1].x[2] + 2f64.sqrt()).abs() < 1e-12);
        assert!(sols.iter().all(|s| s.flags.x_killing && s.flags.x_central && !s.flags.einstein));
        let f = QEOperator::new(&l, &sols[0]);
        assert_eq!(f.rank(1e-9), 1);
        assert!(!is_derivation(&l, &f.f, 1e-9));
    }

    #[test]
    fn abelian_is_einstein() {
        let l = from(3, &[]);
        let sols = qe_solve(&l, -1.5, TOL).unwrap();
        assert_eq!(sols.len(), 1);
        assert!(sols[0].flags.einstein && sols[0].lambda == 0.0);
        assert!(matches!(qe_solve(&l, 0.0, TOL), Err(Error::ZeroM)));
    }

    #[test]
    fn killing_fields_of_heisenberg_are_central() {
        let l = from(3, &[(0, 1, 2, 1.0)]);
        assert!(killing_subalgebra(&l, TOL).equals(&center(&l, TOL), 1e-12));
        // so(3) is bi-invariant: everything is Killing
        let so3 = from(3, &[(0, 1, 2, 1.0), (1, 2, 0, 1.0), (2, 0, 1, 1.0)]);
        assert_eq!(killing_subalgebra(&so3, TOL).dim(), 3);
    }

    #[test]
    fn almost_abelian_hyperbolic_has_no_solution() {
        // e0 acts on (e1, e2) by diag(1, -1)
        let l = from(3, &[(0, 1, 1, 1.0), (0, 2, 2, -1.0)]);
        assert!(qe_solve(&l, 1.0, TOL).unwrap().is_empty());
    }

    #[test]
    fn negative_m_rejects_heisenberg() {
        let l = from(3, &[(0, 1, 2, 1.0)]);
        assert!(qe_solve(&l, -1.0, TOL).unwrap().is_empty());
    }
}
