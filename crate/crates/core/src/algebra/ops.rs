use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::linalg::{max_abs, Mat, Vector};

use super::metric::MetricLieAlgebra;
use super::subspace::Subspace;

/// Matrix of `ad_x` in the declared basis.
pub fn ad_matrix(l: &MetricLieAlgebra, x: &Vector) -> Result<Mat> {
    l.ad(x)
}

/// Largest Euclidean norm of the Jacobi sum over basis triples.
pub fn jacobi_residual(l: &MetricLieAlgebra) -> f64 {
    let st = l.structure();
    let n = st.dim();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            for k in (j + 1)..n {
                let mut s = 0.0;
                let mut acc = vec![0.0; n];
                for m in 0..n {
                    let (a, b, c) = (st.get(i, j, m), st.get(j, k, m), st.get(k, i, m));
                    if a == 0.0 && b == 0.0 && c == 0.0 {
                        continue;
                    }
                    for (out, slot) in acc.iter_mut().enumerate() {
                        *slot += a * st.get(m, k, out) + b * st.get(m, i, out) + c * st.get(m, j, out);
                    }
                }
                for v in &acc {
                    s += v * v;
                }
                worst = worst.max(s.sqrt());
            }
        }
    }
    worst
}

/// Largest absolute coefficient of the Jacobi sum, in exact arithmetic.
/// `None` for float-mode tensors.
pub fn jacobi_residual_exact(l: &MetricLieAlgebra) -> Option<BigRational> {
    let st = l.structure();
    let e = st.exact_values()?;
    let n = st.dim();
    let at = |i: usize, j: usize, k: usize| &e[(i * n + j) * n + k];
    let mut worst = BigRational::zero();
    for i in 0..n {
        for j in (i + 1)..n {
            for k in (j + 1)..n {
                let mut acc = vec![BigRational::zero(); n];
                for m in 0..n {
                    let (a, b, c) = (at(i, j, m), at(j, k, m), at(k, i, m));
                    if a.is_zero() && b.is_zero() && c.is_zero() {
                        continue;
                    }
                    for (out, slot) in acc.iter_mut().enumerate() {
                        for (coef, (p, q)) in [(a, (m, k)), (b, (m, i)), (c, (m, j))] {
                            let t = at(p, q, out);
                            if !coef.is_zero() && !t.is_zero() {
                                *slot += coef * t;
                            }
                        }
                    }
                }
                for v in acc {
                    let v = v.abs();
                    if v > worst {
                        worst = v;
                    }
                }
            }
        }
    }
    Some(worst)
}

/// `|tr ad_{e_i}| ≤ tol` for every basis vector.
pub fn is_unimodular(l: &MetricLieAlgebra, tol: f64) -> bool {
    unimodularity_defect(l) <= tol
}

pub fn unimodularity_defect(l: &MetricLieAlgebra) -> f64 {
    (0..l.dim()).map(|i| l.ad_basis(i).trace().abs()).fold(0.0, f64::max)
}

/// Exact unimodularity verdict for rational tensors.
pub fn is_unimodular_exact(l: &MetricLieAlgebra) -> Option<bool> {
    let st = l.structure();
    let e = st.exact_values()?;
    let n = st.dim();
    Some((0..n).all(|i| {
        let tr: BigRational = (0..n).map(|j| e[(i * n + j) * n + j].clone()).sum();
        tr.is_zero()
    }))
}

/// `B[i][j] = tr(ad_{e_i} ad_{e_j})`.
pub fn killing_form(l: &MetricLieAlgebra) -> Mat {
    let n = l.dim();
    let ads: Vec<Mat> = (0..n).map(|i| l.ad_basis(i)).collect();
    Mat::from_fn(n, n, |i, j| (&ads[i] * &ads[j]).trace())
}

/// The vector `H ∈ 𝔞` with `g(H, a) = tr ad_a` for all `a ∈ 𝔞`.
pub fn mean_curvature_vector(l: &MetricLieAlgebra, a: &Subspace, n: &Subspace, tol: f64) -> Result<Vector> {
    check_orthogonal_split(l, a, n, tol)?;
    let basis = a.g_orthonormal_basis(l.gram());
    let mut h = Vector::zeros(l.dim());
    for j in 0..basis.ncols() {
        let v = basis.column(j).into_owned();
        h += &v * l.ad(&v)?.trace();
    }
    Ok(h)
}

pub(crate) fn check_orthogonal_split(l: &MetricLieAlgebra, a: &Subspace, n: &Subspace, tol: f64) -> Result<()> {
    if a.dim() + n.dim() != l.dim() || a.g_orthogonality_residual(n, l.gram()) > tol {
        return Err(Error::SplitNotOrthogonal);
    }
    Ok(())
}

/// Largest `‖D[e_i,e_j] − [De_i,e_j] − [e_i,De_j]‖` over basis pairs.
pub fn derivation_residual(l: &MetricLieAlgebra, d: &Mat) -> f64 {
    let n = l.dim();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            let ei = l.basis_vector(i);
            let ej = l.basis_vector(j);
            let lhs = d * l.bracket(&ei, &ej);
            let rhs = l.bracket(&(d * &ei), &ej) + l.bracket(&ei, &(d * &ej));
            worst = worst.max((lhs - rhs).norm());
        }
    }
    worst
}

pub fn is_derivation(l: &MetricLieAlgebra, d: &Mat, tol: f64) -> bool {
    d.nrows() == l.dim() && d.ncols() == l.dim() && derivation_residual(l, d) <= tol
}

/// `(A + Aᵀ)/2`; the symmetric part in an orthonormal frame.
pub fn symmetric_part(a: &Mat) -> Mat {
    (a + a.transpose()) * 0.5
}

/// Adjoint with respect to `gram`: `A♯ = G⁻¹ Aᵀ G`.
pub fn metric_adjoint(a: &Mat, gram: &Mat) -> Result<Mat> {
    let g_inv = gram.clone().try_inverse().ok_or(Error::GramNotPositiveDefinite)?;
    Ok(g_inv * a.transpose() * gram)
}

/// `(A + A♯)/2` with the Gram adjoint.
pub fn metric_symmetric_part(a: &Mat, gram: &Mat) -> Result<Mat> {
    Ok((a + metric_adjoint(a, gram)?) * 0.5)
}

/// `‖[A, A♯]‖_max`; zero iff `A` is normal for the metric.
pub fn normality_defect(a: &Mat, gram: &Mat) -> Result<f64> {
    let s = metric_adjoint(a, gram)?;
    Ok(max_abs(&(a * &s - &s * a)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::StructureTensor;
    use crate::scalar::Scalar;

    fn from(n: usize, e: &[(usize, usize, usize, i64)]) -> MetricLieAlgebra {
        let e: Vec<_> = e.iter().map(|&(i, j, k, v)| (i, j, k, Scalar::from(v))).collect();
        let st = StructureTensor::from_entries(n, &e).unwrap();
        MetricLieAlgebra::with_identity(MetricLieAlgebra::default_labels(n), st).unwrap()
    }

    // Independent Jacobi check: build every double bracket from ad matrices.
    fn jacobi_bruteforce(l: &MetricLieAlgebra) -> f64 {
        let n = l.dim();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let (ei, ej, ek) = (l.basis_vector(i), l.basis_vector(j), l.basis_vector(k));
                    let s = l.bracket(&l.bracket(&ei, &ej), &ek)
                        + l.bracket(&l.bracket(&ej, &ek), &ei)
                        + l.bracket(&l.bracket(&ek, &ei), &ej);
                    worst = worst.max(s.norm());
                }
            }
        }
        worst
    }

    #[test]
    fn cyclic_tensor_is_lie() {
        // [e1,e2]=e3, [e1,e3]=e2, [e2,e3]=e1
        let l = from(3, &[(0, 1, 2, 1), (0, 2, 1, 1), (1, 2, 0, 1)]);
        assert_eq!(jacobi_bruteforce(&l), 0.0);
        assert_eq!(jacobi_residual(&l), 0.0);
        assert!(jacobi_residual_exact(&l).unwrap().is_zero());
    }

    #[test]
    fn broken_tensor_residual_matches_hand_value() {
        // [e1,e2]=e3, [e1,e3]=e1: the Jacobi sum on (e1,e2,e3) is e1.
        let l = from(3, &[(0, 1, 2, 1), (0, 2, 0, 1)]);
        assert!((jacobi_residual(&l) - 1.0).abs() < 1e-15);
        assert_eq!(jacobi_residual_exact(&l).unwrap(), BigRational::from_integer(1.into()));
        assert!((jacobi_bruteforce(&l) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn two_dim_affine_algebra() {
        let l = from(2, &[(0, 1, 1, 1)]);
        assert!(!is_unimodular(&l, 1e-9));
        assert_eq!(is_unimodular_exact(&l), Some(false));
        let a = Subspace::coordinate(2, &[0]);
        let n = Subspace::coordinate(2, &[1]);
        let h = mean_curvature_vector(&l, &a, &n, 1e-9).unwrap();
        assert!((h - Vector::from_vec(vec![1.0, 0.0])).norm() < 1e-15);
    }

    #[test]
    fn heisenberg_derivations() {
        let l = from(3, &[(0, 1, 2, 1)]);
        let d = Mat::from_diagonal(&Vector::from_vec(vec![1.0, 1.0, 2.0]));
        assert!(is_derivation(&l, &d, 1e-12));
        assert!(!is_derivation(&l, &Mat::identity(3, 3), 1e-12));
        let x = Vector::from_vec(vec![0.3, -1.2, 2.0]);
        assert!(is_derivation(&l, &l.ad(&x).unwrap(), 1e-12));
        assert_eq!(max_abs(&killing_form(&l)), 0.0);
    }

    #[test]
    fn heisenberg_ad_x() {
        let l = from(3, &[(0, 1, 2, 1)]);
        let m = ad_matrix(&l, &l.basis_vector(0)).unwrap();
        let mut expect = Mat::zeros(3, 3);
        expect[(2, 1)] = 1.0;
        assert_eq!(m, expect);
        assert!(ad_matrix(&l, &Vector::zeros(2)).is_err());
    }

    #[test]
    fn symmetric_part_of_jordan_block() {
        let j = Mat::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        assert_eq!(symmetric_part(&j), Mat::from_row_slice(2, 2, &[0.0, 0.5, 0.5, 0.0]));
        let g = Mat::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 1.0]);
        let s = metric_symmetric_part(&j, &g).unwrap();
        // self-adjoint for g: G S symmetric
        let gs = &g * &s;
        assert!(max_abs(&(&gs - gs.transpose())) < 1e-15);
    }
}
