use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::linalg::{cholesky_lower, max_abs, Mat, Vector};

use super::structure::StructureTensor;
use super::subspace::Subspace;

/// A Lie algebra with an inner product, both given in a declared basis.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricLieAlgebra {
    labels: Vec<String>,
    st: StructureTensor,
    gram: Mat,
}

impl MetricLieAlgebra {
    pub fn new(labels: Vec<String>, st: StructureTensor, gram: Mat) -> Result<Self> {
        let n = st.dim();
        if labels.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: labels.len() });
        }
        if gram.nrows() != n || gram.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n, got: gram.nrows() });
        }
        let mut seen = HashSet::new();
        for l in &labels {
            if !seen.insert(l.as_str()) {
                return Err(Error::Validation(format!("duplicate basis label '{l}'")));
            }
        }
        if cholesky_lower(&gram).is_none() {
            return Err(Error::GramNotPositiveDefinite);
        }
        Ok(MetricLieAlgebra { labels, st, gram })
    }

    pub fn with_identity(labels: Vec<String>, st: StructureTensor) -> Result<Self> {
        let n = st.dim();
        Self::new(labels, st, Mat::identity(n, n))
    }

    /// Labels `e1..en`.
    pub fn default_labels(n: usize) -> Vec<String> {
        (1..=n).map(|i| format!("e{i}")).collect()
    }

    pub fn dim(&self) -> usize {
        self.st.dim()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label_index(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn structure(&self) -> &StructureTensor {
        &self.st
    }

    pub fn gram(&self) -> &Mat {
        &self.gram
    }

    pub fn with_gram(&self, gram: Mat) -> Result<Self> {
        Self::new(self.labels.clone(), self.st.clone(), gram)
    }

    /// Coordinate vector of basis element `i`.
    pub fn basis_vector(&self, i: usize) -> Vector {
        let mut v = Vector::zeros(self.dim());
        v[i] = 1.0;
        v
    }

    pub fn bracket(&self, x: &Vector, y: &Vector) -> Vector {
        self.st.bracket(x, y)
    }

    pub fn inner(&self, x: &Vector, y: &Vector) -> f64 {
        (x.transpose() * &self.gram * y)[(0, 0)]
    }

    pub fn ad(&self, x: &Vector) -> Result<Mat> {
        let n = self.dim();
        if x.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: x.len() });
        }
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            if x[i] != 0.0 {
                m += self.st.ad_basis(i) * x[i];
            }
        }
        Ok(m)
    }

    pub fn ad_basis(&self, i: usize) -> Mat {
        self.st.ad_basis(i)
    }

    pub fn has_identity_gram(&self) -> bool {
        self.gram == Mat::identity(self.dim(), self.dim())
    }

    /// Cholesky-based orthonormalization: with `G = L Lᵀ` and `Q = L⁻ᵀ`, the
    /// columns of `Q` are the Gram–Schmidt frame of the declared basis, and the
    /// returned algebra is written in that frame with identity Gram.
    pub fn orthonormal_frame(&self) -> Result<(Mat, MetricLieAlgebra)> {
        let n = self.dim();
        if self.has_identity_gram() {
            return Ok((Mat::identity(n, n), self.clone()));
        }
        let l = cholesky_lower(&self.gram).ok_or(Error::GramNotPositiveDefinite)?;
        let q = l
            .transpose()
            .try_inverse()
            .ok_or(Error::GramNotPositiveDefinite)?;
        let st = self.st.change_basis(&q)?;
        let frame = MetricLieAlgebra { labels: self.labels.clone(), st, gram: Mat::identity(n, n) };
        Ok((q, frame))
    }

    /// Same algebra written in the basis given by the columns of `p`.
    pub fn change_basis(&self, p: &Mat, labels: Vec<String>) -> Result<MetricLieAlgebra> {
        let st = self.st.change_basis(p)?;
        let gram = p.transpose() * &self.gram * p;
        let gram = (&gram + gram.transpose()) * 0.5;
        Self::new(labels, st, gram)
    }

    /// Reorders the basis: new basis vector `r` is old basis vector `order[r]`.
    pub fn permute(&self, order: &[usize]) -> Result<MetricLieAlgebra> {
        let st = self.st.permute(order)?;
        let n = self.dim();
        let gram = Mat::from_fn(n, n, |i, j| self.gram[(order[i], order[j])]);
        let labels = order.iter().map(|&o| self.labels[o].clone()).collect();
        Self::new(labels, st, gram)
    }

    /// The subalgebra `sub` with the induced metric, written in the
    /// canonical basis of `sub`. Fails if `sub` is not closed under brackets.
    pub fn restrict(&self, sub: &Subspace, tol: f64) -> Result<MetricLieAlgebra> {
        let b = sub.basis().clone();
        let k = b.ncols();
        if k == 0 {
            return Err(Error::Validation("cannot restrict to the zero subspace".into()));
        }
        let btb_inv = (b.transpose() * &b)
            .try_inverse()
            .ok_or_else(|| Error::Validation("degenerate subspace basis".into()))?;
        let coords_of = |w: &Vector| &btb_inv * (b.transpose() * w);
        let cols: Vec<Vector> = (0..k).map(|i| b.column(i).into_owned()).collect();
        let mut c = vec![0.0; k * k * k];
        let mut worst: f64 = 0.0;
        for i in 0..k {
            for j in 0..k {
                let w = self.bracket(&cols[i], &cols[j]);
                let u = coords_of(&w);
                worst = worst.max((&b * &u - &w).norm());
                for l in 0..k {
                    c[(i * k + j) * k + l] = u[l];
                }
            }
        }
        if worst > tol * self.st.max_abs().max(1.0) {
            return Err(Error::VerificationFailed(format!(
                "subspace is not a subalgebra (bracket residual {worst:e})"
            )));
        }
        for i in 0..k {
            for j in 0..=i {
                for l in 0..k {
                    let a = 0.5 * (c[(i * k + j) * k + l] - c[(j * k + i) * k + l]);
                    c[(i * k + j) * k + l] = a;
                    c[(j * k + i) * k + l] = -a;
                }
            }
        }
        let st = StructureTensor::from_flat(k, c)?;
        let gram = b.transpose() * &self.gram * &b;
        let gram = (&gram + gram.transpose()) * 0.5;
        let labels = self.labels_for(&b);
        Self::new(labels, st, gram)
    }

    /// Names columns that are coordinate axes by the axis label, others `v<i>`.
    fn labels_for(&self, b: &Mat) -> Vec<String> {
        (0..b.ncols())
            .map(|j| {
                let col = b.column(j);
                let nz: Vec<usize> = (0..col.len()).filter(|&i| col[i].abs() > 1e-12).collect();
                if nz.len() == 1 && (col[nz[0]] - 1.0).abs() <= 1e-12 {
                    self.labels[nz[0]].clone()
                } else {
                    format!("v{}", j + 1)
                }
            })
            .collect()
    }

    /// Largest deviation of `gram` from symmetric, for diagnostics.
    pub fn gram_asymmetry(&self) -> f64 {
        max_abs(&(&self.gram - self.gram.transpose()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Scalar;

    fn h3() -> MetricLieAlgebra {
        let st = StructureTensor::from_entries(3, &[(0, 1, 2, Scalar::from(1))]).unwrap();
        MetricLieAlgebra::with_identity(vec!["x".into(), "y".into(), "z".into()], st).unwrap()
    }

    #[test]
    fn identity_gram_frame_is_trivial() {
        let l = h3();
        let (q, f) = l.orthonormal_frame().unwrap();
        assert_eq!(q, Mat::identity(3, 3));
        assert_eq!(f, l);
    }

    #[test]
    fn scaled_frame_halves_bracket() {
        let l = h3().with_gram(Mat::from_diagonal(&Vector::from_vec(vec![4.0, 1.0, 1.0]))).unwrap();
        let (q, f) = l.orthonormal_frame().unwrap();
        assert!((q[(0, 0)] - 0.5).abs() < 1e-15);
        assert!((f.structure().get(0, 1, 2) - 0.5).abs() < 1e-15);
        let qgq = q.transpose() * l.gram() * &q;
        assert!(max_abs(&(qgq - Mat::identity(3, 3))) < 1e-14);
    }

    #[test]
    fn rejects_indefinite_gram() {
        let g = Mat::from_diagonal(&Vector::from_vec(vec![1.0, -1.0, 1.0]));
        assert!(matches!(h3().with_gram(g), Err(Error::GramNotPositiveDefinite)));
    }

    #[test]
    fn restrict_to_abelian_ideal() {
        let l = h3();
        let sub = Subspace::coordinate(3, &[1, 2]);
        let r = l.restrict(&sub, 1e-9).unwrap();
        assert_eq!(r.labels(), &["y".to_string(), "z".to_string()]);
        assert!(r.structure().is_abelian(), "{:?}", r.structure().as_slice());
        assert!(l.restrict(&Subspace::coordinate(3, &[0, 1]), 1e-9).is_err());
    }
}
