use serde::Serialize;

use crate::linalg::{canonical_basis, column_space, from_columns, g_orthonormalize, max_abs, null_space, Mat, Vector};

/// Linear subspace of coordinate space, stored by a canonical spanning basis
/// (reduced row-echelon columns), so equal subspaces compare equal.
#[derive(Debug, Clone, PartialEq)]
pub struct Subspace {
    ambient_dim: usize,
    basis: Mat,
}

impl Subspace {
    /// Span of the columns of `cols`; dependent columns are dropped.
    pub fn span(cols: &Mat, tol: f64) -> Subspace {
        let n = cols.nrows();
        let onb = column_space(cols, tol);
        Subspace { ambient_dim: n, basis: canonical_basis(&onb, tol.max(1e-12)) }
    }

    pub fn span_vectors(ambient_dim: usize, vecs: &[Vector], tol: f64) -> Subspace {
        Subspace::span(&from_columns(ambient_dim, vecs), tol)
    }

    pub fn zero(n: usize) -> Subspace {
        Subspace { ambient_dim: n, basis: Mat::zeros(n, 0) }
    }

    pub fn full(n: usize) -> Subspace {
        Subspace { ambient_dim: n, basis: Mat::identity(n, n) }
    }

    /// Span of the given coordinate axes.
    pub fn coordinate(n: usize, axes: &[usize]) -> Subspace {
        let cols: Vec<Vector> = axes
            .iter()
            .map(|&i| {
                let mut v = Vector::zeros(n);
                v[i] = 1.0;
                v
            })
            .collect();
        Subspace::span_vectors(n, &cols, 1e-12)
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }

    /// Canonical basis, one column per dimension.
    pub fn basis(&self) -> &Mat {
        &self.basis
    }

    pub fn vectors(&self) -> Vec<Vector> {
        (0..self.dim()).map(|j| self.basis.column(j).into_owned()).collect()
    }

    /// Euclidean orthonormal basis.
    pub fn orthonormal_basis(&self) -> Mat {
        column_space(&self.basis, 1e-12)
    }

    /// Basis orthonormal for `gram`, Gram–Schmidt in canonical-basis order.
    pub fn g_orthonormal_basis(&self, gram: &Mat) -> Mat {
        g_orthonormalize(&self.basis, gram, 1e-12)
    }

    fn projector(&self) -> Mat {
        let u = self.orthonormal_basis();
        &u * u.transpose()
    }

    /// Distance from `v` to the subspace, relative to `max(1, |v|)`.
    pub fn vector_residual(&self, v: &Vector) -> f64 {
        let r = v - self.projector() * v;
        r.norm() / v.norm().max(1.0)
    }

    pub fn contains_vector(&self, v: &Vector, tol: f64) -> bool {
        self.vector_residual(v) <= tol
    }

    /// Largest distance of a unit vector of `other` from `self`; 0 iff `other ⊆ self`.
    pub fn containment_residual(&self, other: &Subspace) -> f64 {
        let u = other.orthonormal_basis();
        if u.ncols() == 0 {
            return 0.0;
        }
        let r = &u - self.projector() * &u;
        (0..r.ncols()).map(|j| r.column(j).norm()).fold(0.0, f64::max)
    }

    pub fn contains(&self, other: &Subspace, tol: f64) -> bool {
        self.containment_residual(other) <= tol
    }

    /// Symmetric containment residual; 0 iff the subspaces coincide.
    pub fn distance(&self, other: &Subspace) -> f64 {
        if self.dim() != other.dim() {
            return 1.0;
        }
        self.containment_residual(other).max(other.containment_residual(self))
    }

    pub fn equals(&self, other: &Subspace, tol: f64) -> bool {
        self.distance(other) <= tol
    }

    pub fn sum(&self, other: &Subspace, tol: f64) -> Subspace {
        let mut cols = self.vectors();
        cols.extend(other.vectors());
        Subspace::span_vectors(self.ambient_dim, &cols, tol)
    }

    pub fn intersection(&self, other: &Subspace, tol: f64) -> Subspace {
        // x in both iff x is orthogonal to both complements
        let a = self.euclidean_complement(tol);
        let b = other.euclidean_complement(tol);
        let n = self.ambient_dim;
        let mut rows = Mat::zeros(a.dim() + b.dim(), n);
        for (r, v) in a.vectors().iter().chain(b.vectors().iter()).enumerate() {
            rows.set_row(r, &v.transpose());
        }
        if rows.nrows() == 0 {
            return Subspace::full(n);
        }
        Subspace::span(&null_space(&rows, tol), tol)
    }

    pub fn euclidean_complement(&self, tol: f64) -> Subspace {
        self.g_complement(&Mat::identity(self.ambient_dim, self.ambient_dim), tol)
    }

    /// Complement orthogonal for `gram`.
    pub fn g_complement(&self, gram: &Mat, tol: f64) -> Subspace {
        let n = self.ambient_dim;
        if self.dim() == 0 {
            return Subspace::full(n);
        }
        let constraints = self.basis.transpose() * gram;
        Subspace::span(&null_space(&constraints, tol), tol)
    }

    /// Largest |g(u, v)| over unit vectors of the two subspaces.
    pub fn g_orthogonality_residual(&self, other: &Subspace, gram: &Mat) -> f64 {
        let a = self.g_orthonormal_basis(gram);
        let b = other.g_orthonormal_basis(gram);
        if a.ncols() == 0 || b.ncols() == 0 {
            return 0.0;
        }
        max_abs(&(a.transpose() * gram * b))
    }
}

impl Serialize for Subspace {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let basis: Vec<Vec<f64>> = self.vectors().iter().map(|v| v.iter().copied().collect()).collect();
        let mut st = s.serialize_struct("Subspace", 3)?;
        st.serialize_field("ambient_dim", &self.ambient_dim)?;
        st.serialize_field("dim", &self.dim())?;
        st.serialize_field("basis", &basis)?;
        st.end()
    }
}
