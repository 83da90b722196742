use nalgebra::DMatrix;
use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::linalg::{Mat, Vector};
use crate::scalar::Scalar;

/// Antisymmetric array `c[i][j][k]` with `[e_i, e_j] = Σ_k c[i][j][k] e_k`.
///
/// Every tensor carries binary floats; tensors built only from exact
/// rational inputs also keep an exact copy, used by the exact checks.
#[derive(Debug, Clone, PartialEq)]
pub struct StructureTensor {
    dim: usize,
    c: Vec<f64>,
    exact: Option<Vec<BigRational>>,
}

impl StructureTensor {
    /// Abelian tensor (exact).
    pub fn zeros(dim: usize) -> Self {
        StructureTensor {
            dim,
            c: vec![0.0; dim * dim * dim],
            exact: Some(vec![BigRational::zero(); dim * dim * dim]),
        }
    }

    /// Builds from `(i, j, k, c_ij^k)` entries; `(j, i, k, −c)` is implied.
    /// Repeating a slot is allowed only with a consistent value.
    pub fn from_entries(dim: usize, entries: &[(usize, usize, usize, Scalar)]) -> Result<Self> {
        let all_exact = entries.iter().all(|e| e.3.is_exact());
        let mut values: Vec<Option<Scalar>> = vec![None; dim * dim * dim];
        let idx = |i: usize, j: usize, k: usize| (i * dim + j) * dim + k;
        for (i, j, k, v) in entries {
            let (i, j, k) = (*i, *j, *k);
            if i >= dim || j >= dim || k >= dim {
                return Err(Error::Validation(format!(
                    "bracket index ({i},{j},{k}) out of range for dimension {dim}"
                )));
            }
            if i == j {
                if !v.is_zero() {
                    return Err(Error::Validation(format!(
                        "[e{i},e{i}] must vanish, got coefficient {v}"
                    )));
                }
                continue;
            }
            for (slot, val) in [(idx(i, j, k), v.clone()), (idx(j, i, k), v.neg())] {
                match &values[slot] {
                    Some(prev) if !scalars_equal(prev, &val) => {
                        return Err(Error::Validation(format!(
                            "conflicting coefficients for bracket ({i},{j}) -> {k}: {prev} vs {val}"
                        )))
                    }
                    _ => values[slot] = Some(val),
                }
            }
        }
        let c = values
            .iter()
            .map(|v| v.as_ref().map_or(0.0, Scalar::to_f64))
            .collect();
        let exact = all_exact.then(|| {
            values
                .iter()
                .map(|v| match v {
                    Some(Scalar::Exact(q)) => q.clone(),
                    _ => BigRational::zero(),
                })
                .collect()
        });
        Ok(StructureTensor { dim, c, exact })
    }

    /// Float-mode tensor from a flat `(i*dim + j)*dim + k` array.
    pub fn from_flat(dim: usize, c: Vec<f64>) -> Result<Self> {
        if c.len() != dim * dim * dim {
            return Err(Error::DimensionMismatch { expected: dim * dim * dim, got: c.len() });
        }
        let t = StructureTensor { dim, c, exact: None };
        let defect = t.antisymmetry_defect();
        if defect > 1e-12 * t.max_abs().max(1.0) {
            return Err(Error::Validation(format!("tensor not antisymmetric (defect {defect:e})")));
        }
        Ok(t)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    fn idx(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.dim + j) * self.dim + k
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.c[self.idx(i, j, k)]
    }

    pub fn get_exact(&self, i: usize, j: usize, k: usize) -> Option<&BigRational> {
        self.exact.as_ref().map(|e| &e[self.idx(i, j, k)])
    }

    pub fn get_scalar(&self, i: usize, j: usize, k: usize) -> Scalar {
        match self.get_exact(i, j, k) {
            Some(q) => Scalar::Exact(q.clone()),
            None => Scalar::Float(self.get(i, j, k)),
        }
    }

    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }

    pub fn exact_values(&self) -> Option<&[BigRational]> {
        self.exact.as_deref()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.c
    }

    pub fn max_abs(&self) -> f64 {
        self.c.iter().fold(0.0, |a, x| a.max(x.abs()))
    }

    pub fn is_abelian(&self) -> bool {
        self.c.iter().all(|x| *x == 0.0)
    }

    pub fn antisymmetry_defect(&self) -> f64 {
        let n = self.dim;
        let mut d: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    d = d.max((self.get(i, j, k) + self.get(j, i, k)).abs());
                }
            }
        }
        d
    }

    /// Coordinates of `[x, y]`.
    pub fn bracket(&self, x: &Vector, y: &Vector) -> Vector {
        let n = self.dim;
        let mut out = Vector::zeros(n);
        for i in 0..n {
            if x[i] == 0.0 {
                continue;
            }
            for j in 0..n {
                let w = x[i] * y[j];
                if w == 0.0 {
                    continue;
                }
                for k in 0..n {
                    out[k] += w * self.get(i, j, k);
                }
            }
        }
        out
    }

    /// `[e_i, e_j]` as a coordinate vector.
    pub fn bracket_basis(&self, i: usize, j: usize) -> Vector {
        Vector::from_iterator(self.dim, (0..self.dim).map(|k| self.get(i, j, k)))
    }

    /// Structure constants in the basis given by the columns of `p`.
    pub fn change_basis(&self, p: &Mat) -> Result<StructureTensor> {
        let n = self.dim;
        if p.nrows() != n || p.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n, got: p.nrows().max(p.ncols()) });
        }
        let p_inv = p
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::Validation("change of basis is singular".into()))?;
        let cols: Vec<Vector> = (0..n).map(|i| p.column(i).into_owned()).collect();
        let mut c = vec![0.0; n * n * n];
        for i in 0..n {
            for j in 0..n {
                let old = self.bracket(&cols[i], &cols[j]);
                let new = &p_inv * old;
                for k in 0..n {
                    c[(i * n + j) * n + k] = new[k];
                }
            }
        }
        // Exactly antisymmetrize away rounding noise.
        for i in 0..n {
            for j in (i + 1)..n {
                for k in 0..n {
                    let a = 0.5 * (c[(i * n + j) * n + k] - c[(j * n + i) * n + k]);
                    c[(i * n + j) * n + k] = a;
                    c[(j * n + i) * n + k] = -a;
                }
            }
            for k in 0..n {
                c[(i * n + i) * n + k] = 0.0;
            }
        }
        Ok(StructureTensor { dim: n, c, exact: None })
    }

    /// Relabels basis vectors: new basis vector `r` is old basis vector `order[r]`.
    /// Exactness is preserved.
    pub fn permute(&self, order: &[usize]) -> Result<StructureTensor> {
        let n = self.dim;
        let mut seen = vec![false; n];
        if order.len() != n || order.iter().any(|&o| o >= n || std::mem::replace(&mut seen[o], true)) {
            return Err(Error::Validation("order is not a permutation".into()));
        }
        let mut c = vec![0.0; n * n * n];
        let mut exact = self.exact.as_ref().map(|_| vec![BigRational::zero(); n * n * n]);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let new = (i * n + j) * n + k;
                    let old = self.idx(order[i], order[j], order[k]);
                    c[new] = self.c[old];
                    if let (Some(e), Some(src)) = (exact.as_mut(), self.exact.as_ref()) {
                        e[new] = src[old].clone();
                    }
                }
            }
        }
        Ok(StructureTensor { dim: n, c, exact })
    }

    /// `ad_{e_i}` as an `n × n` matrix (column `j` is `[e_i, e_j]`).
    pub fn ad_basis(&self, i: usize) -> Mat {
        let n = self.dim;
        DMatrix::from_fn(n, n, |k, j| self.get(i, j, k))
    }

    /// Exact `ad_{e_i}` entries, when available.
    pub fn ad_basis_exact(&self, i: usize) -> Option<Vec<Vec<BigRational>>> {
        let n = self.dim;
        let e = self.exact.as_ref()?;
        Some(
            (0..n)
                .map(|k| (0..n).map(|j| e[(i * n + j) * n + k].clone()).collect())
                .collect(),
        )
    }
}

fn scalars_equal(a: &Scalar, b: &Scalar) -> bool {
    match (a, b) {
        (Scalar::Exact(x), Scalar::Exact(y)) => x == y,
        _ => a.to_f64() == b.to_f64(),
    }
}
