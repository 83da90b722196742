//! Ricci curvature of left-invariant metrics.
//!
//! Every formula runs in the Cholesky frame of the declared basis and the
//! result is written back as a bilinear form in the declared basis.

use serde::Serialize;

use crate::algebra::{
    center, derived_algebra, is_nilpotent, is_solvable, is_unimodular, nilradical_solvable, MetricLieAlgebra,
    StructureTensor, Subspace,
};
use crate::error::{Error, Result};
use crate::linalg::{max_abs, rows_of, sym_eigen_sorted, Mat, Vector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    Oracle,
    NilpotentFormula,
    SolvableFormula,
    StandardSplit,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::Oracle => "oracle",
            Provenance::NilpotentFormula => "nilpotent-formula",
            Provenance::SolvableFormula => "solvable-formula",
            Provenance::StandardSplit => "standard-split",
        }
    }
}

/// Levi-Civita coefficients in an orthonormal frame:
/// `∇_{e_i} e_j = Σ_k gamma[i][j][k] e_k`.
#[derive(Debug, Clone)]
pub struct ConnectionCoefficients {
    dim: usize,
    gamma: Vec<f64>,
}

impl ConnectionCoefficients {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.gamma[(i * self.dim + j) * self.dim + k]
    }

    /// Matrix of `∇_{e_i}` acting on coordinate vectors.
    pub fn nabla(&self, i: usize) -> Mat {
        Mat::from_fn(self.dim, self.dim, |k, j| self.get(i, j, k))
    }

    /// `max |Γ[i][j][k] + Γ[i][k][j]|`.
    pub fn metric_defect(&self) -> f64 {
        let n = self.dim;
        let mut d: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    d = d.max((self.get(i, j, k) + self.get(i, k, j)).abs());
                }
            }
        }
        d
    }

    /// `max |Γ[i][j][k] − Γ[j][i][k] − c[i][j][k]|`.
    pub fn torsion_defect(&self, st: &StructureTensor) -> f64 {
        let n = self.dim;
        let mut d: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    d = d.max((self.get(i, j, k) - self.get(j, i, k) - st.get(i, j, k)).abs());
                }
            }
        }
        d
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CurvatureReport {
    /// Ricci form in the declared basis.
    #[serde(serialize_with = "ser_mat")]
    pub ricci: Mat,
    /// Eigenvalues of the Ricci operator `G⁻¹ Ric`, ascending.
    pub eigenvalues: Vec<f64>,
    /// Matching eigenvectors (declared coordinates, g-orthonormal columns).
    #[serde(serialize_with = "ser_mat_columns")]
    pub eigenvectors: Mat,
    pub scalar: f64,
    pub flat: bool,
    /// Frobenius norm of the full curvature tensor in an orthonormal frame.
    pub curvature_norm: f64,
    pub provenance: Provenance,
}

fn ser_mat<S: serde::Serializer>(m: &Mat, s: S) -> std::result::Result<S::Ok, S::Error> {
    rows_of(m).serialize(s)
}

fn ser_mat_columns<S: serde::Serializer>(m: &Mat, s: S) -> std::result::Result<S::Ok, S::Error> {
    rows_of(&m.transpose()).serialize(s)
}

/// Koszul formula for an algebra with identity Gram.
pub fn connection_coefficients(frame: &MetricLieAlgebra) -> ConnectionCoefficients {
    let st = frame.structure();
    let n = st.dim();
    let mut gamma = vec![0.0; n * n * n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                gamma[(i * n + j) * n + k] = 0.5 * (st.get(i, j, k) - st.get(j, k, i) + st.get(k, i, j));
            }
        }
    }
    ConnectionCoefficients { dim: n, gamma }
}

/// Curvature operators `R(e_i, e_j)` for `i < j` in the frame, plus the Ricci form.
fn frame_curvature(frame: &MetricLieAlgebra) -> (Mat, f64) {
    let st = frame.structure();
    let n = st.dim();
    let conn = connection_coefficients(frame);
    let nabla: Vec<Mat> = (0..n).map(|i| conn.nabla(i)).collect();
    let mut ric = Mat::zeros(n, n);
    let mut norm2 = 0.0;
    for i in 0..n {
        for u in 0..n {
            if i == u {
                continue;
            }
            let mut r = &nabla[i] * &nabla[u] - &nabla[u] * &nabla[i];
            for l in 0..n {
                let c = st.get(i, u, l);
                if c != 0.0 {
                    r -= &nabla[l] * c;
                }
            }
            norm2 += r.norm_squared();
            // Ric(u, v) = Σ_i g(R(e_i, e_u) e_v, e_i)
            for v in 0..n {
                ric[(u, v)] += r[(i, v)];
            }
        }
    }
    (symmetrize(&ric), norm2.sqrt())
}

fn symmetrize(m: &Mat) -> Mat {
    (m + m.transpose()) * 0.5
}

fn flat_threshold(frame: &MetricLieAlgebra, tol: f64) -> f64 {
    tol * frame.structure().max_abs().powi(2).max(1.0)
}

/// Assembles a report from a Ricci form computed in the frame `Q`.
fn report(q: &Mat, frame: &MetricLieAlgebra, ric_frame: Mat, provenance: Provenance, tol: f64) -> Result<CurvatureReport> {
    let ric_frame = symmetrize(&ric_frame);
    let q_inv = q.clone().try_inverse().ok_or(Error::GramNotPositiveDefinite)?;
    let ricci = symmetrize(&(q_inv.transpose() * &ric_frame * &q_inv));
    let (eigenvalues, u) = sym_eigen_sorted(&ric_frame);
    let eigenvectors = q * u;
    let scalar = ric_frame.trace();
    let (_, curvature_norm) = frame_curvature(frame);
    Ok(CurvatureReport {
        ricci,
        eigenvalues,
        eigenvectors,
        scalar,
        flat: curvature_norm <= flat_threshold(frame, tol),
        curvature_norm,
        provenance,
    })
}

/// Ricci curvature from the full curvature tensor of the Levi-Civita connection.
pub fn ricci_oracle(l: &MetricLieAlgebra, tol: f64) -> Result<CurvatureReport> {
    let (q, frame) = l.orthonormal_frame()?;
    let (ric, _) = frame_curvature(&frame);
    report(&q, &frame, ric, Provenance::Oracle, tol)
}

/// Scalar curvature and flatness (full curvature tensor below `tol`).
pub fn scalar_and_flatness(l: &MetricLieAlgebra, tol: f64) -> Result<(f64, bool)> {
    let r = ricci_oracle(l, tol)?;
    Ok((r.scalar, r.flat))
}

/// Symmetric matrix of the quadratic form `q` by polarization.
fn polarize(n: usize, q: impl Fn(&Vector) -> f64) -> Mat {
    let e = |i: usize| {
        let mut v = Vector::zeros(n);
        v[i] = 1.0;
        v
    };
    let mut m = Mat::zeros(n, n);
    for u in 0..n {
        m[(u, u)] = q(&e(u));
        for v in (u + 1)..n {
            let val = 0.25 * (q(&(e(u) + e(v))) - q(&(e(u) - e(v))));
            m[(u, v)] = val;
            m[(v, u)] = val;
        }
    }
    m
}

/// `Ric(x,x) = −½ Σ_k |[x,e_k]|² + ¼ Σ_{k,j} g([e_k,e_j],x)²`, for nilpotent algebras.
pub fn ricci_nilpotent(l: &MetricLieAlgebra, tol: f64) -> Result<CurvatureReport> {
    if !is_nilpotent(l, tol) {
        return Err(Error::NotNilpotent);
    }
    let (q, frame) = l.orthonormal_frame()?;
    let n = frame.dim();
    let st = frame.structure();
    let quad = |x: &Vector| {
        let ad = frame.ad(x).expect("dimension checked");
        let mut s = -0.5 * ad.norm_squared();
        for k in 0..n {
            for j in 0..n {
                let g: f64 = (0..n).map(|r| st.get(k, j, r) * x[r]).sum();
                s += 0.25 * g * g;
            }
        }
        s
    };
    report(&q, &frame, polarize(n, quad), Provenance::NilpotentFormula, tol)
}

/// Unimodular solvable formula on the split `[𝔰,𝔰] ⊕ [𝔰,𝔰]^⊥`.
pub fn ricci_unimodular_solvable(l: &MetricLieAlgebra, tol: f64) -> Result<CurvatureReport> {
    if !is_unimodular(l, tol) {
        return Err(Error::NotUnimodular);
    }
    if !is_solvable(l, tol) {
        return Err(Error::NotSolvable);
    }
    let (q, frame) = l.orthonormal_frame()?;
    let n = frame.dim();
    let st = frame.structure();
    let h_basis = derived_algebra(&frame, tol).orthonormal_basis();
    let proj_h = &h_basis * h_basis.transpose();
    let quad = |v: &Vector| {
        let h = &proj_h * v;
        let f = v - &h;
        let ad_h = frame.ad(&h).expect("dimension checked");
        let ad_f = frame.ad(&f).expect("dimension checked");
        let mut hh = -0.5 * (ad_h.transpose() * &ad_h).trace();
        for i in 0..n {
            for j in (i + 1)..n {
                let g: f64 = (0..n).map(|r| st.get(i, j, r) * h[r]).sum();
                hh += 0.5 * g * g;
            }
        }
        let sym = &ad_f + ad_f.transpose();
        let ff = -0.25 * (&sym * &sym).trace();
        let cross = -(ad_h.transpose() * &ad_f).trace();
        hh + ff + cross
    };
    report(&q, &frame, polarize(n, quad), Provenance::SolvableFormula, tol)
}

/// Formulas for a split `𝔰 = 𝔞 ⊕ 𝔫` with `𝔞 ⊥ 𝔫` and `𝔫` the nilradical,
/// including the mean-curvature terms.
pub fn ricci_standard_split(l: &MetricLieAlgebra, a: &Subspace, n_sub: &Subspace, tol: f64) -> Result<CurvatureReport> {
    let dim = l.dim();
    if a.dim() + n_sub.dim() != dim {
        return Err(Error::SplitInvalid(format!(
            "dimensions {} + {} do not add up to {dim}",
            a.dim(),
            n_sub.dim()
        )));
    }
    if a.g_orthogonality_residual(n_sub, l.gram()) > tol {
        return Err(Error::SplitInvalid("𝔞 is not orthogonal to 𝔫".into()));
    }
    let nil = nilradical_solvable(l, tol).map_err(|e| Error::SplitInvalid(format!("no nilradical: {e}")))?;
    if !nil.equals(n_sub, tol.sqrt()) {
        return Err(Error::SplitInvalid(format!(
            "𝔫 (dim {}) is not the nilradical (dim {})",
            n_sub.dim(),
            nil.dim()
        )));
    }
    // Orthonormal basis with 𝔞 first.
    let pa = a.g_orthonormal_basis(l.gram());
    let pn = n_sub.g_orthonormal_basis(l.gram());
    let p = Mat::from_fn(dim, dim, |r, c| if c < pa.ncols() { pa[(r, c)] } else { pn[(r, c - pa.ncols())] });
    let split = l.change_basis(&p, MetricLieAlgebra::default_labels(dim))?;
    let k = pa.ncols();
    let ric_split = standard_split_formulas(&split, k);
    // Back to the declared basis, then through the Cholesky frame for the report.
    let p_inv = p.clone().try_inverse().ok_or(Error::GramNotPositiveDefinite)?;
    let ric_declared = p_inv.transpose() * ric_split * &p_inv;
    let (q, frame) = l.orthonormal_frame()?;
    let ric_frame = q.transpose() * ric_declared * &q;
    report(&q, &frame, ric_frame, Provenance::StandardSplit, tol)
}

/// `s` has identity Gram; coordinates `0..k` span 𝔞, the rest span 𝔫.
fn standard_split_formulas(s: &MetricLieAlgebra, k: usize) -> Mat {
    let n = s.dim();
    let st = s.structure();
    let nn = n - k;
    let e = |i: usize| s.basis_vector(i);
    // A_i = ad_{a_i} restricted to 𝔫.
    let a_blocks: Vec<Mat> = (0..k).map(|i| s.ad_basis(i).view((k, k), (nn, nn)).into_owned()).collect();
    let mut h = Vector::zeros(n);
    for i in 0..k {
        h[i] = s.ad_basis(i).trace();
    }
    let ad_h = s.ad(&h).expect("dimension checked");
    let block = |v: &Vector| -> Mat { s.ad(v).expect("dimension checked").view((k, k), (nn, nn)).into_owned() };

    // Ric(a, a)
    let qa = |v: &Vector| {
        let mut x = Vector::zeros(n);
        x.rows_mut(0, k).copy_from(v);
        let mut r = 0.0;
        for i in 0..k {
            r -= 0.5 * s.bracket(&x, &e(i)).norm_squared();
        }
        let a = block(&x);
        let sym = (&a + a.transpose()) * 0.5;
        r - (&sym * &sym).trace()
    };
    let raa = polarize(k, qa);

    // Ric(x, x) for x ∈ 𝔫
    let qx = |v: &Vector| {
        let mut x = Vector::zeros(n);
        x.rows_mut(k, nn).copy_from(v);
        let mut r = 0.0;
        for i in 0..k {
            for j in 0..k {
                let g: f64 = (0..n).map(|t| st.get(i, j, t) * x[t]).sum();
                r += 0.25 * g * g;
            }
        }
        for ai in &a_blocks {
            let comm = ai * ai.transpose() - ai.transpose() * ai;
            r += 0.5 * (v.transpose() * comm * v)[(0, 0)];
        }
        for j in k..n {
            r -= 0.5 * s.bracket(&x, &e(j)).norm_squared();
        }
        for i in k..n {
            for j in k..n {
                let g: f64 = (0..n).map(|t| st.get(i, j, t) * x[t]).sum();
                r += 0.25 * g * g;
            }
        }
        r - s.inner(&(&ad_h * &x), &x)
    };
    let rxx = polarize(nn, qx);

    let mut ric = Mat::zeros(n, n);
    ric.view_mut((0, 0), (k, k)).copy_from(&raa);
    ric.view_mut((k, k), (nn, nn)).copy_from(&rxx);
    // Ric(a, x)
    for p in 0..k {
        let av = e(p);
        let a_blk = &a_blocks[p];
        for q in k..n {
            let xv = e(q);
            let mut r = 0.0;
            for i in 0..k {
                r -= 0.5 * s.inner(&s.bracket(&av, &e(i)), &s.bracket(&xv, &e(i)));
            }
            r -= 0.5 * (a_blk.transpose() * block(&xv)).trace();
            r -= 0.5 * s.inner(&(&ad_h * &av), &xv);
            ric[(p, q)] = r;
            ric[(q, p)] = r;
        }
    }
    ric
}

/// Which Ricci formula to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Formula {
    Oracle,
    Nilpotent,
    Solvable,
    Standard,
}

impl std::str::FromStr for Formula {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "oracle" => Ok(Formula::Oracle),
            "nilpotent" => Ok(Formula::Nilpotent),
            "solvable" => Ok(Formula::Solvable),
            "standard" => Ok(Formula::Standard),
            other => Err(Error::Validation(format!("unknown formula '{other}'"))),
        }
    }
}

/// The split `𝔞 = 𝔫^⊥, 𝔫 = nilradical` used when none is given.
pub fn default_split(l: &MetricLieAlgebra, tol: f64) -> Result<(Subspace, Subspace)> {
    let nil = nilradical_solvable(l, tol)?;
    Ok((nil.g_complement(l.gram(), tol), nil))
}

pub fn ricci(l: &MetricLieAlgebra, formula: Formula, tol: f64) -> Result<CurvatureReport> {
    match formula {
        Formula::Oracle => ricci_oracle(l, tol),
        Formula::Nilpotent => ricci_nilpotent(l, tol),
        Formula::Solvable => ricci_unimodular_solvable(l, tol),
        Formula::Standard => {
            let (a, n) = default_split(l, tol)?;
            ricci_standard_split(l, &a, &n, tol)
        }
    }
}

/// Largest |Ric(z, z)| violation of the sign lemmas: negative Ricci on unit
/// central vectors or positive Ricci on unit vectors orthogonal to `[𝔫,𝔫]`.
pub fn nilpotent_sign_violation(l: &MetricLieAlgebra, report: &CurvatureReport, tol: f64) -> f64 {
    let z = center(l, tol).g_orthonormal_basis(l.gram());
    let dn = derived_algebra(l, tol).g_complement(l.gram(), tol).g_orthonormal_basis(l.gram());
    let mut worst: f64 = 0.0;
    for c in z.column_iter() {
        let v = c.into_owned();
        worst = worst.max(-(v.transpose() * &report.ricci * &v)[(0, 0)]);
    }
    for c in dn.column_iter() {
        let v = c.into_owned();
        worst = worst.max((v.transpose() * &report.ricci * &v)[(0, 0)]);
    }
    worst.max(0.0)
}

/// Ricci operator `G⁻¹ Ric` of a report.
pub fn ricci_operator(l: &MetricLieAlgebra, report: &CurvatureReport) -> Result<Mat> {
    let g_inv = l.gram().clone().try_inverse().ok_or(Error::GramNotPositiveDefinite)?;
    Ok(g_inv * &report.ricci)
}

/// `max |Ric_a − Ric_b|` between two reports.
pub fn ricci_distance(a: &CurvatureReport, b: &CurvatureReport) -> f64 {
    max_abs(&(&a.ricci - &b.ricci))
}
