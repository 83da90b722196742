//! Executable checks of the structural statements attached to QE solutions.

use serde::Serialize;

use crate::algebra::{
    center, derived_algebra, nilradical_solvable, normality_defect, second_center, MetricLieAlgebra,
    Subspace,
};
use crate::curvature::ricci_oracle;
use crate::error::{Error, Result};
use crate::linalg::{cluster_eigenvalues, from_columns, g_orthonormalize, max_abs, null_space, Mat, Vector, CLUSTER_REL_GAP};

use super::{nontrivial, qe_solve, QESolution};

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub residual: f64,
    pub tolerance: f64,
    /// What was compared.
    pub quantity: String,
    /// The statement being checked.
    pub statement: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerdictReport {
    pub title: String,
    /// False when the hypotheses do not hold and the checks are vacuous.
    pub applicable: bool,
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
}

impl VerdictReport {
    fn new(title: &str) -> Self {
        VerdictReport { title: title.into(), applicable: true, checks: Vec::new(), notes: Vec::new() }
    }

    fn check(&mut self, name: &str, residual: f64, tolerance: f64, quantity: &str, statement: &str) {
        self.push(name, residual <= tolerance, residual, tolerance, quantity, statement);
    }

    fn push(&mut self, name: &str, passed: bool, residual: f64, tolerance: f64, quantity: &str, statement: &str) {
        self.checks.push(Check {
            name: name.into(),
            passed,
            residual,
            tolerance,
            quantity: quantity.into(),
            statement: statement.into(),
        });
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failed(&self) -> Vec<&str> {
        self.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect()
    }
}

fn g_norm(l: &MetricLieAlgebra, v: &Vector) -> f64 {
    l.inner(v, v).max(0.0).sqrt()
}

/// Spectrum pattern and center checks for a nilpotent solution with `X ≠ 0`.
pub fn verify_two_eigenvalue_structure(l: &MetricLieAlgebra, sol: &QESolution, tol: f64) -> Result<VerdictReport> {
    let mut rep = VerdictReport::new("two-eigenvalue structure");
    if sol.flags.einstein {
        rep.applicable = false;
        rep.notes.push("X = 0: the structure checks are vacuous".into());
        return Ok(rep);
    }
    let n = l.dim();
    let ric = ricci_oracle(l, tol)?;
    let clusters = cluster_eigenvalues(&ric.eigenvalues, CLUSTER_REL_GAP);
    let mut lens: Vec<usize> = clusters.iter().map(|c| c.len).collect();
    lens.sort_unstable();
    let spread = clusters
        .iter()
        .map(|c| {
            let vals = &ric.eigenvalues[c.start..c.start + c.len];
            vals.iter().map(|v| (v - c.value).abs()).fold(0.0, f64::max)
        })
        .fold(0.0, f64::max);
    let pattern_ok = lens == vec![1, n - 1];
    rep.push(
        "multiplicities",
        pattern_ok,
        spread,
        tol,
        &format!("Ricci cluster sizes {lens:?}"),
        "Ricci has one simple eigenvalue and one of multiplicity n-1",
    );
    let abelian = l.structure().is_abelian();
    rep.push(
        "lambda-negative",
        abelian || sol.lambda < -tol,
        sol.lambda.max(0.0),
        tol,
        &format!("lambda = {}", sol.lambda),
        "lambda < 0 for a non-abelian nilpotent algebra",
    );
    let xn = g_norm(l, &sol.x);
    let ad_x = l.ad(&(&sol.x / xn))?;
    rep.check("x-central", max_abs(&ad_x), tol, "max |ad_X| / |X|", "X lies in the center");
    let z = center(l, tol);
    rep.check(
        "center-dim",
        (z.dim() as f64 - 1.0).abs(),
        0.0,
        &format!("dim center = {}", z.dim()),
        "the center is one-dimensional",
    );
    let d = derived_algebra(l, tol);
    rep.check(
        "center-in-derived",
        d.containment_residual(&z),
        tol,
        "distance of unit central vectors from [n,n]",
        "the center lies in [n,n]",
    );
    Ok(rep)
}

/// Orthonormal frame `(x, y, z, w…)` for a nilpotent algebra with
/// one-dimensional center: `z` spans the center, `y` is taken from the second
/// center orthogonal to `z`, and `x` is the unit normal of the centralizer of `y`
/// with sign chosen so that `g([x,y], z) > 0`.
pub fn kirillov_frame(l: &MetricLieAlgebra, tol: f64) -> Result<Mat> {
    let n = l.dim();
    let g = l.gram();
    let z_sub = center(l, tol);
    if z_sub.dim() != 1 || n < 3 {
        return Err(Error::BadPartition(format!("center has dimension {}, need 1", z_sub.dim())));
    }
    let z = z_sub.g_orthonormal_basis(g).column(0).into_owned();
    let z2 = second_center(l, tol);
    let y_space = z2.intersection(&z_sub.g_complement(g, tol), tol);
    if y_space.is_zero() {
        return Err(Error::BadPartition("second center equals the center".into()));
    }
    let y = y_space.vectors()[0].clone();
    let y = &y / g_norm(l, &y);
    // centralizer of y = ker ad_y
    let centralizer = Subspace::span(&null_space(&l.ad(&y)?, tol), tol);
    let normal = centralizer.g_complement(g, tol);
    if normal.dim() != 1 {
        return Err(Error::BadPartition(format!("centralizer of y has codimension {}", normal.dim())));
    }
    let mut x = normal.vectors()[0].clone();
    x /= g_norm(l, &x);
    if l.inner(&l.bracket(&x, &y), &z) < 0.0 {
        x = -x;
    }
    let xyz = Subspace::span_vectors(n, &[x.clone(), y.clone(), z.clone()], tol);
    let w = xyz.g_complement(g, tol).g_orthonormal_basis(g);
    let mut cols = vec![x, y, z];
    cols.extend(w.column_iter().map(|c| c.into_owned()));
    Ok(from_columns(n, &cols))
}

/// Checks `[x,y] = c z`, `[x,w] = [y,w] = 0`, `[w_i,w_j] ∈ W ⊕ span(z)` and
/// `λ = −c²/2` for an orthonormal frame ordered `(x, y, z, w₁, …)`.
pub fn verify_nilpotent_structure_theorem(l: &MetricLieAlgebra, basis: &Mat, tol: f64) -> Result<VerdictReport> {
    let n = l.dim();
    if basis.nrows() != n || basis.ncols() != n || n < 3 {
        return Err(Error::BadPartition(format!("need a {n}x{n} frame with n >= 3")));
    }
    let ortho = max_abs(&(basis.transpose() * l.gram() * basis - Mat::identity(n, n)));
    if ortho > tol.sqrt() {
        return Err(Error::BadPartition(format!("frame is not orthonormal (defect {ortho:e})")));
    }
    let col = |i: usize| basis.column(i).into_owned();
    let (x, y, z) = (col(0), col(1), col(2));
    let ws: Vec<Vector> = (3..n).map(col).collect();
    let mut rep = VerdictReport::new("nilpotent structure theorem");
    let xy = l.bracket(&x, &y);
    let c = l.inner(&xy, &z);
    rep.check("xy-bracket", g_norm(l, &(&xy - &z * c)), tol, &format!("|[x,y] - c z| with c = {c}"), "[x,y] = c z");
    let mut xw: f64 = 0.0;
    let mut yw: f64 = 0.0;
    let mut ww: f64 = 0.0;
    for (i, w) in ws.iter().enumerate() {
        xw = xw.max(g_norm(l, &l.bracket(&x, w)));
        yw = yw.max(g_norm(l, &l.bracket(&y, w)));
        for w2 in &ws[i + 1..] {
            let b = l.bracket(w, w2);
            ww = ww.max(l.inner(&b, &x).abs()).max(l.inner(&b, &y).abs());
        }
    }
    rep.check("xw-bracket", xw, tol, "max |[x,w_i]|", "[x,w_i] = 0");
    rep.check("yw-bracket", yw, tol, "max |[y,w_i]|", "[y,w_i] = 0");
    rep.check("ww-bracket", ww, tol, "max component of [w_i,w_j] along x, y", "[w_i,w_j] lies in W + span(z)");
    let zc = center(l, tol);
    let z_res = if zc.dim() == 1 { zc.distance(&Subspace::span_vectors(n, &[z.clone()], tol)) } else { 1.0 };
    rep.check("z-center", z_res, tol, &format!("dim center = {}", zc.dim()), "z spans the center");
    let sols = qe_solve(l, 1.0, tol)?;
    match nontrivial(&sols).first() {
        Some(s) => rep.check(
            "lambda-kirillov",
            (s.lambda + 0.5 * c * c).abs(),
            tol,
            &format!("lambda = {}, -c^2/2 = {}", s.lambda, -0.5 * c * c),
            "lambda = -c^2/2",
        ),
        None => {
            rep.push("lambda-kirillov", false, f64::INFINITY, tol, "qe_solve (m = 1) found no solution", "lambda = -c^2/2");
        }
    }
    Ok(rep)
}

/// Coordinates of the vectors of `sub` (columns of its canonical basis).
fn restricted_matrix(l: &MetricLieAlgebra, op: &Mat, onb: &Mat) -> Mat {
    // onb is g-orthonormal, so coordinates are g-inner products.
    onb.transpose() * l.gram() * op * onb
}

/// Conditions (i)–(iv) for a unimodular solvable algebra split as
/// `𝔞 ⊕ 𝔫` with `𝔫` the nilradical.
pub fn verify_solvable_conditions(l: &MetricLieAlgebra, a: &Subspace, n_sub: &Subspace, m: f64, tol: f64) -> Result<VerdictReport> {
    let dim = l.dim();
    let g = l.gram();
    if a.dim() + n_sub.dim() != dim || a.g_orthogonality_residual(n_sub, g) > tol {
        return Err(Error::SplitInvalid("need an orthogonal split a + n".into()));
    }
    let nil = nilradical_solvable(l, tol)?;
    if !nil.equals(n_sub, tol.sqrt()) {
        return Err(Error::SplitInvalid("n is not the nilradical".into()));
    }
    let a_onb = a.g_orthonormal_basis(g);
    let n_onb = n_sub.g_orthonormal_basis(g);
    let a_vecs: Vec<Vector> = a_onb.column_iter().map(|c| c.into_owned()).collect();
    // basis vectors and pairwise sums span the quadratic form on 𝔞
    let mut probes: Vec<Vector> = a_vecs.clone();
    for i in 0..a_vecs.len() {
        for j in (i + 1)..a_vecs.len() {
            probes.push(&a_vecs[i] + &a_vecs[j]);
        }
    }
    let blocks: Vec<Mat> = probes
        .iter()
        .map(|p| Ok(restricted_matrix(l, &l.ad(p)?, &n_onb)))
        .collect::<Result<_>>()?;
    let ident = Mat::identity(n_onb.ncols(), n_onb.ncols());
    for b in &blocks {
        let d = normality_defect(b, &ident)?;
        if d > tol * b.norm_squared().max(1.0) {
            return Err(Error::AdANotNormal);
        }
    }

    let mut rep = VerdictReport::new("solvable structure conditions");
    // (i)
    let nil_alg = l.restrict(n_sub, tol)?;
    let nil_sols = qe_solve(&nil_alg, m, tol)?;
    let lambda_star = nontrivial(&nil_sols).first().map(|s| s.lambda).or(nil_sols.first().map(|s| s.lambda));
    let s_sols = qe_solve(l, m, tol)?;
    let s_lambda = s_sols.first().map(|s| s.lambda);
    match lambda_star {
        Some(ls) => {
            let res = s_lambda.map_or(0.0, |sl| (sl - ls).abs());
            let quantity = match s_lambda {
                Some(sl) => format!("lambda(n) = {ls}, lambda(s) = {sl}"),
                None => format!("lambda(n) = {ls}; no solution on s to compare"),
            };
            rep.check("i-nilradical-qe", res, tol, &quantity, "(n, g|n) is quasi-Einstein with the same lambda");
        }
        None => rep.push(
            "i-nilradical-qe",
            false,
            f64::INFINITY,
            tol,
            "qe_solve on (n, g|n) found no solution",
            "(n, g|n) is quasi-Einstein with the same lambda",
        ),
    }
    // (ii)
    let aa = a_vecs
        .iter()
        .enumerate()
        .flat_map(|(i, u)| a_vecs[i + 1..].iter().map(move |v| (u, v)))
        .map(|(u, v)| g_norm(l, &l.bracket(u, v)))
        .fold(0.0, f64::max);
    rep.check("ii-a-abelian", aa, tol, "max |[a_i,a_j]|", "[a,a] = 0");
    // (iii)
    let zs = center(l, tol);
    let zn_local = center(&nil_alg, tol);
    let zn = Subspace::span(&(n_sub.basis() * zn_local.basis()), tol);
    rep.check(
        "iii-centers",
        if zs.dim() == zn.dim() { zs.distance(&zn) } else { 1.0 },
        tol,
        &format!("dim z(s) = {}, dim z(n) = {}", zs.dim(), zn.dim()),
        "z(s) = z(n)",
    );
    // (iv)
    match lambda_star {
        Some(ls) if ls != 0.0 => {
            let mut worst: f64 = 0.0;
            for (p, b) in probes.iter().zip(&blocks) {
                let s = (b + b.transpose()) * 0.5;
                let target = -(&s * &s).trace() / ls;
                worst = worst.max((l.inner(p, p) - target).abs());
            }
            rep.check(
                "iv-metric-on-a",
                worst,
                tol,
                "max |g(a,a) + tr(S(ad_a)^2)/lambda| over a basis of a and pair sums",
                "g(a,a) = -(1/lambda) tr S(ad_a)^2",
            );
        }
        _ => rep.push(
            "iv-metric-on-a",
            false,
            f64::INFINITY,
            tol,
            "lambda of the nilradical is unavailable or zero",
            "g(a,a) = -(1/lambda) tr S(ad_a)^2",
        ),
    }
    Ok(rep)
}

/// Checks that each `ad_a|𝔫` is diagonal with pattern `(t₁, −t₁, …, t_s, −t_s, 0)`
/// in the Heisenberg frame `(x₁, y₁, …, x_s, y_s, z)` given by the columns of
/// `heis_basis`, and that `dim 𝔞 ≤ s`.
pub fn verify_heisenberg_extension_form(
    l: &MetricLieAlgebra,
    a: &Subspace,
    n_sub: &Subspace,
    heis_basis: &Mat,
    tol: f64,
) -> Result<VerdictReport> {
    let g = l.gram();
    let k = heis_basis.ncols();
    if k < 3 || k % 2 == 0 || heis_basis.nrows() != l.dim() {
        return Err(Error::BasisNotHeisenberg(format!("{k} columns cannot form a Heisenberg frame")));
    }
    let s = (k - 1) / 2;
    let ortho = max_abs(&(heis_basis.transpose() * g * heis_basis - Mat::identity(k, k)));
    if ortho > tol.sqrt() {
        return Err(Error::BasisNotHeisenberg(format!("frame not orthonormal (defect {ortho:e})")));
    }
    let cols: Vec<Vector> = heis_basis.column_iter().map(|c| c.into_owned()).collect();
    let frame_sub = Subspace::span_vectors(l.dim(), &cols, tol);
    if !frame_sub.equals(n_sub, tol.sqrt()) {
        return Err(Error::BasisNotHeisenberg("frame does not span n".into()));
    }
    let z = &cols[k - 1];
    let c = l.inner(&l.bracket(&cols[0], &cols[1]), z);
    if c.abs() <= tol {
        return Err(Error::BasisNotHeisenberg("[x1,y1] has no z component".into()));
    }
    let mut worst: f64 = 0.0;
    for i in 0..k {
        for j in (i + 1)..k {
            let expected = if i % 2 == 0 && j == i + 1 && j < k - 1 { z * c } else { Vector::zeros(l.dim()) };
            worst = worst.max(g_norm(l, &(l.bracket(&cols[i], &cols[j]) - expected)));
        }
    }
    if worst > tol.sqrt() {
        return Err(Error::BasisNotHeisenberg(format!("bracket defect {worst:e}")));
    }

    let mut rep = VerdictReport::new("Heisenberg extension form");
    let a_onb = g_orthonormalize(a.basis(), g, tol);
    let mut off: f64 = 0.0;
    let mut pattern: f64 = 0.0;
    let mut zcol: f64 = 0.0;
    for av in a_onb.column_iter() {
        let d = restricted_matrix(l, &l.ad(&av.into_owned())?, heis_basis);
        for r in 0..k {
            for cc in 0..k {
                if r != cc {
                    off = off.max(d[(r, cc)].abs());
                }
            }
            zcol = zcol.max(d[(r, k - 1)].abs());
        }
        for i in 0..s {
            pattern = pattern.max((d[(2 * i, 2 * i)] + d[(2 * i + 1, 2 * i + 1)]).abs());
        }
    }
    rep.check("diagonal", off, tol, "max off-diagonal |ad_a|n|", "ad_a|n is diagonal in the Heisenberg frame");
    rep.check("z-column", zcol, tol, "max |ad_a z|", "the z column of ad_a|n is zero");
    rep.check("pattern", pattern, tol, "max |t_i + (-t_i)| over pairs (x_i, y_i)", "diagonal has the form (t, -t, ..., 0)");
    let excess = a.dim().saturating_sub(s) as f64;
    rep.check("dim-bound", excess, 0.0, &format!("dim a = {}, s = {s}", a.dim()), "dim a <= s");
    Ok(rep)
}
