//! Constructors for the example families.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::algebra::{jacobi_residual, MetricLieAlgebra, StructureTensor};
use crate::error::{Error, Result};
use crate::linalg::{max_abs, rank, Mat};
use crate::qe::{nontrivial, qe_solve};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Expected {
    pub lambda: Option<f64>,
    pub center_dim: Option<usize>,
    pub nilpotent_step: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub name: String,
    /// Family name understood by [`from_family`].
    pub family: String,
    pub params: BTreeMap<String, Scalar>,
    pub algebra: MetricLieAlgebra,
    pub expected: Option<Expected>,
}

type Bracket = (usize, usize, usize, Scalar);

fn labels(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

fn nonzero(name: &str, v: &Scalar) -> Result<()> {
    if v.is_zero() {
        return Err(Error::BadParams(format!("{name} must be nonzero")));
    }
    Ok(())
}

fn sign(flip: bool, v: Scalar) -> Scalar {
    if flip {
        v.neg()
    } else {
        v
    }
}

fn half(v: &Scalar) -> Scalar {
    v.div(&Scalar::from(2)).expect("nonzero divisor")
}

/// `√(v/2)` where rounding may push a zero float radicand slightly negative.
fn half_root(v: &Scalar, scale: &Scalar) -> Option<Scalar> {
    let h = half(v);
    match h {
        Scalar::Float(x) if x < 0.0 && x.abs() <= 1e-12 * scale.to_f64().abs().max(1.0) => Some(Scalar::Float(0.0)),
        _ => h.sqrt(),
    }
}

fn params(pairs: &[(&str, &Scalar)]) -> BTreeMap<String, Scalar> {
    pairs.iter().map(|(k, v)| (k.to_string(), (*v).clone())).collect()
}

/// `𝔥_{2s+1}` with `[x_i, y_i] = c z`, identity Gram.
pub fn make_heisenberg(s: usize, c: impl Into<Scalar>) -> Result<CatalogEntry> {
    let c = c.into();
    if s == 0 {
        return Err(Error::BadParams("s must be at least 1".into()));
    }
    nonzero("c", &c)?;
    let n = 2 * s + 1;
    let mut names = Vec::with_capacity(n);
    let mut entries: Vec<Bracket> = Vec::new();
    for i in 1..=s {
        names.push(format!("x{i}"));
        names.push(format!("y{i}"));
        entries.push((2 * i - 2, 2 * i - 1, n - 1, c.clone()));
    }
    names.push("z".into());
    let st = StructureTensor::from_entries(n, &entries)?;
    let algebra = MetricLieAlgebra::with_identity(names, st)?;
    let cf = c.to_f64();
    Ok(CatalogEntry {
        name: format!("h{n}"),
        family: "heisenberg".into(),
        params: params(&[("s", &Scalar::from(s as i64)), ("c", &c)]),
        algebra,
        expected: Some(Expected { lambda: Some(-0.5 * cf * cf), center_dim: Some(1), nilpotent_step: Some(2) }),
    })
}

/// Sign flips for the four `n6a` bracket coefficients, in the order
/// `a w3` and `b12 z` in `[w1,w2]`, then `[w1,w3]`, `[w2,w3]`.
pub type N6aSigns = [bool; 4];

pub fn make_n6a(a: impl Into<Scalar>, c: impl Into<Scalar>) -> Result<CatalogEntry> {
    make_n6a_signed(a, c, [false; 4])
}

/// Basis `(x, y, z, w1, w2, w3)`:
/// `[x,y] = c z`, `[w1,w2] = a w3 + b12 z`, `[w1,w3] = [w2,w3] = b z`
/// with `b12 = √((c²−3a²)/2)` and `b = √((c²+a²)/2)`.
pub fn make_n6a_signed(a: impl Into<Scalar>, c: impl Into<Scalar>, flips: N6aSigns) -> Result<CatalogEntry> {
    let (a, c) = (a.into(), c.into());
    nonzero("a", &a)?;
    nonzero("c", &c)?;
    let c2 = c.mul(&c);
    let a2 = a.mul(&a);
    let b12 = half_root(&c2.sub(&Scalar::from(3).mul(&a2)), &c2)
        .ok_or_else(|| Error::BadParams("n6a needs c^2 >= 3 a^2".into()))?;
    let b = half(&c2.add(&a2)).sqrt().expect("sum of squares");
    let (x, y, z, w1, w2, w3) = (0, 1, 2, 3, 4, 5);
    let entries: Vec<Bracket> = vec![
        (x, y, z, c.clone()),
        (w1, w2, w3, sign(flips[0], a.clone())),
        (w1, w2, z, sign(flips[1], b12)),
        (w1, w3, z, sign(flips[2], b.clone())),
        (w2, w3, z, sign(flips[3], b)),
    ];
    let entries: Vec<Bracket> = entries.into_iter().filter(|e| !e.3.is_zero()).collect();
    let st = StructureTensor::from_entries(6, &entries)?;
    let algebra = MetricLieAlgebra::with_identity(labels(&["x", "y", "z", "w1", "w2", "w3"]), st)?;
    let cf = c.to_f64();
    Ok(CatalogEntry {
        name: "n6a".into(),
        family: "n6a".into(),
        params: params(&[("a", &a), ("c", &c)]),
        algebra,
        expected: Some(Expected { lambda: Some(-0.5 * cf * cf), center_dim: Some(1), nilpotent_step: Some(3) }),
    })
}

/// Sign flips for the seven `n7a` coefficients in the order
/// `[w1,w2]`, `[w1,w3]`, `[w1,w4]`, `d z` and `a w1` in `[w2,w4]`, `d z` and `a w1` in `[w3,w4]`.
pub type N7aSigns = [bool; 7];

pub fn make_n7a(a: impl Into<Scalar>, c: impl Into<Scalar>) -> Result<CatalogEntry> {
    make_n7a_signed(a, c, [false; 7])
}

/// Basis `(x, y, z, w1, w2, w3, w4)`:
/// `[x,y] = c z`, `[w1,w2] = [w1,w3] = b z`, `[w1,w4] = a z`,
/// `[w2,w4] = [w3,w4] = d z + a w1`, with `b = √((a²+c²)/2)`, `d = √((c²−3a²)/2)`.
///
/// Not every sign pattern is a Lie algebra: the Jacobi identity on
/// `(w2, w3, w4)` ties the signs of `[w1,w2]`, `[w1,w3]` and the two `a w1` terms,
/// so inconsistent patterns are rejected.
pub fn make_n7a_signed(a: impl Into<Scalar>, c: impl Into<Scalar>, flips: N7aSigns) -> Result<CatalogEntry> {
    let (a, c) = (a.into(), c.into());
    nonzero("a", &a)?;
    nonzero("c", &c)?;
    let c2 = c.mul(&c);
    let a2 = a.mul(&a);
    let d = half_root(&c2.sub(&Scalar::from(3).mul(&a2)), &c2)
        .ok_or_else(|| Error::BadParams("n7a needs (c/a)^2 >= 3".into()))?;
    let b = half(&c2.add(&a2)).sqrt().expect("sum of squares");
    let (x, y, z, w1, w2, w3, w4) = (0, 1, 2, 3, 4, 5, 6);
    let entries: Vec<Bracket> = vec![
        (x, y, z, c.clone()),
        (w1, w2, z, sign(flips[0], b.clone())),
        (w1, w3, z, sign(flips[1], b)),
        (w1, w4, z, sign(flips[2], a.clone())),
        (w2, w4, z, sign(flips[3], d.clone())),
        (w2, w4, w1, sign(flips[4], a.clone())),
        (w3, w4, z, sign(flips[5], d)),
        (w3, w4, w1, sign(flips[6], a.clone())),
    ];
    let entries: Vec<Bracket> = entries.into_iter().filter(|e| !e.3.is_zero()).collect();
    let st = StructureTensor::from_entries(7, &entries)?;
    let algebra = MetricLieAlgebra::with_identity(labels(&["x", "y", "z", "w1", "w2", "w3", "w4"]), st)?;
    let scale = c.to_f64().abs().max(a.to_f64().abs()).max(1.0);
    if jacobi_residual(&algebra) > 1e-12 * scale * scale {
        return Err(Error::BadParams("this sign pattern violates the Jacobi identity".into()));
    }
    let cf = c.to_f64();
    Ok(CatalogEntry {
        name: "n7a".into(),
        family: "n7a".into(),
        params: params(&[("a", &a), ("c", &c)]),
        algebra,
        expected: Some(Expected { lambda: Some(-0.5 * cf * cf), center_dim: Some(1), nilpotent_step: Some(3) }),
    })
}

/// `ℝᵏ ⊕ 𝔥_{2s+1}` where `a_j` acts by `diag(t_j1, −t_j1, …, t_js, −t_js, 0)`
/// on `(x1, y1, …, xs, ys, z)`. The Heisenberg factor has identity Gram, `𝔞 ⊥ 𝔫`,
/// and `g(a_i, a_j) = (4/c²) Σ_l t_il t_jl`.
pub fn make_heisenberg_extension(s: usize, c: impl Into<Scalar>, t_rows: &[Vec<Scalar>]) -> Result<CatalogEntry> {
    let c = c.into();
    nonzero("c", &c)?;
    let k = t_rows.len();
    if s == 0 || k == 0 || k > s {
        return Err(Error::BadParams(format!("need 1 <= k <= s, got k = {k}, s = {s}")));
    }
    if t_rows.iter().any(|r| r.len() != s) {
        return Err(Error::BadParams(format!("every row of t needs {s} entries")));
    }
    let t = Mat::from_fn(k, s, |i, j| t_rows[i][j].to_f64());
    if rank(&t, 1e-12) < k {
        return Err(Error::BadParams("rows of t are linearly dependent".into()));
    }
    let n = k + 2 * s + 1;
    let z = n - 1;
    let xi = |i: usize| k + 2 * i;
    let mut entries: Vec<Bracket> = Vec::new();
    for i in 0..s {
        entries.push((xi(i), xi(i) + 1, z, c.clone()));
        for (j, row) in t_rows.iter().enumerate() {
            if !row[i].is_zero() {
                entries.push((j, xi(i), xi(i), row[i].clone()));
                entries.push((j, xi(i) + 1, xi(i) + 1, row[i].neg()));
            }
        }
    }
    let st = StructureTensor::from_entries(n, &entries)?;
    let ads: Vec<Mat> = (0..k).map(|j| st.ad_basis(j)).collect();
    for i in 0..k {
        for j in (i + 1)..k {
            let comm = &ads[i] * &ads[j] - &ads[j] * &ads[i];
            if max_abs(&comm) > 1e-12 {
                return Err(Error::ActionsDoNotCommute);
            }
        }
    }
    let cf = c.to_f64();
    let mut gram = Mat::identity(n, n);
    let ablock = &t * t.transpose() * (4.0 / (cf * cf));
    gram.view_mut((0, 0), (k, k)).copy_from(&ablock);
    let mut names: Vec<String> = (1..=k).map(|j| format!("a{j}")).collect();
    for i in 1..=s {
        names.push(format!("x{i}"));
        names.push(format!("y{i}"));
    }
    names.push("z".into());
    let algebra = MetricLieAlgebra::new(names, st, gram)?;
    let mut p = BTreeMap::new();
    p.insert("s".to_string(), Scalar::from(s as i64));
    p.insert("c".to_string(), c.clone());
    if k > 1 {
        p.insert("k".to_string(), Scalar::from(k as i64));
    }
    for (j, row) in t_rows.iter().enumerate() {
        for (i, v) in row.iter().enumerate() {
            p.insert(format!("t{}{}", j + 1, i + 1), v.clone());
        }
    }
    let name = if k == 1 { format!("r+h{}", 2 * s + 1) } else { format!("r{k}+h{}", 2 * s + 1) };
    Ok(CatalogEntry {
        name,
        family: "heisenberg-extension".into(),
        params: p,
        algebra,
        expected: Some(Expected { lambda: Some(-0.5 * cf * cf), center_dim: Some(1), nilpotent_step: None }),
    })
}

/// `𝔴 ⊕ ℝe0` with `𝔴` abelian and `ad_{e0}|𝔴 = A`; basis `(e0, e1, …, en)`.
pub fn make_almost_abelian(a: &[Vec<Scalar>]) -> Result<CatalogEntry> {
    let n = a.len();
    if n == 0 || a.iter().any(|r| r.len() != n) {
        return Err(Error::BadParams("A must be a nonempty square matrix".into()));
    }
    let mut entries: Vec<Bracket> = Vec::new();
    for (i, row) in a.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            if !v.is_zero() {
                entries.push((0, j + 1, i + 1, v.clone()));
            }
        }
    }
    let st = StructureTensor::from_entries(n + 1, &entries)?;
    let names = (0..=n).map(|i| format!("e{i}")).collect();
    let algebra = MetricLieAlgebra::with_identity(names, st)?;
    let mut p = BTreeMap::new();
    p.insert("n".to_string(), Scalar::from(n as i64));
    for (i, row) in a.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            p.insert(format!("A{}{}", i + 1, j + 1), v.clone());
        }
    }
    let trace = (0..n).fold(Scalar::from(0), |acc, i| acc.add(&a[i][i]));
    p.insert("trace".to_string(), trace);
    Ok(CatalogEntry { name: format!("almost-abelian-{}", n + 1), family: "almost-abelian".into(), params: p, algebra, expected: None })
}

fn param(p: &BTreeMap<String, Scalar>, key: &str) -> Result<Scalar> {
    p.get(key).cloned().ok_or_else(|| Error::BadParams(format!("missing parameter '{key}'")))
}

fn param_usize(p: &BTreeMap<String, Scalar>, key: &str) -> Result<usize> {
    let v = param(p, key)?;
    match v.as_exact() {
        Some(q) if q.is_integer() && !v.is_negative() => {
            q.to_integer().try_into().map_err(|_| Error::BadParams(format!("'{key}' is too large")))
        }
        _ => Err(Error::BadParams(format!("'{key}' must be a nonnegative integer"))),
    }
}

fn param_or(p: &BTreeMap<String, Scalar>, key: &str, default: Scalar) -> Scalar {
    p.get(key).cloned().unwrap_or(default)
}

/// Builds a family member from named parameters (as used by the CLI and documents).
///
/// * `heisenberg`: `s`, `c` (default 1)
/// * `n6a`, `n7a`: `a`, `c`
/// * `heisenberg-extension`: `s`, `k`, `c`, and `t<j><i>` for row `j`, column `i`
/// * `almost-abelian`: `n` and `A<i><j>` (missing entries are 0)
pub fn from_family(family: &str, p: &BTreeMap<String, Scalar>) -> Result<CatalogEntry> {
    match family {
        "heisenberg" => make_heisenberg(param_usize(p, "s")?, param_or(p, "c", Scalar::from(1))),
        "n6a" => make_n6a(param(p, "a")?, param(p, "c")?),
        "n7a" => make_n7a(param(p, "a")?, param(p, "c")?),
        "heisenberg-extension" => {
            let s = param_usize(p, "s")?;
            let k = p.get("k").map(|_| param_usize(p, "k")).transpose()?.unwrap_or(1);
            let rows: Vec<Vec<Scalar>> = (1..=k)
                .map(|j| (1..=s).map(|i| param_or(p, &format!("t{j}{i}"), Scalar::from(0))).collect())
                .collect();
            make_heisenberg_extension(s, param_or(p, "c", Scalar::from(1)), &rows)
        }
        "almost-abelian" => {
            let n = param_usize(p, "n")?;
            let a: Vec<Vec<Scalar>> = (1..=n)
                .map(|i| (1..=n).map(|j| param_or(p, &format!("A{i}{j}"), Scalar::from(0))).collect())
                .collect();
            make_almost_abelian(&a)
        }
        other => Err(Error::BadParams(format!("unknown family '{other}'"))),
    }
}

#[derive(Debug, Clone)]
pub struct TableRow {
    /// 1 or 2 for the two classification tables, 0 for extra rows.
    pub table: u8,
    pub entry: CatalogEntry,
    /// Number of solutions with `X ≠ 0` found by `qe_solve` at `m = 1`.
    pub solutions_found: usize,
    pub lambda: Option<f64>,
    /// Whether the computed `λ` matches the entry's expected value.
    pub matches_expected: bool,
}

/// Canonical rows of both classification tables, plus the 7-dimensional
/// bi-extension, each cross-checked by `qe_solve` with `m = 1`.
pub fn tables_report(tol: f64) -> Result<Vec<TableRow>> {
    let one = || Scalar::from(1);
    let t1 = vec![make_heisenberg(1, 1)?, make_heisenberg(2, 1)?, make_n6a(1, 2)?];
    let t2 = vec![
        make_heisenberg(1, 1)?,
        make_heisenberg_extension(1, 1, &[vec![one()]])?,
        make_heisenberg(2, 1)?,
        make_heisenberg_extension(2, 1, &[vec![one(), one()]])?,
        make_n6a(1, 2)?,
    ];
    let extra = vec![make_heisenberg_extension(2, 1, &[vec![one(), Scalar::from(0)], vec![Scalar::from(0), one()]])?];
    let mut rows = Vec::new();
    for (table, entries) in [(1u8, t1), (2, t2), (0, extra)] {
        for entry in entries {
            let sols = qe_solve(&entry.algebra, 1.0, tol)?;
            let nt = nontrivial(&sols);
            let lambda = nt.first().map(|s| s.lambda);
            let expected = entry.expected.and_then(|e| e.lambda);
            let matches_expected = match (lambda, expected) {
                (Some(l), Some(e)) => (l - e).abs() <= tol.max(1e-9) * e.abs().max(1.0),
                _ => false,
            };
            rows.push(TableRow { table, entry, solutions_found: nt.len(), lambda, matches_expected });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{center, jacobi_residual_exact, series, SeriesKind, SeriesVerdict};
    use num_traits::Zero;

    #[test]
    fn heisenberg_shape() {
        let h = make_heisenberg(3, 2).unwrap();
        assert_eq!(h.algebra.dim(), 7);
        assert_eq!(h.name, "h7");
        assert!(jacobi_residual_exact(&h.algebra).unwrap().is_zero());
        assert_eq!(h.expected.unwrap().lambda, Some(-2.0));
        assert!(matches!(make_heisenberg(0, 1), Err(Error::BadParams(_))));
        assert!(matches!(make_heisenberg(1, 0), Err(Error::BadParams(_))));
    }

    #[test]
    fn n6a_constants() {
        let e = make_n6a(1, 2).unwrap();
        let st = e.algebra.structure();
        assert!((st.get(3, 4, 2) - 0.5f64.sqrt()).abs() < 1e-15);
        assert!((st.get(3, 5, 2) - 2.5f64.sqrt()).abs() < 1e-15);
        assert!((st.get(4, 5, 2) - 2.5f64.sqrt()).abs() < 1e-15);
        assert!(!st.is_exact());
        assert!(jacobi_residual(&e.algebra) < 1e-15);
        assert_eq!(center(&e.algebra, 1e-9).dim(), 1);
        assert_eq!(
            series(&e.algebra, SeriesKind::LowerCentral, 1e-9).verdict,
            SeriesVerdict::Nilpotent { step: 3 }
        );
        assert!(make_n6a(0, 1).is_err());
        assert!(make_n6a(1, 1).is_err());
    }

    #[test]
    fn n6a_any_sign_pattern_is_lie() {
        for mask in 0..16u8 {
            let flips = [mask & 1 != 0, mask & 2 != 0, mask & 4 != 0, mask & 8 != 0];
            let e = make_n6a_signed(1, 2, flips).unwrap();
            assert!(jacobi_residual(&e.algebra) < 1e-14);
        }
    }

    #[test]
    fn n7a_sign_patterns() {
        let mut accepted = 0;
        for mask in 0..128u8 {
            let flips: N7aSigns = std::array::from_fn(|i| mask & (1 << i) != 0);
            // Jacobi on (w2,w3,w4): sign([w1,w2]) sign(a w1 in [w3,w4]) = sign([w1,w3]) sign(a w1 in [w2,w4])
            let consistent = (flips[0] ^ flips[6]) == (flips[1] ^ flips[4]);
            match make_n7a_signed(1, 2, flips) {
                Ok(e) => {
                    assert!(consistent);
                    assert!(jacobi_residual(&e.algebra) < 1e-14);
                    accepted += 1;
                }
                Err(_) => assert!(!consistent),
            }
        }
        assert_eq!(accepted, 64);
    }

    #[test]
    fn n7a_boundary_and_errors() {
        let e = make_n7a(1, Scalar::Float(3f64.sqrt())).unwrap();
        assert!(e.algebra.structure().get(4, 6, 2).abs() < 1e-7);
        assert!(make_n7a(0, 2).is_err());
        assert!(make_n7a(1, 1).is_err());
        let n7 = make_n7a(1, 2).unwrap();
        assert_eq!(
            series(&n7.algebra, SeriesKind::LowerCentral, 1e-9).verdict,
            SeriesVerdict::Nilpotent { step: 3 }
        );
    }

    #[test]
    fn extension_gram() {
        let e = make_heisenberg_extension(2, 1, &[vec![Scalar::from(1), Scalar::from(2)]]).unwrap();
        assert_eq!(e.name, "r+h5");
        assert!((e.algebra.gram()[(0, 0)] - 20.0).abs() < 1e-12);
        assert!(make_heisenberg_extension(1, 1, &[vec![Scalar::from(1)], vec![Scalar::from(2)]]).is_err());
        let dep = [vec![Scalar::from(1), Scalar::from(1)], vec![Scalar::from(2), Scalar::from(2)]];
        assert!(make_heisenberg_extension(2, 1, &dep).is_err());
    }

    #[test]
    fn almost_abelian_jordan_block_is_heisenberg() {
        let a = vec![vec![Scalar::from(0), Scalar::from(1)], vec![Scalar::from(0), Scalar::from(0)]];
        let e = make_almost_abelian(&a).unwrap();
        // [e0, e2] = e1 and nothing else: a 3-dim Heisenberg algebra
        assert_eq!(e.algebra.structure().get(0, 2, 1), 1.0);
        assert_eq!(center(&e.algebra, 1e-9).dim(), 1);
        assert_eq!(e.params["trace"], Scalar::from(0));
    }

    #[test]
    fn family_lookup() {
        let mut p = BTreeMap::new();
        p.insert("s".to_string(), Scalar::from(2));
        assert_eq!(from_family("heisenberg", &p).unwrap().algebra.dim(), 5);
        p.insert("t11".to_string(), Scalar::from(1));
        assert_eq!(from_family("heisenberg-extension", &p).unwrap().algebra.dim(), 6);
        assert!(from_family("nope", &p).is_err());
    }
}
