//! Exact rationality checks and the Diophantine obstruction `x² + 3y² = 2z²`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::algebra::MetricLieAlgebra;
use crate::error::{Error, Result};
use crate::scalar::{rational_sqrt, Scalar};

pub const DEFAULT_SEARCH_BOUND: u64 = 1000;
/// Distance below which a float counts as equal to a rational approximation.
pub const RATIONAL_MATCH_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RationalityVerdict {
    /// Rational structure constants exist (in the reported basis).
    Rational,
    /// A certificate rules out rational structure constants.
    Obstructed,
    /// Neither could be established.
    Unknown,
}

/// One structure constant and its best rational approximation.
#[derive(Debug, Clone, Serialize)]
pub struct ConstantWitness {
    pub i: String,
    pub j: String,
    pub k: String,
    pub value: String,
    pub rational: String,
    pub error: f64,
    pub matched: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Obstruction {
    /// `(p, q, r)` for `p x² + q y² = r z²`.
    pub equation: (u64, u64, u64),
    pub verdict: String,
    pub bound: u64,
    pub solutions_found: usize,
    pub certificate: Option<Mod3Certificate>,
    pub certificate_valid: bool,
    /// The exact identity that reduces rationality to the equation.
    pub identity: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct RationalityReport {
    pub all_rational: bool,
    pub verdict: RationalityVerdict,
    /// Basis in which the constants are rational, as labels of the declared basis.
    pub witness_basis: Option<Vec<String>>,
    pub witnesses: Vec<ConstantWitness>,
    pub obstruction: Option<Obstruction>,
    pub notes: Vec<String>,
}

/// Closest fraction to `x` with denominator at most `bound`.
pub fn limit_denominator(x: &BigRational, bound: u64) -> BigRational {
    let max_d = BigInt::from(bound.max(1));
    if x.denom() <= &max_d {
        return x.clone();
    }
    let (mut p0, mut q0, mut p1, mut q1) = (BigInt::zero(), BigInt::one(), BigInt::one(), BigInt::zero());
    let (mut n, mut d) = (x.numer().clone(), x.denom().clone());
    loop {
        let a = n.div_floor_big(&d);
        let q2 = &q0 + &a * &q1;
        if q2 > max_d {
            break;
        }
        let p2 = &p0 + &a * &p1;
        p0 = std::mem::replace(&mut p1, p2);
        q0 = std::mem::replace(&mut q1, q2);
        let rem = &n - &a * &d;
        n = std::mem::replace(&mut d, rem);
        if d.is_zero() {
            break;
        }
    }
    let k = (&max_d - &q0) / &q1;
    let bound1 = BigRational::new(&p0 + &k * &p1, &q0 + &k * &q1);
    let bound2 = BigRational::new(p1, q1);
    if (&bound2 - x).abs() <= (&bound1 - x).abs() {
        bound2
    } else {
        bound1
    }
}

trait DivFloor {
    fn div_floor_big(&self, d: &BigInt) -> BigInt;
}

impl DivFloor for BigInt {
    fn div_floor_big(&self, d: &BigInt) -> BigInt {
        num_integer::Integer::div_floor(self, d)
    }
}

/// Rationality of the stored structure constants.
///
/// Exact tensors are rational by construction. Float tensors count as
/// rational when every constant is within [`RATIONAL_MATCH_TOL`] of a
/// fraction with denominator at most `denominator_bound`. A failure only
/// means "unknown": another basis might still have rational constants.
pub fn rational_structure_check(l: &MetricLieAlgebra, denominator_bound: u64) -> RationalityReport {
    let st = l.structure();
    let n = st.dim();
    let labels = l.labels();
    let mut witnesses = Vec::new();
    let mut all = true;
    for i in 0..n {
        for j in (i + 1)..n {
            for k in 0..n {
                let v = st.get_scalar(i, j, k);
                if v.is_zero() {
                    continue;
                }
                let (rational, error, matched) = match &v {
                    Scalar::Exact(q) => (q.clone(), 0.0, true),
                    Scalar::Float(x) => {
                        let exact = BigRational::from_float(*x).expect("finite constant");
                        let r = limit_denominator(&exact, denominator_bound);
                        let err = (Scalar::Exact(r.clone()).to_f64() - x).abs();
                        (r.clone(), err, err <= RATIONAL_MATCH_TOL)
                    }
                };
                all &= matched;
                witnesses.push(ConstantWitness {
                    i: labels[i].clone(),
                    j: labels[j].clone(),
                    k: labels[k].clone(),
                    value: v.to_literal(),
                    rational: Scalar::Exact(rational).to_literal(),
                    error,
                    matched,
                });
            }
        }
    }
    let mut notes = Vec::new();
    if st.is_exact() {
        notes.push("exact rational input".into());
    } else {
        notes.push(format!("float input; denominators up to {denominator_bound}, match tolerance {RATIONAL_MATCH_TOL:e}"));
    }
    if !all {
        notes.push("declared basis is not rational; other bases were not searched".into());
    }
    RationalityReport {
        all_rational: all,
        verdict: if all { RationalityVerdict::Rational } else { RationalityVerdict::Unknown },
        witness_basis: all.then(|| labels.to_vec()),
        witnesses,
        obstruction: None,
        notes,
    }
}

fn isqrt(v: u128) -> u128 {
    v.isqrt()
}

/// All integer triples with `0 < max(|x|,|y|,|z|) ≤ bound` and
/// `p x² + q y² = r z²`, sorted lexicographically.
pub fn diophantine_search(p: u64, q: u64, r: u64, bound: u64) -> Vec<(i64, i64, i64)> {
    assert!(p > 0 && q > 0 && r > 0, "coefficients must be positive");
    assert!(bound <= i64::MAX as u64, "bound too large");
    let (p, q, r, b) = (p as u128, q as u128, r as u128, bound as u128);
    let mut out = Vec::new();
    for x in 0..=b {
        let px = p.checked_mul(x * x).expect("p x^2 overflows u128");
        for y in 0..=b {
            let lhs = q.checked_mul(y * y).and_then(|t| t.checked_add(px)).expect("p x^2 + q y^2 overflows u128");
            if lhs == 0 || lhs % r != 0 {
                continue;
            }
            let z2 = lhs / r;
            let z = isqrt(z2);
            if z * z != z2 || z > b {
                continue;
            }
            let (x, y, z) = (x as i64, y as i64, z as i64);
            for sx in signs(x) {
                for sy in signs(y) {
                    for sz in signs(z) {
                        out.push((sx * x, sy * y, sz * z));
                    }
                }
            }
        }
    }
    out.sort_unstable();
    out
}

fn signs(v: i64) -> &'static [i64] {
    if v == 0 {
        &[1]
    } else {
        &[1, -1]
    }
}

/// 3-adic valuation parity of each side of `x² + 3y² = 2z²`.
#[derive(Debug, Clone, Serialize)]
pub struct ValuationParity {
    pub x_squared: String,
    pub three_y_squared: String,
    pub two_z_squared: String,
}

/// Descent argument for `x² + 3y² = 2z²` having no nonzero integer solution.
#[derive(Debug, Clone, Serialize)]
pub struct Mod3Certificate {
    pub equation: (u64, u64, u64),
    /// `{k² mod 3}`.
    pub squares_mod3: Vec<u8>,
    /// Residues `(x mod 3, z mod 3)` with `x² ≡ 2z² (mod 3)`.
    pub residue_pairs: Vec<(u8, u8)>,
    pub valuation_parity: ValuationParity,
    pub steps: Vec<String>,
}

impl Mod3Certificate {
    /// Re-derives every table in the certificate and checks the parity claims
    /// on all integers up to 300.
    pub fn validate(&self) -> bool {
        let squares: Vec<u8> = {
            let mut s: Vec<u8> = (0..3u8).map(|k| (k * k) % 3).collect();
            s.sort_unstable();
            s.dedup();
            s
        };
        let pairs: Vec<(u8, u8)> =
            (0..3u8).flat_map(|x| (0..3u8).map(move |z| (x, z))).filter(|&(x, z)| (x * x) % 3 == (2 * z * z) % 3).collect();
        let v3 = |mut n: u64| {
            let mut v = 0;
            while n % 3 == 0 {
                n /= 3;
                v += 1;
            }
            v
        };
        let parity_ok = (1..=300u64).all(|k| v3(k * k) % 2 == 0 && v3(3 * k * k) % 2 == 1 && v3(2 * k * k) % 2 == 0);
        self.equation == (1, 3, 2)
            && self.squares_mod3 == squares
            && squares == vec![0, 1]
            && self.residue_pairs == pairs
            && pairs == vec![(0, 0)]
            && parity_ok
            && self.valuation_parity.x_squared == "even"
            && self.valuation_parity.three_y_squared == "odd"
            && self.valuation_parity.two_z_squared == "even"
    }
}

pub fn mod3_descent_certificate(p: u64, q: u64, r: u64) -> Result<Mod3Certificate> {
    if (p, q, r) != (1, 3, 2) {
        return Err(Error::NotApplicable(format!("no mod-3 certificate for ({p}, {q}, {r})")));
    }
    let mut squares: Vec<u8> = (0..3u8).map(|k| (k * k) % 3).collect();
    squares.sort_unstable();
    squares.dedup();
    let residue_pairs =
        (0..3u8).flat_map(|x| (0..3u8).map(move |z| (x, z))).filter(|&(x, z)| (x * x) % 3 == (2 * z * z) % 3).collect();
    Ok(Mod3Certificate {
        equation: (1, 3, 2),
        squares_mod3: squares,
        residue_pairs,
        valuation_parity: ValuationParity {
            x_squared: "even".into(),
            three_y_squared: "odd".into(),
            two_z_squared: "even".into(),
        },
        steps: vec![
            "take a solution with gcd(x, y, z) = 1".into(),
            "reduce mod 3: x^2 = 2 z^2, and squares mod 3 are {0, 1}, so x = z = 0 mod 3".into(),
            "then 9 divides x^2 - 2 z^2 = -3 y^2, so 3 divides y, contradicting gcd 1".into(),
            "equivalently v3(3 y^2) is odd while v3(x^2) and v3(2 z^2) are even".into(),
        ],
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObstructedFamily {
    N6a,
    N7a,
}

fn exact_param(name: &str, v: &Scalar) -> Result<BigRational> {
    v.as_exact().cloned().ok_or_else(|| Error::BadParams(format!("{name} must be rational, got float {v}")))
}

/// The `n6a` constants `b12 = √((c²−3a²)/2)`, `b = √((c²+a²)/2)` and `c`
/// satisfy `b12² + 3b² = 2c²`, so if all three were rational the equation
/// `x² + 3y² = 2z²` would have a nonzero integer solution.
pub fn n6a_lattice_obstruction(a: &Scalar, c: &Scalar) -> Result<RationalityReport> {
    family_obstruction(ObstructedFamily::N6a, a, c, DEFAULT_SEARCH_BOUND)
}

/// Same reduction for `n7a`: `d² + 3b² = 2c²`.
pub fn n7a_lattice_obstruction(a: &Scalar, c: &Scalar) -> Result<RationalityReport> {
    family_obstruction(ObstructedFamily::N7a, a, c, DEFAULT_SEARCH_BOUND)
}

pub fn family_obstruction(family: ObstructedFamily, a: &Scalar, c: &Scalar, bound: u64) -> Result<RationalityReport> {
    let a = exact_param("a", a)?;
    let c = exact_param("c", c)?;
    if a.is_zero() || c.is_zero() {
        return Err(Error::BadParams("a and c must be nonzero".into()));
    }
    let two = BigRational::from_integer(2.into());
    let three = BigRational::from_integer(3.into());
    let (a2, c2) = (&a * &a, &c * &c);
    let first = (&c2 - &three * &a2) / &two;
    if first.is_negative() {
        return Err(Error::BadParams("need c^2 >= 3 a^2".into()));
    }
    let b2 = (&c2 + &a2) / &two;
    let (first_name, identity_name) = match family {
        ObstructedFamily::N6a => ("b12", "b12^2 + 3 b^2 - 2 c^2"),
        ObstructedFamily::N7a => ("d", "d^2 + 3 b^2 - 2 c^2"),
    };
    let identity = &first + &three * &b2 - &two * &c2;
    if !identity.is_zero() {
        return Err(Error::VerificationFailed(format!("{identity_name} = {identity}")));
    }
    let sols = diophantine_search(1, 3, 2, bound);
    let cert = mod3_descent_certificate(1, 3, 2)?;
    let valid = cert.validate();
    let mut notes = vec![format!("{identity_name} = 0 exactly")];
    for (name, sq) in [(first_name, &first), ("b", &b2)] {
        match rational_sqrt(sq) {
            Some(r) => notes.push(format!("{name} = {} is rational", Scalar::Exact(r))),
            None => notes.push(format!("{name}^2 = {} is not the square of a rational", Scalar::Exact(sq.clone()))),
        }
    }
    let obstructed = valid && sols.is_empty();
    Ok(RationalityReport {
        all_rational: false,
        verdict: if obstructed { RationalityVerdict::Obstructed } else { RationalityVerdict::Unknown },
        witness_basis: None,
        witnesses: Vec::new(),
        obstruction: Some(Obstruction {
            equation: (1, 3, 2),
            verdict: "no-nonzero-solution-up-to-bound".into(),
            bound,
            solutions_found: sols.len(),
            certificate: Some(cert),
            certificate_valid: valid,
            identity: format!("{identity_name} = 0"),
        }),
        notes,
    })
}
