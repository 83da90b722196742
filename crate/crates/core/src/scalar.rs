//! Scalars that remember whether they are exact.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

/// An exact rational or a binary float.
#[derive(Debug, Clone, PartialEq)]
pub enum Scalar {
    Exact(BigRational),
    Float(f64),
}

impl Scalar {
    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Exact(q) => rational_to_f64(q),
            Scalar::Float(x) => *x,
        }
    }

    pub fn as_exact(&self) -> Option<&BigRational> {
        match self {
            Scalar::Exact(q) => Some(q),
            Scalar::Float(_) => None,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Scalar::Exact(_))
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Exact(q) => q.is_zero(),
            Scalar::Float(x) => *x == 0.0,
        }
    }

    pub fn neg(&self) -> Scalar {
        match self {
            Scalar::Exact(q) => Scalar::Exact(-q),
            Scalar::Float(x) => Scalar::Float(-x),
        }
    }

    pub fn mul(&self, other: &Scalar) -> Scalar {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a * b),
            _ => Scalar::Float(self.to_f64() * other.to_f64()),
        }
    }

    pub fn add(&self, other: &Scalar) -> Scalar {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a + b),
            _ => Scalar::Float(self.to_f64() + other.to_f64()),
        }
    }

    pub fn sub(&self, other: &Scalar) -> Scalar {
        self.add(&other.neg())
    }

    /// `None` on division by zero.
    pub fn div(&self, other: &Scalar) -> Option<Scalar> {
        if other.is_zero() {
            return None;
        }
        Some(match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a / b),
            _ => Scalar::Float(self.to_f64() / other.to_f64()),
        })
    }

    pub fn is_negative(&self) -> bool {
        match self {
            Scalar::Exact(q) => q.is_negative(),
            Scalar::Float(x) => *x < 0.0,
        }
    }

    /// Square root; exact when the argument is the square of a rational.
    /// `None` for negative input.
    pub fn sqrt(&self) -> Option<Scalar> {
        if self.is_negative() {
            return None;
        }
        match self {
            Scalar::Exact(q) => Some(match rational_sqrt(q) {
                Some(r) => Scalar::Exact(r),
                None => Scalar::Float(rational_to_f64(q).sqrt()),
            }),
            Scalar::Float(x) => Some(Scalar::Float(x.sqrt())),
        }
    }

    /// Parses `"3"`, `"-3/2"` as exact and anything else float-like as a float.
    pub fn parse(text: &str) -> Option<Scalar> {
        let t = text.trim();
        if let Some(q) = parse_rational_literal(t) {
            return Some(Scalar::Exact(q));
        }
        t.parse::<f64>().ok().filter(|x| x.is_finite()).map(Scalar::Float)
    }

    /// Literal form that [`Scalar::parse`] maps back to an equal value.
    pub fn to_literal(&self) -> String {
        match self {
            Scalar::Exact(q) => {
                if q.is_integer() {
                    q.numer().to_string()
                } else {
                    format!("{}/{}", q.numer(), q.denom())
                }
            }
            Scalar::Float(x) => {
                let s = format!("{x:?}");
                // `1.0` style keeps float mode on re-parse.
                if s.contains('.') || s.contains('e') || s.contains("inf") || s.contains("NaN") {
                    s
                } else {
                    format!("{s}.0")
                }
            }
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_literal())
    }
}

impl From<f64> for Scalar {
    fn from(x: f64) -> Self {
        Scalar::Float(x)
    }
}

impl From<i64> for Scalar {
    fn from(x: i64) -> Self {
        Scalar::Exact(BigRational::from_integer(BigInt::from(x)))
    }
}

impl From<i32> for Scalar {
    fn from(x: i32) -> Self {
        Scalar::from(x as i64)
    }
}

impl From<BigRational> for Scalar {
    fn from(q: BigRational) -> Self {
        Scalar::Exact(q)
    }
}

/// Exact square root of a nonnegative rational, if it is a rational square.
pub fn rational_sqrt(q: &BigRational) -> Option<BigRational> {
    if q.is_negative() {
        return None;
    }
    let (n, d) = (q.numer(), q.denom());
    let (rn, rd) = (n.sqrt(), d.sqrt());
    (&rn * &rn == *n && &rd * &rd == *d).then(|| BigRational::new(rn, rd))
}

/// `p/q` with integer `p`, nonzero integer `q`, or a bare integer.
pub fn parse_rational_literal(t: &str) -> Option<BigRational> {
    let is_int = |s: &str| {
        let digits = s.strip_prefix(['-', '+']).unwrap_or(s);
        !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())
    };
    let int = |s: &str| s.strip_prefix('+').unwrap_or(s).parse::<BigInt>().ok();
    match t.split_once('/') {
        None if is_int(t) => int(t).map(BigRational::from_integer),
        Some((n, d)) if is_int(n.trim()) && is_int(d.trim()) => {
            let d = int(d.trim())?;
            if d.is_zero() {
                return None;
            }
            Some(BigRational::new(int(n.trim())?, d))
        }
        _ => None,
    }
}

pub fn rational_to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or_else(|| {
        // Huge numerators/denominators: scale down before dividing.
        let n = q.numer().to_f64().unwrap_or(f64::INFINITY);
        let d = q.denom().to_f64().unwrap_or(f64::INFINITY);
        n / d
    })
}

pub fn rational_abs(q: &BigRational) -> BigRational {
    q.abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_square_roots() {
        let q = |n: i64, d: i64| BigRational::new(n.into(), d.into());
        assert_eq!(rational_sqrt(&q(9, 4)), Some(q(3, 2)));
        assert_eq!(rational_sqrt(&q(1, 2)), None);
        assert!(Scalar::from(4).sqrt().unwrap().is_exact());
        assert!(!Scalar::Exact(q(5, 2)).sqrt().unwrap().is_exact());
        assert_eq!(Scalar::from(-1).sqrt(), None);
    }

    #[test]
    fn literals() {
        assert_eq!(
            Scalar::parse("3/2"),
            Some(Scalar::Exact(BigRational::new(3.into(), 2.into())))
        );
        assert!(Scalar::parse("-7").unwrap().is_exact());
        assert!(!Scalar::parse("0.5").unwrap().is_exact());
        assert_eq!(Scalar::parse("1/0"), None);
        assert_eq!(Scalar::parse("abc"), None);
        assert_eq!(Scalar::parse("4/-6").unwrap().to_literal(), "-2/3");
    }

    #[test]
    fn float_literal_reparses_as_float() {
        let x = Scalar::Float(2.0);
        assert_eq!(x.to_literal(), "2.0");
        assert_eq!(Scalar::parse(&x.to_literal()), Some(x));
        let y = Scalar::Float(0.5f64.sqrt());
        assert_eq!(Scalar::parse(&y.to_literal()), Some(y));
    }
}
