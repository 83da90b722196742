//! JSON algebra files.
//!
//! ```json
//! {
//!   "name": "h3",
//!   "dim": 3,
//!   "basis": ["x", "y", "z"],
//!   "brackets": [{"i": "x", "j": "y", "k": "z", "coeff": "1"}],
//!   "metric": [{"i": "x", "j": "x", "value": "2.0"}]
//! }
//! ```
//!
//! Each bracket entry `(i, j, k, c)` also sets `[j, i]` to `−c` along `k`.
//! The metric starts from the identity; listed entries override it and are
//! mirrored. Coefficients are strings: integers and `p/q` literals are exact,
//! anything else is a binary float. Plain JSON numbers are read the same way.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Deserializer, Serialize};

use crate::algebra::{MetricLieAlgebra, StructureTensor};
use crate::catalog::CatalogEntry;
use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BracketEntry {
    pub i: String,
    pub j: String,
    pub k: String,
    #[serde(deserialize_with = "literal")]
    pub coeff: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricEntry {
    pub i: String,
    pub j: String,
    #[serde(deserialize_with = "literal")]
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraDocument {
    pub name: String,
    pub dim: usize,
    pub basis: Vec<String>,
    pub brackets: Vec<BracketEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metric: Option<Vec<MetricEntry>>,
    /// Catalog family that produced the document, if any.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none", deserialize_with = "literal_map")]
    pub params: Option<BTreeMap<String, String>>,
}

fn value_literal<E: serde::de::Error>(v: serde_json::Value) -> std::result::Result<String, E> {
    match v {
        serde_json::Value::String(s) => Ok(s),
        serde_json::Value::Number(n) => Ok(n.to_string()),
        other => Err(E::custom(format!("expected a number or numeric string, got {other}"))),
    }
}

fn literal<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<String, D::Error> {
    value_literal(serde_json::Value::deserialize(d)?)
}

fn literal_map<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<BTreeMap<String, String>>, D::Error> {
    let m: Option<BTreeMap<String, serde_json::Value>> = Option::deserialize(d)?;
    m.map(|m| m.into_iter().map(|(k, v)| value_literal(v).map(|s| (k, s))).collect())
        .transpose()
}

fn scalar(text: &str, what: &str) -> Result<Scalar> {
    Scalar::parse(text).ok_or_else(|| Error::Validation(format!("{what}: '{text}' is not a number")))
}

/// Parses and validates a document.
pub fn parse_algebra(text: &str) -> Result<AlgebraDocument> {
    let doc: AlgebraDocument = serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    doc.to_algebra()?;
    Ok(doc)
}

impl AlgebraDocument {
    fn index(&self) -> Result<HashMap<&str, usize>> {
        if self.dim == 0 {
            return Err(Error::Validation("dim must be positive".into()));
        }
        if self.basis.len() != self.dim {
            return Err(Error::Validation(format!("dim is {} but basis has {} labels", self.dim, self.basis.len())));
        }
        let mut idx = HashMap::new();
        for (n, l) in self.basis.iter().enumerate() {
            if idx.insert(l.as_str(), n).is_some() {
                return Err(Error::Validation(format!("duplicate basis label '{l}'")));
            }
        }
        Ok(idx)
    }

    /// True when every bracket coefficient is an exact literal.
    pub fn is_exact(&self) -> bool {
        self.brackets.iter().all(|b| Scalar::parse(&b.coeff).is_some_and(|s| s.is_exact()))
    }

    pub fn to_algebra(&self) -> Result<MetricLieAlgebra> {
        let idx = self.index()?;
        let look = |l: &str, what: &str| {
            idx.get(l).copied().ok_or_else(|| Error::Validation(format!("{what} refers to unknown label '{l}'")))
        };
        let mut entries = Vec::with_capacity(self.brackets.len());
        for b in &self.brackets {
            let what = format!("bracket [{},{}] -> {}", b.i, b.j, b.k);
            entries.push((look(&b.i, &what)?, look(&b.j, &what)?, look(&b.k, &what)?, scalar(&b.coeff, &what)?));
        }
        let st = StructureTensor::from_entries(self.dim, &entries)?;
        let n = self.dim;
        let mut gram = Mat::identity(n, n);
        let mut set: HashMap<(usize, usize), f64> = HashMap::new();
        for m in self.metric.iter().flatten() {
            let what = format!("metric entry ({},{})", m.i, m.j);
            let (i, j) = (look(&m.i, &what)?, look(&m.j, &what)?);
            let v = scalar(&m.value, &what)?.to_f64();
            let key = (i.min(j), i.max(j));
            if let Some(prev) = set.insert(key, v) {
                if prev != v {
                    return Err(Error::Validation(format!("{what}: conflicting values {prev} and {v}")));
                }
            }
            gram[(i, j)] = v;
            gram[(j, i)] = v;
        }
        MetricLieAlgebra::new(self.basis.clone(), st, gram).map_err(|e| match e {
            Error::GramNotPositiveDefinite => Error::Validation("metric is not positive definite".into()),
            other => other,
        })
    }

    /// Parameters as scalars, if present.
    pub fn params_scalars(&self) -> Result<BTreeMap<String, Scalar>> {
        self.params
            .iter()
            .flatten()
            .map(|(k, v)| scalar(v, &format!("parameter {k}")).map(|s| (k.clone(), s)))
            .collect()
    }

    /// Document for an algebra; brackets listed for `i < j` in basis order.
    pub fn from_algebra(name: &str, l: &MetricLieAlgebra) -> AlgebraDocument {
        let n = l.dim();
        let st = l.structure();
        let labels = l.labels();
        let mut brackets = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                for k in 0..n {
                    let v = st.get_scalar(i, j, k);
                    if !v.is_zero() {
                        brackets.push(BracketEntry {
                            i: labels[i].clone(),
                            j: labels[j].clone(),
                            k: labels[k].clone(),
                            coeff: v.to_literal(),
                        });
                    }
                }
            }
        }
        let g = l.gram();
        let mut metric = Vec::new();
        for i in 0..n {
            for j in i..n {
                let identity = if i == j { 1.0 } else { 0.0 };
                if g[(i, j)] != identity {
                    metric.push(MetricEntry {
                        i: labels[i].clone(),
                        j: labels[j].clone(),
                        value: Scalar::Float(g[(i, j)]).to_literal(),
                    });
                }
            }
        }
        AlgebraDocument {
            name: name.into(),
            dim: n,
            basis: labels.to_vec(),
            brackets,
            metric: (!metric.is_empty()).then_some(metric),
            family: None,
            params: None,
        }
    }

    pub fn from_entry(entry: &CatalogEntry) -> AlgebraDocument {
        let mut doc = Self::from_algebra(&entry.name, &entry.algebra);
        doc.family = Some(entry.family.clone());
        doc.params = Some(entry.params.iter().map(|(k, v)| (k.clone(), v.to_literal())).collect());
        doc
    }

    /// Pretty JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("document serializes");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{make_heisenberg_extension, make_n6a};

    const H3: &str = r#"{"name": "h3", "dim": 3, "basis": ["x", "y", "z"],
        "brackets": [{"i": "x", "j": "y", "k": "z", "coeff": "1"}]}"#;

    #[test]
    fn heisenberg_document() {
        let d = parse_algebra(H3).unwrap();
        assert!(d.is_exact());
        let l = d.to_algebra().unwrap();
        assert_eq!(l.structure().get(1, 0, 2), -1.0);
        assert!(l.structure().is_exact());
    }

    #[test]
    fn validation_errors() {
        let dup = H3.replace(r#"["x", "y", "z"]"#, r#"["x", "x", "z"]"#);
        assert!(matches!(parse_algebra(&dup), Err(Error::Validation(m)) if m.contains("duplicate")));
        let unknown = H3.replace(r#""k": "z""#, r#""k": "w""#);
        assert!(matches!(parse_algebra(&unknown), Err(Error::Validation(_))));
        let bad_metric = H3.replace("}]}", r#"}], "metric": [{"i": "x", "j": "x", "value": "-1"}]}"#);
        assert!(matches!(parse_algebra(&bad_metric), Err(Error::Validation(m)) if m.contains("positive definite")));
    }

    #[test]
    fn parse_error_position() {
        let err = parse_algebra("{\n  \"name\": \"h3\",\n  \"dim\": 3,,\n}").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err:?}");
    }

    #[test]
    fn float_coefficients_switch_mode() {
        let d = parse_algebra(&H3.replace(r#""coeff": "1""#, r#""coeff": "0.7071067811865476""#)).unwrap();
        assert!(!d.is_exact());
        let numeric = parse_algebra(&H3.replace(r#""coeff": "1""#, r#""coeff": 2"#)).unwrap();
        assert!(numeric.is_exact());
    }

    #[test]
    fn emit_parse_emit_is_stable() {
        let one = Scalar::from(1);
        for entry in [make_n6a(1, 2).unwrap(), make_heisenberg_extension(1, Scalar::Float(1.5), &[vec![one]]).unwrap()] {
            let text = AlgebraDocument::from_entry(&entry).to_json();
            let back = parse_algebra(&text).unwrap();
            assert_eq!(back.to_json(), text);
            assert_eq!(back.to_algebra().unwrap(), entry.algebra);
        }
    }
}
