//! JSON connection specifications.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exprcore::{default_vars, parse_expr, parse_rational, RationalExpr, Q};
use crate::projconn::AffineConnection;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecOptions {
    pub max_order: Option<usize>,
    pub samples: Option<usize>,
    pub tolerance: Option<f64>,
}

/// The document as written.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecFile {
    pub dimension: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variables: Option<Vec<String>>,
    #[serde(default)]
    pub christoffel: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base_point: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub options: Option<SpecOptions>,
}

/// A parsed and validated specification.
#[derive(Clone, Debug, PartialEq)]
pub struct ConnectionSpec {
    pub dimension: usize,
    pub variables: Vec<String>,
    pub connection: AffineConnection,
    pub base_point: Vec<Q>,
    pub options: SpecOptions,
}

pub const MAX_DIMENSION: usize = 6;

fn parse_key(key: &str, n: usize) -> Result<(usize, usize, usize)> {
    let parts: Vec<&str> = key.split(',').map(str::trim).collect();
    let bad = || Error::Spec(format!("christoffel key '{key}' must be \"c,a,b\" with indices in 1..={n}"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let mut idx = [0usize; 3];
    for (slot, p) in idx.iter_mut().zip(&parts) {
        let v: usize = p.parse().map_err(|_| bad())?;
        if v == 0 || v > n {
            return Err(bad());
        }
        *slot = v - 1;
    }
    Ok((idx[0], idx[1], idx[2]))
}

impl ConnectionSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        let file: SpecFile = serde_json::from_str(text)
            .map_err(|e| Error::Spec(format!("line {}, column {}: {}", e.line(), e.column(), e)))?;
        Self::from_file(file)
    }

    pub fn from_file(file: SpecFile) -> Result<Self> {
        let n = file.dimension;
        if !(2..=MAX_DIMENSION).contains(&n) {
            return Err(Error::Spec(format!("dimension must be between 2 and {MAX_DIMENSION}, got {n}")));
        }
        let variables = match file.variables {
            Some(v) => {
                if v.len() != n {
                    return Err(Error::Spec(format!("expected {n} variable names, got {}", v.len())));
                }
                for (i, name) in v.iter().enumerate() {
                    let ok = name.chars().next().is_some_and(|c| c.is_alphabetic() || c == '_')
                        && name.chars().all(|c| c.is_alphanumeric() || c == '_');
                    if !ok || v[..i].contains(name) {
                        return Err(Error::Spec(format!("invalid or repeated variable name '{name}'")));
                    }
                }
                v
            }
            None => default_vars(n),
        };
        let mut gamma: Vec<Option<(RationalExpr, String)>> = vec![None; n * n * n];
        for (key, src) in &file.christoffel {
            let (c, a, b) = parse_key(key, n)?;
            let e = parse_expr(src, &variables)
                .map_err(|e| Error::Spec(format!("christoffel \"{key}\": column {}: {}", e.column, e.message)))?;
            for (x, y) in [(a, b), (b, a)] {
                let slot = &mut gamma[(c * n + x) * n + y];
                match slot {
                    Some((prev, prev_key)) if *prev != e => {
                        return Err(Error::Spec(format!(
                            "christoffel \"{key}\" and \"{prev_key}\" differ; the connection must be torsion-free"
                        )));
                    }
                    _ => *slot = Some((e.clone(), key.clone())),
                }
            }
        }
        let gamma = gamma.into_iter().map(|g| g.map_or_else(RationalExpr::zero, |(e, _)| e)).collect();
        let connection = AffineConnection::new(n, gamma)?;
        let base_point = match file.base_point {
            Some(p) => {
                if p.len() != n {
                    return Err(Error::Spec(format!("base_point needs {n} coordinates, got {}", p.len())));
                }
                p.iter()
                    .map(|s| parse_rational(s).map_err(|e| Error::Spec(format!("base_point '{s}': {}", e.message))))
                    .collect::<Result<Vec<_>>>()?
            }
            None => vec![Q::from_integer(0.into()); n],
        };
        let options = file.options.unwrap_or_default();
        if let Some(t) = options.tolerance {
            if !(t.is_finite() && t > 0.0) {
                return Err(Error::Spec(format!("tolerance must be positive, got {t}")));
            }
        }
        Ok(Self {
            dimension: n,
            variables,
            connection,
            base_point,
            options,
        })
    }

    /// The canonical form of the input: nonzero entries with `a ≤ b`.
    pub fn christoffel_strings(&self) -> BTreeMap<String, String> {
        christoffel_map(&self.connection, &self.variables)
    }
}

/// Nonzero Christoffel symbols with `a ≤ b`, keyed `"c,a,b"` (1-based).
pub fn christoffel_map(c: &AffineConnection, names: &[String]) -> BTreeMap<String, String> {
    let n = c.dim();
    let mut out = BTreeMap::new();
    for k in 0..n {
        for a in 0..n {
            for b in a..n {
                let g = c.gamma(k, a, b);
                if !g.is_zero() {
                    out.insert(format!("{},{},{}", k + 1, a + 1, b + 1), g.display_with(names).to_string());
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exprcore::q;

    #[test]
    fn parses_and_mirrors_symbols() {
        let s = ConnectionSpec::from_json(
            r#"{"dimension": 2, "variables": ["u", "v"], "christoffel": {"1,2,1": "u*v"}, "base_point": ["1/2", "-3"]}"#,
        )
        .unwrap();
        assert_eq!(s.connection.gamma(0, 0, 1), s.connection.gamma(0, 1, 0));
        assert_eq!(s.base_point, vec![q(1, 2), q(-3, 1)]);
        assert_eq!(s.christoffel_strings().get("1,1,2").map(String::as_str), Some("u*v"));
    }

    #[test]
    fn rejects_bad_input() {
        let bad = [
            r#"{"dimension": 2, "christoffel": {"1,1,2": "x1 +* x2"}}"#,
            r#"{"dimension": 2, "christoffel": {"1,1,2": "x1", "1,2,1": "x2"}}"#,
            r#"{"dimension": 2, "christoffel": {"3,1,1": "x1"}}"#,
            r#"{"dimension": 7}"#,
            r#"{"dimension": 2, "base_point": ["a"]}"#,
            r#"{"dimension": 2, "colour": 1}"#,
            r#"{"dimension": 2,"#,
        ];
        for b in bad {
            assert!(matches!(ConnectionSpec::from_json(b), Err(Error::Spec(_))), "{b}");
        }
        let e = ConnectionSpec::from_json(bad[0]).unwrap_err().to_string();
        assert!(e.contains("column 5"), "{e}");
    }
}
