//! JSON body files and builtin body names.
//!
//! A body is either `{"n": 2, "vertices": [[x, y], ...]}` or
//! `{"n": 2, "halfspaces": [{"a": [..], "b": 1.0}, ...], "witness": [..]}`.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::GeomError;
use crate::numkit::Vector;
use crate::polytope::{convex_hull, halfspace_intersection, Halfspace, Polytope};
use crate::simplexflags::RegularSimplex;

#[derive(Debug, Error)]
pub enum BodyError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("malformed body: {0}")]
    Parse(String),
    #[error(transparent)]
    Geom(#[from] GeomError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HalfspaceSpec {
    pub a: Vec<f64>,
    pub b: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BodySpec {
    Vertices {
        n: usize,
        vertices: Vec<Vec<f64>>,
    },
    Halfspaces {
        n: usize,
        halfspaces: Vec<HalfspaceSpec>,
        witness: Vec<f64>,
    },
}

impl BodySpec {
    pub fn from_polytope(p: &Polytope) -> Self {
        BodySpec::Vertices {
            n: p.dim(),
            vertices: p.vertices().iter().map(|v| v.as_slice().to_vec()).collect(),
        }
    }

    pub fn build(&self) -> Result<Polytope, BodyError> {
        let check = |n: usize, v: &[f64]| {
            if v.len() != n {
                Err(BodyError::Parse(format!(
                    "expected {n} coordinates, got {}",
                    v.len()
                )))
            } else {
                Ok(Vector::from_column_slice(v))
            }
        };
        match self {
            BodySpec::Vertices { n, vertices } => {
                let pts = vertices
                    .iter()
                    .map(|v| check(*n, v))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(convex_hull(&pts)?)
            }
            BodySpec::Halfspaces {
                n,
                halfspaces,
                witness,
            } => {
                let hs = halfspaces
                    .iter()
                    .map(|h| Ok(Halfspace::new(check(*n, &h.a)?, h.b)?))
                    .collect::<Result<Vec<_>, BodyError>>()?;
                Ok(halfspace_intersection(&hs, &check(*n, witness)?)?)
            }
        }
    }
}

pub fn parse_body(text: &str) -> Result<Polytope, BodyError> {
    let spec: BodySpec = serde_json::from_str(text).map_err(|e| BodyError::Parse(e.to_string()))?;
    spec.build()
}

pub fn read_body(path: &Path) -> Result<Polytope, BodyError> {
    let text = std::fs::read_to_string(path).map_err(|source| BodyError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_body(&text)
}

pub fn body_to_json(p: &Polytope) -> String {
    serde_json::to_string_pretty(&BodySpec::from_polytope(p)).expect("body serializes")
}

/// `simplex:n` is the regular simplex `Δ_n`; `cube:n` is `[-1, 1]^n`.
pub fn builtin(name: &str) -> Result<Polytope, BodyError> {
    let (kind, dim) = name.split_once(':').ok_or_else(|| {
        BodyError::Parse(format!("builtin must look like simplex:3, got {name:?}"))
    })?;
    let n: usize = dim
        .parse()
        .map_err(|_| BodyError::Parse(format!("bad dimension in {name:?}")))?;
    match kind {
        "simplex" => Ok(RegularSimplex::new(n)?.polytope()),
        "cube" => Ok(Polytope::cube(n, 1.0)?),
        _ => Err(BodyError::Parse(format!("unknown builtin {kind:?}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polytope::same_vertex_set;

    #[test]
    fn vertex_format() {
        let p = parse_body(r#"{"n": 2, "vertices": [[0,0],[1,0],[0,1],[0.2,0.2]]}"#).unwrap();
        assert_eq!(p.vertices().len(), 3);
    }

    #[test]
    fn halfspace_format() {
        let text = r#"{"n": 2, "witness": [0, 0], "halfspaces": [
            {"a": [1, 0], "b": 1}, {"a": [-1, 0], "b": 1},
            {"a": [0, 1], "b": 1}, {"a": [0, -1], "b": 1}]}"#;
        let p = parse_body(text).unwrap();
        assert!((p.volume().unwrap() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn round_trip_preserves_vertices() {
        let s = RegularSimplex::new(3).unwrap().polytope();
        let back = parse_body(&body_to_json(&s)).unwrap();
        assert!(same_vertex_set(s.vertices(), back.vertices(), 0.0));
    }

    #[test]
    fn malformed_inputs() {
        assert!(matches!(parse_body("{"), Err(BodyError::Parse(_))));
        assert!(matches!(
            parse_body(r#"{"n": 3, "vertices": [[0,0]]}"#),
            Err(BodyError::Parse(_))
        ));
        assert!(matches!(
            parse_body(r#"{"n": 2, "vertices": [[0,0],[1,1],[2,2]]}"#),
            Err(BodyError::Geom(_))
        ));
        assert!(builtin("ball:2").is_err());
        assert!(builtin("simplex").is_err());
    }

    #[test]
    fn builtins() {
        assert!((builtin("cube:3").unwrap().volume().unwrap() - 8.0).abs() < 1e-12);
        assert_eq!(builtin("simplex:4").unwrap().vertices().len(), 5);
    }
}
