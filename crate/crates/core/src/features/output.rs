//! Feature files: one JSON Lines record per seed,
//! `{"seed_id": ..., "kind": ..., "dims": {"<dim-id>": weight}}`, plus a
//! sibling registry file for sparse kinds. Dimension keys are written in
//! ascending numeric order.

use std::path::{Path, PathBuf};

use super::{FeatureKind, FeatureVector, Weights};
use crate::error::{Error, Result};
use crate::io;
use crate::registry::DimensionRegistry;

pub fn vector_record(v: &FeatureVector) -> String {
    let mut out = String::new();
    out.push_str("{\"seed_id\":");
    out.push_str(&serde_json::to_string(&v.seed_id).unwrap());
    out.push_str(",\"kind\":");
    out.push_str(&serde_json::to_string(v.kind.as_str()).unwrap());
    out.push_str(",\"dims\":{");
    let mut push = |i: usize, d: usize, w: f64| {
        if i > 0 {
            out.push(',');
        }
        out.push('"');
        out.push_str(&d.to_string());
        out.push_str("\":");
        out.push_str(&serde_json::to_string(&w).unwrap());
    };
    match &v.weights {
        Weights::Sparse(e) => {
            for (i, &(d, w)) in e.iter().enumerate() {
                push(i, d as usize, w);
            }
        }
        Weights::Dense(values) => {
            for (i, &w) in values.iter().enumerate() {
                push(i, i, w);
            }
        }
    }
    out.push_str("}}");
    out
}

pub fn parse_record(line: &str) -> Result<FeatureVector> {
    #[derive(serde::Deserialize)]
    struct Raw {
        seed_id: String,
        kind: String,
        dims: std::collections::HashMap<String, f64>,
    }
    let raw: Raw = serde_json::from_str(line).map_err(|e| Error::parse("feature record", e))?;
    let kind: FeatureKind = raw.kind.parse()?;
    let mut entries = raw
        .dims
        .into_iter()
        .map(|(k, w)| {
            k.parse::<u32>()
                .map(|d| (d, w))
                .map_err(|_| Error::parse("feature record", format!("bad dimension id {k:?}")))
        })
        .collect::<Result<Vec<_>>>()?;
    entries.sort_by_key(|&(d, _)| d);
    Ok(match kind {
        FeatureKind::Embedding => {
            if entries.iter().enumerate().any(|(i, &(d, _))| i as u32 != d) {
                return Err(Error::Validation(format!(
                    "embedding record for {:?} is not contiguous",
                    raw.seed_id
                )));
            }
            FeatureVector::dense(raw.seed_id, entries.into_iter().map(|(_, w)| w).collect())
        }
        sparse => FeatureVector::sparse(raw.seed_id, sparse, entries),
    })
}

/// Paths of the JSONL and registry files for `kind` under `dir`.
pub fn feature_paths(dir: &Path, kind: FeatureKind) -> (PathBuf, PathBuf) {
    (
        dir.join(format!("{}.jsonl", kind.as_str())),
        dir.join(format!("{}.registry.json", kind.as_str())),
    )
}

/// Writes `<dir>/<kind>.jsonl` and, for sparse kinds, `<dir>/<kind>.registry.json`.
pub fn write_features(
    dir: &Path,
    kind: FeatureKind,
    registry: Option<&DimensionRegistry>,
    vectors: &[FeatureVector],
) -> Result<PathBuf> {
    let (jsonl, reg_path) = feature_paths(dir, kind);
    let mut body = String::new();
    for v in vectors {
        body.push_str(&vector_record(v));
        body.push('\n');
    }
    io::write_atomic(&jsonl, body.as_bytes())?;
    if let Some(reg) = registry {
        io::write_atomic(&reg_path, reg.to_json().as_bytes())?;
    }
    Ok(jsonl)
}

pub fn read_features(path: &Path) -> Result<Vec<FeatureVector>> {
    io::read_text(path)?
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            parse_record(l).map_err(|e| match e {
                Error::Parse { message, .. } => {
                    Error::parse(format!("{} line {}", path.display(), i + 1), message)
                }
                other => other,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn record_keys_are_numerically_ordered() {
        let v = FeatureVector::sparse("s", FeatureKind::Cfg3Gram, [(10, 1.0), (2, 3.0)]);
        assert_eq!(
            vector_record(&v),
            r#"{"seed_id":"s","kind":"cfg3gram","dims":{"2":3.0,"10":1.0}}"#
        );
    }

    #[test]
    fn records_parse_back() {
        let sparse = FeatureVector::sparse("a", FeatureKind::Token, [(0, 0.25), (7, 1.5)]);
        let dense = FeatureVector::dense("b", vec![0.0, -1.0, 2.5]);
        for v in [sparse, dense] {
            assert_eq!(parse_record(&vector_record(&v)).unwrap(), v);
        }
    }
}
