//! Corpus data model and manifest persistence.
//!
//! A manifest is a single JSON document:
//!
//! ```json
//! {"name": "p1", "seeds": [{"id": "a", "source": "seeds/a.src", "cfg": "cfg/a.json", "bug_count": 3}]}
//! ```
//!
//! `source`, `ast`, `cfg`, `coverage` and `embedding` are file paths relative
//! to the manifest's directory; `bug_count` is inline. Side files are read at
//! load time and parsed lazily by the operation that needs them.

use std::collections::HashMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io;
use crate::selection::SelectionOrder;

/// Contents of a referenced side file, kept with its resolved path.
#[derive(Debug, Clone, PartialEq)]
pub struct SideFile {
    pub path: Option<PathBuf>,
    pub text: String,
}

impl SideFile {
    pub fn inline(text: impl Into<String>) -> Self {
        SideFile {
            path: None,
            text: text.into(),
        }
    }

    pub(crate) fn describe(&self, seed: &str, what: &str) -> String {
        match &self.path {
            Some(p) => format!("{what} of seed {seed:?} ({})", p.display()),
            None => format!("{what} of seed {seed:?}"),
        }
    }
}

/// One corpus entry.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SeedProgram {
    pub id: String,
    pub source_path: Option<PathBuf>,
    pub source_text: Option<String>,
    pub ast: Option<SideFile>,
    pub cfg: Option<SideFile>,
    pub coverage: Option<SideFile>,
    pub bug_count: Option<u64>,
    pub embedding: Option<SideFile>,
}

impl SeedProgram {
    pub fn new(id: impl Into<String>) -> Self {
        SeedProgram {
            id: id.into(),
            ..Default::default()
        }
    }

    pub fn from_source(id: impl Into<String>, text: impl Into<String>) -> Self {
        SeedProgram {
            id: id.into(),
            source_text: Some(text.into()),
            ..Default::default()
        }
    }

    pub fn with_ast_json(mut self, json: impl Into<String>) -> Self {
        self.ast = Some(SideFile::inline(json));
        self
    }

    pub fn with_cfg_json(mut self, json: impl Into<String>) -> Self {
        self.cfg = Some(SideFile::inline(json));
        self
    }

    pub fn with_coverage_json(mut self, json: impl Into<String>) -> Self {
        self.coverage = Some(SideFile::inline(json));
        self
    }

    pub fn with_embedding_json(mut self, json: impl Into<String>) -> Self {
        self.embedding = Some(SideFile::inline(json));
        self
    }

    pub fn with_bug_count(mut self, bugs: u64) -> Self {
        self.bug_count = Some(bugs);
        self
    }

    fn has_usable_data(&self) -> bool {
        self.source_text.is_some()
            || self.ast.is_some()
            || self.cfg.is_some()
            || self.embedding.is_some()
            || self.coverage.is_some()
    }

    pub fn source(&self) -> Result<&str> {
        self.source_text
            .as_deref()
            .ok_or_else(|| Error::MissingRepresentation {
                seed: self.id.clone(),
                repr: "source text",
            })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Corpus {
    pub name: String,
    seeds: Vec<SeedProgram>,
    index: HashMap<String, usize>,
}

impl Corpus {
    /// Validates id uniqueness, non-emptiness and per-seed usability.
    pub fn new(name: impl Into<String>, seeds: Vec<SeedProgram>) -> Result<Self> {
        if seeds.is_empty() {
            return Err(Error::EmptyCorpus);
        }
        let mut index = HashMap::with_capacity(seeds.len());
        for (i, seed) in seeds.iter().enumerate() {
            if index.insert(seed.id.clone(), i).is_some() {
                return Err(Error::DuplicateId(seed.id.clone()));
            }
            if !seed.has_usable_data() {
                return Err(Error::EmptySeed(seed.id.clone()));
            }
        }
        Ok(Corpus {
            name: name.into(),
            seeds,
            index,
        })
    }

    pub fn seeds(&self) -> &[SeedProgram] {
        &self.seeds
    }

    pub fn n(&self) -> usize {
        self.seeds.len()
    }

    pub fn position(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn get(&self, id: &str) -> Option<&SeedProgram> {
        self.position(id).map(|i| &self.seeds[i])
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.seeds.iter().map(|s| s.id.as_str())
    }

    /// Maps an order onto corpus positions, checking it is a permutation.
    pub fn positions_of(&self, order: &[String]) -> Result<Vec<usize>> {
        if order.len() != self.n() {
            return Err(Error::Validation(format!(
                "order has {} ids but corpus {:?} has {} seeds",
                order.len(),
                self.name,
                self.n()
            )));
        }
        let mut seen = vec![false; self.n()];
        order
            .iter()
            .map(|id| {
                let pos = self
                    .position(id)
                    .ok_or_else(|| Error::Validation(format!("order names unknown seed {id:?}")))?;
                if std::mem::replace(&mut seen[pos], true) {
                    return Err(Error::Validation(format!("order repeats seed {id:?}")));
                }
                Ok(pos)
            })
            .collect()
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct Manifest {
    name: String,
    seeds: Vec<ManifestEntry>,
}

#[derive(Debug, Serialize, Deserialize)]
struct ManifestEntry {
    id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    source: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    ast: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    cfg: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    coverage: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    bug_count: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    embedding: Option<String>,
}

fn read_side(base: &Path, rel: &Option<String>) -> Result<Option<SideFile>> {
    rel.as_ref()
        .map(|r| {
            let path = io::normalize_path(&base.join(r));
            let text = io::read_text(&path)?;
            Ok(SideFile {
                path: Some(path),
                text,
            })
        })
        .transpose()
}

pub fn load_manifest(path: impl AsRef<Path>) -> Result<Corpus> {
    let path = path.as_ref();
    let text = io::read_text(path)?;
    let manifest: Manifest = serde_json::from_str(&text)
        .map_err(|e| Error::parse(format!("manifest {}", path.display()), e))?;
    if manifest.seeds.is_empty() {
        return Err(Error::EmptyCorpus);
    }

    let mut seen = HashMap::new();
    for entry in &manifest.seeds {
        if seen.insert(entry.id.as_str(), ()).is_some() {
            return Err(Error::DuplicateId(entry.id.clone()));
        }
    }

    let base = io::parent_dir(path);
    let seeds = manifest
        .seeds
        .into_iter()
        .map(|entry| {
            let source = read_side(&base, &entry.source)?;
            Ok(SeedProgram {
                id: entry.id,
                source_path: source.as_ref().and_then(|s| s.path.clone()),
                source_text: source.map(|s| s.text),
                ast: read_side(&base, &entry.ast)?,
                cfg: read_side(&base, &entry.cfg)?,
                coverage: read_side(&base, &entry.coverage)?,
                bug_count: entry.bug_count,
                embedding: read_side(&base, &entry.embedding)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Corpus::new(manifest.name, seeds)
}

/// Number of seeds kept for budget `k` over `n` seeds: `floor(k * n)`,
/// at least 1.
///
/// Products within `1e-9 * n` of an integer snap to it, so that e.g.
/// `0.29 * 100` keeps 29 seeds rather than 28.
pub fn budget_size(n: usize, k: f64) -> Result<usize> {
    if !(k > 0.0 && k <= 1.0) {
        return Err(Error::Parameter(format!(
            "budget must be in (0, 1], got {k}"
        )));
    }
    let exact = k * n as f64;
    let nearest = exact.round();
    let kept = if (exact - nearest).abs() <= 1e-9 * (n.max(1) as f64) {
        nearest
    } else {
        exact.floor()
    };
    Ok((kept as usize).clamp(1, n.max(1)))
}

fn relative_ref(seed: &str, side: Option<&Path>, what: &str, out_dir: &Path) -> Result<String> {
    let path = side.ok_or_else(|| {
        Error::Validation(format!(
            "seed {seed:?} carries an in-memory {what} with no backing file"
        ))
    })?;
    Ok(io::portable(&io::relative_to(path, out_dir)))
}

fn side_ref(
    seed: &SeedProgram,
    side: &Option<SideFile>,
    what: &str,
    out_dir: &Path,
) -> Result<Option<String>> {
    side.as_ref()
        .map(|s| relative_ref(&seed.id, s.path.as_deref(), what, out_dir))
        .transpose()
}

/// Writes the budgeted prefix of `order` as a manifest at `out`.
///
/// Paths are rewritten relative to `out`'s directory. Returns the ids kept.
pub fn save_subset(
    corpus: &Corpus,
    order: &SelectionOrder,
    k: f64,
    out: impl AsRef<Path>,
) -> Result<Vec<String>> {
    let out = out.as_ref();
    let count = budget_size(corpus.n(), k)?;
    let positions = corpus.positions_of(&order.order)?;
    let out_dir = io::normalize_path(&io::parent_dir(out));

    let mut entries = Vec::with_capacity(count);
    for &pos in &positions[..count] {
        let seed = &corpus.seeds()[pos];
        let source = match (&seed.source_path, &seed.source_text) {
            (Some(p), _) => Some(relative_ref(&seed.id, Some(p), "source", &out_dir)?),
            (None, Some(_)) => {
                return Err(Error::Validation(format!(
                    "seed {:?} carries an in-memory source with no backing file",
                    seed.id
                )))
            }
            (None, None) => None,
        };
        entries.push(ManifestEntry {
            id: seed.id.clone(),
            source,
            ast: side_ref(seed, &seed.ast, "ast", &out_dir)?,
            cfg: side_ref(seed, &seed.cfg, "cfg", &out_dir)?,
            coverage: side_ref(seed, &seed.coverage, "coverage", &out_dir)?,
            bug_count: seed.bug_count,
            embedding: side_ref(seed, &seed.embedding, "embedding", &out_dir)?,
        });
    }
    let kept = entries.iter().map(|e| e.id.clone()).collect();
    let manifest = Manifest {
        name: corpus.name.clone(),
        seeds: entries,
    };
    let mut json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    json.push('\n');
    io::write_atomic(out, json.as_bytes())?;
    Ok(kept)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::fs;

    fn write(dir: &Path, rel: &str, text: &str) {
        let p = dir.join(rel);
        fs::create_dir_all(p.parent().unwrap()).unwrap();
        fs::write(p, text).unwrap();
    }

    fn three_seed_dir() -> tempfile::TempDir {
        let dir = tempfile::tempdir().unwrap();
        for id in ["a", "b", "c"] {
            write(
                dir.path(),
                &format!("seeds/{id}.src"),
                &format!("{id} = 1;"),
            );
        }
        write(
            dir.path(),
            "m.json",
            r#"{"name":"t","seeds":[{"id":"c","source":"seeds/c.src"},{"id":"a","source":"seeds/a.src","bug_count":2},{"id":"b","source":"seeds/b.src"}]}"#,
        );
        dir
    }

    #[test]
    fn loads_in_manifest_order() {
        let dir = three_seed_dir();
        let corpus = load_manifest(dir.path().join("m.json")).unwrap();
        assert_eq!(corpus.n(), 3);
        assert_eq!(corpus.ids().collect::<Vec<_>>(), ["c", "a", "b"]);
        assert_eq!(corpus.get("a").unwrap().bug_count, Some(2));
        assert_eq!(
            corpus.get("a").unwrap().source_text.as_deref(),
            Some("a = 1;")
        );
    }

    #[test]
    fn loading_twice_is_identical() {
        let dir = three_seed_dir();
        let a = load_manifest(dir.path().join("m.json")).unwrap();
        let b = load_manifest(dir.path().join("m.json")).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn duplicate_id_is_named() {
        let dir = three_seed_dir();
        write(
            dir.path(),
            "dup.json",
            r#"{"name":"t","seeds":[{"id":"a","source":"seeds/a.src"},{"id":"b","source":"seeds/b.src"},{"id":"a","source":"seeds/a.src"}]}"#,
        );
        match load_manifest(dir.path().join("dup.json")) {
            Err(Error::DuplicateId(id)) => assert_eq!(id, "a"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn empty_manifest_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        write(dir.path(), "m.json", r#"{"name":"t","seeds":[]}"#);
        assert!(matches!(
            load_manifest(dir.path().join("m.json")),
            Err(Error::EmptyCorpus)
        ));
    }

    #[test]
    fn unreadable_side_file_names_path() {
        let dir = tempfile::tempdir().unwrap();
        write(
            dir.path(),
            "m.json",
            r#"{"name":"t","seeds":[{"id":"a","cfg":"nope.json"}]}"#,
        );
        let err = load_manifest(dir.path().join("m.json")).unwrap_err();
        assert!(err.to_string().contains("nope.json"), "{err}");
    }

    #[test]
    fn seed_without_data_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        write(
            dir.path(),
            "m.json",
            r#"{"name":"t","seeds":[{"id":"a","bug_count":1}]}"#,
        );
        assert!(matches!(
            load_manifest(dir.path().join("m.json")),
            Err(Error::EmptySeed(_))
        ));
    }

    #[test]
    fn budget_rounding() {
        assert_eq!(budget_size(10, 0.20).unwrap(), 2);
        assert_eq!(budget_size(469, 0.50).unwrap(), 234);
        assert_eq!(budget_size(3, 0.05).unwrap(), 1);
        assert_eq!(budget_size(100, 0.29).unwrap(), 29);
        assert_eq!(budget_size(7, 1.0).unwrap(), 7);
        for bad in [0.0, -0.1, 1.01, f64::NAN] {
            assert!(matches!(budget_size(10, bad), Err(Error::Parameter(_))));
        }
    }

    #[test]
    fn subset_round_trips_from_another_directory() {
        let dir = three_seed_dir();
        let corpus = load_manifest(dir.path().join("m.json")).unwrap();
        let order = SelectionOrder {
            corpus: "t".into(),
            method: crate::Method::Random,
            rng_seed: 0,
            order: vec!["b".into(), "c".into(), "a".into()],
        };
        let out = dir.path().join("out/nested/subset.json");
        let kept = save_subset(&corpus, &order, 0.67, &out).unwrap();
        assert_eq!(kept, ["b", "c"]);
        let text = fs::read_to_string(&out).unwrap();
        assert!(text.contains("../../seeds/b.src"), "{text}");
        let sub = load_manifest(&out).unwrap();
        assert_eq!(
            sub.seeds(),
            &[
                corpus.get("b").unwrap().clone(),
                corpus.get("c").unwrap().clone()
            ]
        );
    }

    #[test]
    fn subset_rejects_non_permutation() {
        let dir = three_seed_dir();
        let corpus = load_manifest(dir.path().join("m.json")).unwrap();
        let order = SelectionOrder {
            corpus: "t".into(),
            method: crate::Method::Random,
            rng_seed: 0,
            order: vec!["b".into(), "b".into(), "a".into()],
        };
        assert!(matches!(
            save_subset(&corpus, &order, 0.5, dir.path().join("s.json")),
            Err(Error::Validation(_))
        ));
    }
}
