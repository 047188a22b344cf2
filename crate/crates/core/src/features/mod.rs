//! Per-seed feature vectors.
//!
//! Sparse kinds (token TF-IDF, AST 3-grams, CFG 3-grams) are extracted per
//! seed in parallel and then merged into a [`DimensionRegistry`] in corpus
//! order, so dimension ids never depend on scheduling. Embeddings are dense
//! and come from external files.

pub mod ast;
pub mod cfg;
pub mod embedding;
pub mod frontend;
pub mod lexer;
pub mod output;
pub mod tfidf;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::registry::DimensionRegistry;

pub use ast::{ast_3gram_vectors, AstNode};
pub use cfg::{cfg_3gram_vectors, CfgGraph, CfgNode};
pub use embedding::ingest_embeddings;
pub use frontend::build_frontend_repr;
pub use lexer::tokenize;
pub use tfidf::tfidf_vectors;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FeatureKind {
    Token,
    Ast3Gram,
    Cfg3Gram,
    Embedding,
}

impl FeatureKind {
    pub const ALL: [FeatureKind; 4] = [
        FeatureKind::Token,
        FeatureKind::Ast3Gram,
        FeatureKind::Cfg3Gram,
        FeatureKind::Embedding,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FeatureKind::Token => "token",
            FeatureKind::Ast3Gram => "ast3gram",
            FeatureKind::Cfg3Gram => "cfg3gram",
            FeatureKind::Embedding => "embedding",
        }
    }

    /// Short tag used in method names (`fiss-ts`, `fiss-cfg3gram`, ...).
    pub fn tag(self) -> &'static str {
        match self {
            FeatureKind::Token => "ts",
            other => other.as_str(),
        }
    }
}

impl fmt::Display for FeatureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FeatureKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ts" | "token" => Ok(FeatureKind::Token),
            "ast3gram" | "ast" => Ok(FeatureKind::Ast3Gram),
            "cfg3gram" | "cfg" => Ok(FeatureKind::Cfg3Gram),
            "embedding" => Ok(FeatureKind::Embedding),
            other => Err(Error::Parameter(format!("unknown feature kind {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Weights {
    /// `(dimension id, weight)` sorted by id, no explicit zeros.
    Sparse(Vec<(u32, f64)>),
    Dense(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    pub seed_id: String,
    pub kind: FeatureKind,
    pub weights: Weights,
}

impl FeatureVector {
    /// Builds a sparse vector; entries are sorted and zeros are dropped.
    /// Repeated ids are summed.
    pub fn sparse(
        seed_id: impl Into<String>,
        kind: FeatureKind,
        entries: impl IntoIterator<Item = (u32, f64)>,
    ) -> Self {
        let mut entries: Vec<(u32, f64)> = entries.into_iter().collect();
        entries.sort_by_key(|&(d, _)| d);
        let mut merged: Vec<(u32, f64)> = Vec::with_capacity(entries.len());
        for (d, w) in entries {
            match merged.last_mut() {
                Some((last, acc)) if *last == d => *acc += w,
                _ => merged.push((d, w)),
            }
        }
        merged.retain(|&(_, w)| w != 0.0);
        FeatureVector {
            seed_id: seed_id.into(),
            kind,
            weights: Weights::Sparse(merged),
        }
    }

    pub fn dense(seed_id: impl Into<String>, values: Vec<f64>) -> Self {
        FeatureVector {
            seed_id: seed_id.into(),
            kind: FeatureKind::Embedding,
            weights: Weights::Dense(values),
        }
    }

    pub fn get(&self, dim: u32) -> f64 {
        match &self.weights {
            Weights::Sparse(e) => e
                .binary_search_by_key(&dim, |&(d, _)| d)
                .map(|i| e[i].1)
                .unwrap_or(0.0),
            Weights::Dense(v) => v.get(dim as usize).copied().unwrap_or(0.0),
        }
    }

    /// One past the highest dimension this vector can touch.
    pub fn dimension_bound(&self) -> usize {
        match &self.weights {
            Weights::Sparse(e) => e.last().map(|&(d, _)| d as usize + 1).unwrap_or(0),
            Weights::Dense(v) => v.len(),
        }
    }

    pub fn nnz(&self) -> usize {
        match &self.weights {
            Weights::Sparse(e) => e.len(),
            Weights::Dense(v) => v.iter().filter(|w| **w != 0.0).count(),
        }
    }

    /// Sum of all weights.
    pub fn total(&self) -> f64 {
        match &self.weights {
            Weights::Sparse(e) => e.iter().map(|&(_, w)| w).sum(),
            Weights::Dense(v) => v.iter().sum(),
        }
    }

    /// Every weight multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        let weights = match &self.weights {
            Weights::Sparse(e) => {
                Weights::Sparse(e.iter().map(|&(d, w)| (d, w * factor)).collect())
            }
            Weights::Dense(v) => Weights::Dense(v.iter().map(|w| w * factor).collect()),
        };
        FeatureVector {
            seed_id: self.seed_id.clone(),
            kind: self.kind,
            weights,
        }
    }

    /// Dense copy over `0..dims`.
    pub fn to_dense(&self, dims: usize) -> Vec<f64> {
        match &self.weights {
            Weights::Sparse(e) => {
                let mut out = vec![0.0; dims.max(self.dimension_bound())];
                for &(d, w) in e {
                    out[d as usize] = w;
                }
                out
            }
            Weights::Dense(v) => {
                let mut out = v.clone();
                out.resize(dims.max(v.len()), 0.0);
                out
            }
        }
    }
}

/// Per-seed keyed counts, in first-occurrence order.
pub(crate) type KeyedCounts = Vec<(String, f64)>;

/// Runs `extract` on every seed (in parallel) and merges the results into a
/// registry in corpus order.
pub(crate) fn extract_sparse<F>(
    corpus: &Corpus,
    kind: FeatureKind,
    extract: F,
) -> Result<(DimensionRegistry, Vec<FeatureVector>)>
where
    F: Fn(&crate::corpus::SeedProgram) -> Result<KeyedCounts> + Sync,
{
    let per_seed: Vec<KeyedCounts> = corpus
        .seeds()
        .par_iter()
        .map(&extract)
        .collect::<Result<_>>()?;
    merge_keyed(corpus, kind, per_seed)
}

pub(crate) fn merge_keyed(
    corpus: &Corpus,
    kind: FeatureKind,
    per_seed: Vec<KeyedCounts>,
) -> Result<(DimensionRegistry, Vec<FeatureVector>)> {
    let mut registry = DimensionRegistry::new(kind);
    let mut vectors = Vec::with_capacity(per_seed.len());
    for (seed, counts) in corpus.seeds().iter().zip(per_seed) {
        let mut entries = Vec::with_capacity(counts.len());
        for (key, w) in counts {
            entries.push((registry.intern(&key)?, w));
        }
        vectors.push(FeatureVector::sparse(seed.id.clone(), kind, entries));
    }
    registry.freeze();
    Ok((registry, vectors))
}

/// Extracts vectors of the given kind; embeddings have no registry.
pub fn extract(
    corpus: &Corpus,
    kind: FeatureKind,
) -> Result<(Option<DimensionRegistry>, Vec<FeatureVector>)> {
    match kind {
        FeatureKind::Token => tfidf_vectors(corpus).map(|(r, v)| (Some(r), v)),
        FeatureKind::Ast3Gram => ast_3gram_vectors(corpus).map(|(r, v)| (Some(r), v)),
        FeatureKind::Cfg3Gram => cfg_3gram_vectors(corpus).map(|(r, v)| (Some(r), v)),
        FeatureKind::Embedding => ingest_embeddings(corpus).map(|v| (None, v)),
    }
}

/// Key for a 3-label chain: the JSON encoding of the label triple.
pub(crate) fn chain_key(a: &str, b: &str, c: &str) -> String {
    serde_json::to_string(&[a, b, c]).expect("strings serialize")
}

/// A 3-label chain; `kind` is [`FeatureKind::Ast3Gram`] or [`FeatureKind::Cfg3Gram`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NGramChain {
    pub labels: [String; 3],
    pub kind: FeatureKind,
}

impl NGramChain {
    pub fn key(&self) -> String {
        chain_key(&self.labels[0], &self.labels[1], &self.labels[2])
    }

    pub fn from_key(kind: FeatureKind, key: &str) -> Result<Self> {
        let labels: [String; 3] = serde_json::from_str(key)
            .map_err(|e| Error::parse(format!("3-gram key {key:?}"), e))?;
        Ok(NGramChain { labels, kind })
    }
}
