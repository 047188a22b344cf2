//! Seed ordering strategies.
//!
//! Every strategy turns a corpus into a [`SelectionOrder`], a permutation of
//! its seed ids; budgets are prefixes of that order. All randomness is tie
//! breaking through [`TieRng`](crate::rng::TieRng), seeded by the recorded
//! `rng_seed`.

pub mod distance;
pub mod fps;
pub mod ranking;

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::features::{self, FeatureKind, FeatureVector};
use crate::io;

pub use fps::{centroid, fps_order, fps_trace, Centroid, FpsStep, FpsTrace};
pub use ranking::{coverage_order_m, coverage_order_p, prefuzz_order, random_order};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    /// Farthest point sampling over features of the given kind.
    Fiss(FeatureKind),
    /// Descending coverage popcount.
    CissP,
    /// Greedy coverage increments, then popcount.
    CissM,
    /// Descending prefuzz bug count.
    Piss,
    Random,
}

impl Method {
    /// Whether the method needs a feature kind.
    pub fn needs_kind(self) -> bool {
        matches!(self, Method::Fiss(_))
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::Fiss(kind) => write!(f, "fiss-{}", kind.tag()),
            Method::CissP => f.write_str("ciss-p"),
            Method::CissM => f.write_str("ciss-m"),
            Method::Piss => f.write_str("piss"),
            Method::Random => f.write_str("random"),
        }
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ciss-p" => Ok(Method::CissP),
            "ciss-m" => Ok(Method::CissM),
            "piss" => Ok(Method::Piss),
            "random" => Ok(Method::Random),
            other => match other.strip_prefix("fiss-") {
                Some(kind) => Ok(Method::Fiss(kind.parse()?)),
                None => Err(Error::Parameter(format!("unknown method {other:?}"))),
            },
        }
    }
}

impl Serialize for Method {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Method {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelectionOrder {
    pub corpus: String,
    pub method: Method,
    pub rng_seed: u64,
    pub order: Vec<String>,
}

impl SelectionOrder {
    pub(crate) fn from_positions(
        corpus: &Corpus,
        method: Method,
        rng_seed: u64,
        positions: &[usize],
    ) -> Self {
        SelectionOrder {
            corpus: corpus.name.clone(),
            method,
            rng_seed,
            order: positions
                .iter()
                .map(|&i| corpus.seeds()[i].id.clone())
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("order serializes");
        s.push('\n');
        s
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        io::write_atomic(path, self.to_json().as_bytes())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = io::read_text(path)?;
        serde_json::from_str(&text)
            .map_err(|e| Error::parse(format!("order file {}", path.display()), e))
    }
}

/// Reorders `vectors` into corpus order, checking every seed has exactly one.
pub fn align_vectors(corpus: &Corpus, vectors: Vec<FeatureVector>) -> Result<Vec<FeatureVector>> {
    let mut slots: Vec<Option<FeatureVector>> = vec![None; corpus.n()];
    for v in vectors {
        let pos = corpus.position(&v.seed_id).ok_or_else(|| {
            Error::Validation(format!("feature vector for unknown seed {:?}", v.seed_id))
        })?;
        if slots[pos].replace(v).is_some() {
            return Err(Error::Validation(format!(
                "two feature vectors for seed {:?}",
                corpus.seeds()[pos].id
            )));
        }
    }
    slots
        .into_iter()
        .zip(corpus.seeds())
        .map(|(slot, seed)| {
            slot.ok_or_else(|| Error::MissingRepresentation {
                seed: seed.id.clone(),
                repr: "feature vector",
            })
        })
        .collect()
}

/// Orders the corpus with `method`, extracting features as needed.
pub fn order_corpus(corpus: &Corpus, method: Method, rng_seed: u64) -> Result<SelectionOrder> {
    match method {
        Method::Fiss(kind) => {
            let (_, vectors) = features::extract(corpus, kind)?;
            fps_order(corpus, &vectors, rng_seed)
        }
        Method::CissP => coverage_order_p(corpus, rng_seed),
        Method::CissM => coverage_order_m(corpus, rng_seed),
        Method::Piss => prefuzz_order(corpus, rng_seed),
        Method::Random => random_order(corpus, rng_seed),
    }
}
