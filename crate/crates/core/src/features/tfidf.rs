//! Token TF-IDF vectors.
//!
//! `tf(t, s) = count(t, s) / |tokens(s)|`, `idf(t) = ln(n / df(t))`, no
//! smoothing. A token present in every seed therefore weighs 0 everywhere.

use std::collections::HashMap;

use rayon::prelude::*;

use super::lexer::tokenize;
use super::{merge_keyed, FeatureKind, FeatureVector};
use crate::corpus::Corpus;
use crate::error::Result;
use crate::registry::DimensionRegistry;

/// Token counts in first-occurrence order plus the token total.
fn counts(tokens: Vec<String>) -> (Vec<(String, usize)>, usize) {
    let total = tokens.len();
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut out: Vec<(String, usize)> = Vec::new();
    for tok in tokens {
        match index.get(&tok) {
            Some(&i) => out[i].1 += 1,
            None => {
                index.insert(tok.clone(), out.len());
                out.push((tok, 1));
            }
        }
    }
    (out, total)
}

pub fn tfidf_weight(count: usize, total: usize, n: usize, df: usize) -> f64 {
    (count as f64 / total as f64) * (n as f64 / df as f64).ln()
}

pub fn tfidf_vectors(corpus: &Corpus) -> Result<(DimensionRegistry, Vec<FeatureVector>)> {
    let per_seed: Vec<(Vec<(String, usize)>, usize)> = corpus
        .seeds()
        .par_iter()
        .map(|s| tokenize(s).map(counts))
        .collect::<Result<_>>()?;

    let mut df: HashMap<&str, usize> = HashMap::new();
    for (toks, _) in &per_seed {
        for (t, _) in toks {
            *df.entry(t.as_str()).or_default() += 1;
        }
    }

    let n = corpus.n();
    let weighted = per_seed
        .iter()
        .map(|(toks, total)| {
            toks.iter()
                .map(|(t, c)| (t.clone(), tfidf_weight(*c, *total, n, df[t.as_str()])))
                .collect()
        })
        .collect();
    merge_keyed(corpus, FeatureKind::Token, weighted)
}
