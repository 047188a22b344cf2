//! Farthest point sampling over feature vectors.
//!
//! The first pick is the seed farthest from the centroid of all vectors.
//! Every later pick maximizes the minimum distance to the seeds already
//! picked. Each unpicked seed caches its current minimum distance, so a
//! round costs one distance evaluation per remaining seed.
//!
//! Ties are exact float equality. The tie set is listed in corpus order and
//! one member is drawn with [`TieRng::pick_tied`].

use rayon::prelude::*;

use super::distance::{euclidean, euclidean_to_point};
use super::{Method, SelectionOrder};
use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::features::{FeatureKind, FeatureVector, Weights};
use crate::rng::TieRng;

/// Below this many remaining seeds the min-distance update stays serial.
const PARALLEL_THRESHOLD: usize = 256;

#[derive(Debug, Clone, PartialEq)]
pub struct Centroid {
    pub values: Vec<f64>,
}

/// One FPS round: the tie set at the maximal score and the member drawn.
#[derive(Debug, Clone, PartialEq)]
pub struct FpsStep {
    pub pick: usize,
    pub score: f64,
    pub tied: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FpsTrace {
    pub centroid: Centroid,
    pub steps: Vec<FpsStep>,
}

impl FpsTrace {
    pub fn order(&self) -> Vec<usize> {
        self.steps.iter().map(|s| s.pick).collect()
    }
}

fn validate(vectors: &[FeatureVector]) -> Result<FeatureKind> {
    let first = vectors
        .first()
        .ok_or_else(|| Error::Parameter("no feature vectors".into()))?;
    for v in vectors {
        if v.kind != first.kind {
            return Err(Error::Parameter(format!(
                "mixed feature kinds: {:?} is {} but {:?} is {}",
                first.seed_id, first.kind, v.seed_id, v.kind
            )));
        }
        let finite = match &v.weights {
            Weights::Sparse(e) => e.iter().all(|(_, w)| w.is_finite()),
            Weights::Dense(d) => d.iter().all(|w| w.is_finite()),
        };
        if !finite {
            return Err(Error::Parameter(format!(
                "feature vector of {:?} has a non-finite weight",
                v.seed_id
            )));
        }
        if let (Weights::Dense(a), Weights::Dense(b)) = (&first.weights, &v.weights) {
            if a.len() != b.len() {
                return Err(Error::Parameter(format!(
                    "dense vectors of {:?} and {:?} differ in dimension ({} vs {})",
                    first.seed_id,
                    v.seed_id,
                    a.len(),
                    b.len()
                )));
            }
        }
    }
    Ok(first.kind)
}

/// Element-wise mean over the union dimension space (absent entries are 0).
pub fn centroid(vectors: &[FeatureVector]) -> Result<Centroid> {
    validate(vectors)?;
    let m = vectors
        .iter()
        .map(FeatureVector::dimension_bound)
        .max()
        .unwrap_or(0);
    let mut sum = vec![0.0; m];
    for v in vectors {
        match &v.weights {
            Weights::Sparse(e) => {
                for &(d, w) in e {
                    sum[d as usize] += w;
                }
            }
            Weights::Dense(values) => {
                for (acc, w) in sum.iter_mut().zip(values) {
                    *acc += w;
                }
            }
        }
    }
    let n = vectors.len() as f64;
    Ok(Centroid {
        values: sum.into_iter().map(|s| s / n).collect(),
    })
}

/// Highest score among unpicked seeds and every unpicked seed reaching it,
/// in index order.
fn tie_set(scores: &[f64], picked: &[bool]) -> (f64, Vec<usize>) {
    let mut best = f64::NEG_INFINITY;
    let mut tied = Vec::new();
    for (i, &s) in scores.iter().enumerate() {
        if picked[i] {
            continue;
        }
        if s > best {
            best = s;
            tied.clear();
            tied.push(i);
        } else if s == best {
            tied.push(i);
        }
    }
    (best, tied)
}

/// Full FPS run with the per-round tie sets recorded.
pub fn fps_trace(vectors: &[FeatureVector], rng_seed: u64) -> Result<FpsTrace> {
    let centroid = centroid(vectors)?;
    let n = vectors.len();
    let mut rng = TieRng::new(rng_seed);
    let mut picked = vec![false; n];
    let mut steps = Vec::with_capacity(n);

    let mut scores: Vec<f64> = vectors
        .par_iter()
        .map(|v| euclidean_to_point(v, &centroid.values))
        .collect();
    let (score, tied) = tie_set(&scores, &picked);
    let mut last = tied[rng.pick_tied(tied.len())];
    picked[last] = true;
    steps.push(FpsStep {
        pick: last,
        score,
        tied,
    });

    scores.iter_mut().for_each(|s| *s = f64::INFINITY);
    while steps.len() < n {
        let anchor = &vectors[last];
        let update = |(i, s): (usize, &mut f64)| {
            if !picked[i] {
                let d = euclidean(&vectors[i], anchor);
                if d < *s {
                    *s = d;
                }
            }
        };
        if n - steps.len() >= PARALLEL_THRESHOLD {
            scores.par_iter_mut().enumerate().for_each(update);
        } else {
            scores.iter_mut().enumerate().for_each(update);
        }
        let (score, tied) = tie_set(&scores, &picked);
        last = tied[rng.pick_tied(tied.len())];
        picked[last] = true;
        steps.push(FpsStep {
            pick: last,
            score,
            tied,
        });
    }
    Ok(FpsTrace { centroid, steps })
}

/// FPS order as indices into `vectors`.
pub fn fps_indices(vectors: &[FeatureVector], rng_seed: u64) -> Result<Vec<usize>> {
    fps_trace(vectors, rng_seed).map(|t| t.order())
}

/// FPS order of `corpus` from one feature vector per seed (any order).
pub fn fps_order(
    corpus: &Corpus,
    vectors: &[FeatureVector],
    rng_seed: u64,
) -> Result<SelectionOrder> {
    let aligned = vectors.len() == corpus.n()
        && vectors
            .iter()
            .zip(corpus.seeds())
            .all(|(v, s)| v.seed_id == s.id);
    let owned;
    let vectors = if aligned {
        vectors
    } else {
        owned = super::align_vectors(corpus, vectors.to_vec())?;
        &owned[..]
    };
    let kind = validate(vectors)?;
    let order = fps_indices(vectors, rng_seed)?;
    Ok(SelectionOrder::from_positions(
        corpus,
        Method::Fiss(kind),
        rng_seed,
        &order,
    ))
}
