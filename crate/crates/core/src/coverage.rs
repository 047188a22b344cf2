//! Per-seed coverage bitmaps.
//!
//! On disk each seed has `{"width": W, "covered": [i, ...]}`; indices must be
//! below `W` and every seed in a corpus must declare the same width.

use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, SeedProgram};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverageBitmap {
    pub seed_id: String,
    width: usize,
    words: Vec<u64>,
}

#[derive(Debug, Serialize, Deserialize)]
struct CoverageFile {
    width: usize,
    covered: Vec<usize>,
}

impl CoverageBitmap {
    pub fn empty(seed_id: impl Into<String>, width: usize) -> Self {
        CoverageBitmap {
            seed_id: seed_id.into(),
            width,
            words: vec![0; width.div_ceil(64)],
        }
    }

    pub fn from_indices(
        seed_id: impl Into<String>,
        width: usize,
        indices: impl IntoIterator<Item = usize>,
    ) -> Result<Self> {
        let mut bm = CoverageBitmap::empty(seed_id, width);
        for i in indices {
            if i >= width {
                return Err(Error::Validation(format!(
                    "coverage of seed {:?}: index {i} out of range for width {width}",
                    bm.seed_id
                )));
            }
            bm.words[i / 64] |= 1 << (i % 64);
        }
        Ok(bm)
    }

    pub fn from_json(seed_id: &str, text: &str) -> Result<Self> {
        let file: CoverageFile = serde_json::from_str(text)
            .map_err(|e| Error::parse(format!("coverage of seed {seed_id:?}"), e))?;
        CoverageBitmap::from_indices(seed_id, file.width, file.covered)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&CoverageFile {
            width: self.width,
            covered: self.ones().collect(),
        })
        .unwrap()
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn popcount(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn contains(&self, i: usize) -> bool {
        i < self.width && self.words[i / 64] & (1 << (i % 64)) != 0
    }

    /// Covered indices in ascending order.
    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            (0..64)
                .filter(move |b| w & (1u64 << b) != 0)
                .map(move |b| wi * 64 + b)
        })
    }

    fn check_width(&self, other: &CoverageBitmap) -> Result<()> {
        if self.width != other.width {
            return Err(Error::Validation(format!(
                "coverage width mismatch: {:?} has {} but {:?} has {}",
                self.seed_id, self.width, other.seed_id, other.width
            )));
        }
        Ok(())
    }

    pub fn union_with(&mut self, other: &CoverageBitmap) -> Result<()> {
        self.check_width(other)?;
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
        Ok(())
    }

    /// `popcount(self \ other)` without allocating.
    pub fn count_not_in(&self, other: &CoverageBitmap) -> usize {
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & !b).count_ones() as usize)
            .sum()
    }
}

fn seed_coverage(seed: &SeedProgram) -> Result<CoverageBitmap> {
    let side = seed
        .coverage
        .as_ref()
        .ok_or_else(|| Error::MissingRepresentation {
            seed: seed.id.clone(),
            repr: "coverage",
        })?;
    CoverageBitmap::from_json(&seed.id, &side.text).map_err(|e| match e {
        Error::Parse { message, .. } => Error::parse(side.describe(&seed.id, "coverage"), message),
        other => other,
    })
}

/// Loads every seed's bitmap in corpus order and checks the widths agree.
pub fn load_coverage(corpus: &Corpus) -> Result<Vec<CoverageBitmap>> {
    let bitmaps = corpus
        .seeds()
        .iter()
        .map(seed_coverage)
        .collect::<Result<Vec<_>>>()?;
    if let Some(first) = bitmaps.first() {
        for bm in &bitmaps[1..] {
            first.check_width(bm)?;
        }
    }
    Ok(bitmaps)
}

pub fn union_coverage(bitmaps: &[CoverageBitmap]) -> Result<CoverageBitmap> {
    let (first, rest) = bitmaps
        .split_first()
        .ok_or_else(|| Error::Parameter("union of an empty bitmap list".into()))?;
    let mut acc = first.clone();
    acc.seed_id = "<union>".into();
    for bm in rest {
        acc.union_with(bm)?;
    }
    Ok(acc)
}

/// Units `candidate` covers beyond `accumulated`.
pub fn increment(candidate: &CoverageBitmap, accumulated: &CoverageBitmap) -> Result<usize> {
    candidate.check_width(accumulated)?;
    Ok(candidate.count_not_in(accumulated))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverageSummary {
    pub seeds: usize,
    pub width: usize,
    pub union_popcount: usize,
    pub max_popcount: usize,
    pub min_popcount: usize,
}

pub fn summarize(bitmaps: &[CoverageBitmap]) -> Result<CoverageSummary> {
    let union = union_coverage(bitmaps)?;
    let pops = bitmaps.iter().map(CoverageBitmap::popcount);
    Ok(CoverageSummary {
        seeds: bitmaps.len(),
        width: union.width(),
        union_popcount: union.popcount(),
        max_popcount: pops.clone().max().unwrap_or(0),
        min_popcount: pops.min().unwrap_or(0),
    })
}
