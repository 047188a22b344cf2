//! Score-sorted strategies: coverage popcount, greedy coverage increments,
//! prefuzz bug counts, and the random baseline.

use super::{Method, SelectionOrder};
use crate::corpus::Corpus;
use crate::coverage::{load_coverage, CoverageBitmap};
use crate::error::{Error, Result};
use crate::rng::TieRng;

/// Positions sorted by descending score. Equal-score runs are shuffled, in
/// descending score order, so only within-class order depends on the RNG.
pub fn rank_descending(scores: &[u64], rng: &mut TieRng) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].cmp(&scores[a]));
    let mut start = 0;
    while start < order.len() {
        let score = scores[order[start]];
        let end = start
            + order[start..]
                .iter()
                .take_while(|&&i| scores[i] == score)
                .count();
        rng.shuffle(&mut order[start..end]);
        start = end;
    }
    order
}

/// CISS_P over already loaded bitmaps.
pub fn popcount_order(bitmaps: &[CoverageBitmap], rng_seed: u64) -> Vec<usize> {
    let scores: Vec<u64> = bitmaps.iter().map(|b| b.popcount() as u64).collect();
    rank_descending(&scores, &mut TieRng::new(rng_seed))
}

pub fn coverage_order_p(corpus: &Corpus, rng_seed: u64) -> Result<SelectionOrder> {
    let bitmaps = load_coverage(corpus)?;
    let order = popcount_order(&bitmaps, rng_seed);
    Ok(SelectionOrder::from_positions(
        corpus,
        Method::CissP,
        rng_seed,
        &order,
    ))
}

/// CISS_M result: the full order and how many leading entries came from the
/// greedy phase.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GreedyOrder {
    pub order: Vec<usize>,
    pub greedy_len: usize,
}

/// Greedy max-increment phase until no remaining seed adds coverage, then
/// the remainder by descending popcount. One RNG stream serves both phases.
pub fn greedy_coverage_order(bitmaps: &[CoverageBitmap], rng_seed: u64) -> Result<GreedyOrder> {
    let first = bitmaps
        .first()
        .ok_or_else(|| Error::Parameter("no coverage bitmaps".into()))?;
    let mut rng = TieRng::new(rng_seed);
    let mut acc = CoverageBitmap::empty("<accumulated>", first.width());
    let mut remaining: Vec<usize> = (0..bitmaps.len()).collect();
    let mut order = Vec::with_capacity(bitmaps.len());

    loop {
        let mut best = 0;
        let mut tied: Vec<usize> = Vec::new();
        for (slot, &i) in remaining.iter().enumerate() {
            let inc = bitmaps[i].count_not_in(&acc);
            if inc > best {
                best = inc;
                tied.clear();
                tied.push(slot);
            } else if inc == best && inc > 0 {
                tied.push(slot);
            }
        }
        if best == 0 {
            break;
        }
        let slot = tied[rng.pick_tied(tied.len())];
        let pick = remaining.remove(slot);
        acc.union_with(&bitmaps[pick])?;
        order.push(pick);
    }

    let greedy_len = order.len();
    let scores: Vec<u64> = remaining
        .iter()
        .map(|&i| bitmaps[i].popcount() as u64)
        .collect();
    order.extend(
        rank_descending(&scores, &mut rng)
            .into_iter()
            .map(|j| remaining[j]),
    );
    Ok(GreedyOrder { order, greedy_len })
}

pub fn coverage_order_m(corpus: &Corpus, rng_seed: u64) -> Result<SelectionOrder> {
    let bitmaps = load_coverage(corpus)?;
    let greedy = greedy_coverage_order(&bitmaps, rng_seed)?;
    Ok(SelectionOrder::from_positions(
        corpus,
        Method::CissM,
        rng_seed,
        &greedy.order,
    ))
}

pub fn prefuzz_order(corpus: &Corpus, rng_seed: u64) -> Result<SelectionOrder> {
    let scores = corpus
        .seeds()
        .iter()
        .map(|s| {
            s.bug_count.ok_or_else(|| Error::MissingRepresentation {
                seed: s.id.clone(),
                repr: "bug count",
            })
        })
        .collect::<Result<Vec<u64>>>()?;
    let order = rank_descending(&scores, &mut TieRng::new(rng_seed));
    Ok(SelectionOrder::from_positions(
        corpus,
        Method::Piss,
        rng_seed,
        &order,
    ))
}

pub fn random_permutation(n: usize, rng_seed: u64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    TieRng::new(rng_seed).shuffle(&mut order);
    order
}

pub fn random_order(corpus: &Corpus, rng_seed: u64) -> Result<SelectionOrder> {
    let order = random_permutation(corpus.n(), rng_seed);
    Ok(SelectionOrder::from_positions(
        corpus,
        Method::Random,
        rng_seed,
        &order,
    ))
}
