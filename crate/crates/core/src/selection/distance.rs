//! Euclidean distances without densifying sparse vectors.
//!
//! Squared differences are always summed in ascending dimension order, so a
//! distance is a pure function of the two vectors' contents: swapping the
//! arguments, or comparing against a densified copy, gives the same bits.

use crate::features::{FeatureVector, Weights};

pub fn squared_euclidean(a: &FeatureVector, b: &FeatureVector) -> f64 {
    match (&a.weights, &b.weights) {
        (Weights::Sparse(x), Weights::Sparse(y)) => sparse_sparse(x, y),
        (Weights::Dense(x), Weights::Dense(y)) => dense_dense(x, y),
        (Weights::Sparse(x), Weights::Dense(y)) | (Weights::Dense(y), Weights::Sparse(x)) => {
            sparse_dense(x, y)
        }
    }
}

pub fn euclidean(a: &FeatureVector, b: &FeatureVector) -> f64 {
    squared_euclidean(a, b).sqrt()
}

/// Distance from `a` to a dense point such as a centroid.
pub fn euclidean_to_point(a: &FeatureVector, point: &[f64]) -> f64 {
    match &a.weights {
        Weights::Sparse(x) => sparse_dense(x, point),
        Weights::Dense(x) => dense_dense(x, point),
    }
    .sqrt()
}

fn sparse_sparse(x: &[(u32, f64)], y: &[(u32, f64)]) -> f64 {
    let (mut i, mut j) = (0, 0);
    let mut sum = 0.0;
    while i < x.len() && j < y.len() {
        let (dx, wx) = x[i];
        let (dy, wy) = y[j];
        let diff = if dx == dy {
            i += 1;
            j += 1;
            wx - wy
        } else if dx < dy {
            i += 1;
            wx
        } else {
            j += 1;
            -wy
        };
        sum += diff * diff;
    }
    for &(_, w) in &x[i..] {
        sum += w * w;
    }
    for &(_, w) in &y[j..] {
        sum += w * w;
    }
    sum
}

fn dense_dense(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len().max(y.len());
    let mut sum = 0.0;
    for d in 0..n {
        let diff = x.get(d).copied().unwrap_or(0.0) - y.get(d).copied().unwrap_or(0.0);
        sum += diff * diff;
    }
    sum
}

fn sparse_dense(x: &[(u32, f64)], y: &[f64]) -> f64 {
    let bound = x.last().map_or(0, |&(d, _)| d as usize + 1).max(y.len());
    let mut it = x.iter().peekable();
    let mut sum = 0.0;
    for d in 0..bound {
        let wx = match it.peek() {
            Some(&&(dx, w)) if dx as usize == d => {
                it.next();
                w
            }
            _ => 0.0,
        };
        let diff = wx - y.get(d).copied().unwrap_or(0.0);
        sum += diff * diff;
    }
    sum
}
