//! Externally computed code embeddings.
//!
//! Each seed's embedding file is a JSON array of equal-length numeric arrays
//! (one per slice of the program); the seed's vector is their element-wise
//! mean.

use super::FeatureVector;
use crate::corpus::{Corpus, SeedProgram};
use crate::error::{Error, Result};

/// Element-wise mean of `slices`; all slices must share one non-zero length.
pub fn average_slices(seed: &str, slices: &[Vec<f64>]) -> Result<Vec<f64>> {
    let first = slices
        .first()
        .ok_or_else(|| Error::Validation(format!("embedding of seed {seed:?} has no slices")))?;
    let m = first.len();
    if m == 0 {
        return Err(Error::Validation(format!(
            "embedding of seed {seed:?} has dimension 0"
        )));
    }
    let mut sum = vec![0.0; m];
    for (i, slice) in slices.iter().enumerate() {
        if slice.len() != m {
            return Err(Error::Validation(format!(
                "embedding of seed {seed:?}: slice {i} has dimension {} but slice 0 has {m}",
                slice.len()
            )));
        }
        for (acc, &x) in sum.iter_mut().zip(slice) {
            if !x.is_finite() {
                return Err(Error::Validation(format!(
                    "embedding of seed {seed:?} contains a non-finite value"
                )));
            }
            *acc += x;
        }
    }
    let count = slices.len() as f64;
    Ok(sum.into_iter().map(|s| s / count).collect())
}

fn seed_embedding(seed: &SeedProgram) -> Result<Vec<f64>> {
    let side = seed
        .embedding
        .as_ref()
        .ok_or_else(|| Error::MissingRepresentation {
            seed: seed.id.clone(),
            repr: "embedding",
        })?;
    let slices: Vec<Vec<f64>> = serde_json::from_str(&side.text)
        .map_err(|e| Error::parse(side.describe(&seed.id, "embedding"), e))?;
    average_slices(&seed.id, &slices)
}

pub fn ingest_embeddings(corpus: &Corpus) -> Result<Vec<FeatureVector>> {
    let mut out: Vec<FeatureVector> = Vec::with_capacity(corpus.n());
    for seed in corpus.seeds() {
        let values = seed_embedding(seed)?;
        if let Some(first) = out.first() {
            let m = first.dimension_bound();
            if values.len() != m {
                return Err(Error::Validation(format!(
                    "embedding of seed {:?} has dimension {} but seed {:?} has {m}",
                    seed.id,
                    values.len(),
                    first.seed_id
                )));
            }
        }
        out.push(FeatureVector::dense(seed.id.clone(), values));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::Weights;

    #[test]
    fn mean_of_two_slices() {
        assert_eq!(
            average_slices("s", &[vec![1.0, 3.0], vec![3.0, 1.0]]).unwrap(),
            vec![2.0, 2.0]
        );
    }

    #[test]
    fn single_slice_is_unchanged() {
        assert_eq!(
            average_slices("s", &[vec![0.5, -0.2]]).unwrap(),
            vec![0.5, -0.2]
        );
    }

    #[test]
    fn slice_dimension_mismatch() {
        let err = average_slices("s", &[vec![0.0; 4], vec![0.0; 5]]).unwrap_err();
        assert!(matches!(err, Error::Validation(_)));
        assert!(err.to_string().contains("\"s\""));
    }

    #[test]
    fn seed_dimension_mismatch_names_seed() {
        let corpus = Corpus::new(
            "t",
            vec![
                SeedProgram::new("a").with_embedding_json("[[1,2]]"),
                SeedProgram::new("b").with_embedding_json("[[1,2,3]]"),
            ],
        )
        .unwrap();
        let err = ingest_embeddings(&corpus).unwrap_err();
        assert!(err.to_string().contains("\"b\""), "{err}");
    }

    #[test]
    fn dense_vectors_keep_negative_values() {
        let corpus = Corpus::new(
            "t",
            vec![SeedProgram::new("a").with_embedding_json("[[1,-2],[3,-4]]")],
        )
        .unwrap();
        let v = ingest_embeddings(&corpus).unwrap();
        assert_eq!(v[0].weights, Weights::Dense(vec![2.0, -3.0]));
    }

    #[test]
    fn missing_embedding() {
        let corpus = Corpus::new("t", vec![SeedProgram::from_source("a", "x")]).unwrap();
        assert!(matches!(
            ingest_embeddings(&corpus),
            Err(Error::MissingRepresentation { .. })
        ));
    }
}
