//! Ensembles of embedding models.
//!
//! The ensemble similarity of two terms is the arithmetic mean of their
//! cosine similarities over the models that contain *both* terms. Models
//! missing either term are left out of the mean instead of contributing a
//! zero, so terms that only a specialised model knows are not penalised.

use std::collections::{BTreeSet, HashSet};
use std::sync::Arc;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::embedding::EmbeddingModel;
use crate::error::{Error, Result};

/// Per-model similarity, `None` when the model lacks one of the terms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSimilarity {
    pub model: String,
    pub similarity: Option<f64>,
}

/// A candidate term surfaced by at least one model's top-k list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub term: String,
    /// Ensemble similarity to the query.
    pub avg_similarity: f64,
    /// One entry per ensemble model, in ensemble order.
    pub per_model: Vec<ModelSimilarity>,
}

#[derive(Debug, Clone)]
pub struct Ensemble {
    models: Vec<Arc<EmbeddingModel>>,
}

impl Ensemble {
    pub fn new(models: Vec<Arc<EmbeddingModel>>) -> Result<Self> {
        if models.is_empty() {
            return Err(Error::EmptyEnsemble);
        }
        let mut seen = HashSet::new();
        for m in &models {
            if !seen.insert(m.id()) {
                return Err(Error::DuplicateModel(m.id().to_owned()));
            }
        }
        Ok(Ensemble { models })
    }

    pub fn models(&self) -> &[Arc<EmbeddingModel>] {
        &self.models
    }

    pub fn model_ids(&self) -> Vec<String> {
        self.models.iter().map(|m| m.id().to_owned()).collect()
    }

    pub fn per_model_similarity(&self, a: &str, b: &str) -> Vec<ModelSimilarity> {
        self.models
            .iter()
            .map(|m| ModelSimilarity {
                model: m.id().to_owned(),
                similarity: m.similarity(a, b),
            })
            .collect()
    }

    /// Mean cosine similarity over the models containing both terms.
    pub fn similarity(&self, a: &str, b: &str) -> Option<f64> {
        mean(self.models.iter().filter_map(|m| m.similarity(a, b)))
    }

    /// Union of every model's `top_k(query, k, exclude)`, rescored with the
    /// ensemble similarity and sorted by (score desc, term asc).
    pub fn candidates(&self, query: &str, k: usize, exclude: &HashSet<String>) -> Vec<Candidate> {
        let pool: BTreeSet<String> = self
            .models
            .iter()
            .flat_map(|m| m.top_k(query, k, exclude))
            .map(|n| n.term)
            .collect();
        let mut out: Vec<Candidate> = pool
            .into_iter()
            .filter_map(|term| {
                let per_model = self.per_model_similarity(&term, query);
                let avg = mean(per_model.iter().filter_map(|s| s.similarity))?;
                Some(Candidate {
                    term,
                    avg_similarity: avg,
                    per_model,
                })
            })
            .collect();
        out.sort_by(|a, b| {
            b.avg_similarity
                .total_cmp(&a.avg_similarity)
                .then_with(|| a.term.cmp(&b.term))
        });
        out
    }
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, count) = values.fold((0.0, 0usize), |(s, c), v| (s + v, c + 1));
    (count > 0).then(|| sum / count as f64)
}

/// Summary of a loaded model, as listed by the service.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelInfo {
    pub id: String,
    pub dimension: usize,
    pub vocab_size: usize,
}

/// All models loaded by a process, addressable by id.
#[derive(Debug, Clone, Default)]
pub struct ModelRegistry {
    models: IndexMap<String, Arc<EmbeddingModel>>,
}

impl ModelRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, model: EmbeddingModel) -> Result<()> {
        self.insert_shared(Arc::new(model))
    }

    pub fn insert_shared(&mut self, model: Arc<EmbeddingModel>) -> Result<()> {
        if self.models.contains_key(model.id()) {
            return Err(Error::DuplicateModel(model.id().to_owned()));
        }
        self.models.insert(model.id().to_owned(), model);
        Ok(())
    }

    pub fn get(&self, id: &str) -> Option<&Arc<EmbeddingModel>> {
        self.models.get(id)
    }

    pub fn ids(&self) -> Vec<String> {
        self.models.keys().cloned().collect()
    }

    pub fn info(&self) -> Vec<ModelInfo> {
        self.models
            .values()
            .map(|m| ModelInfo {
                id: m.id().to_owned(),
                dimension: m.dimension(),
                vocab_size: m.len(),
            })
            .collect()
    }

    pub fn is_empty(&self) -> bool {
        self.models.is_empty()
    }

    /// Builds the ensemble for `ids`, in the given order.
    pub fn ensemble(&self, ids: &[String]) -> Result<Ensemble> {
        let models = ids
            .iter()
            .map(|id| {
                self.models
                    .get(id)
                    .cloned()
                    .ok_or_else(|| Error::UnknownModel(id.clone()))
            })
            .collect::<Result<Vec<_>>>()?;
        Ensemble::new(models)
    }
}
