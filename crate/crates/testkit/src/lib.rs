//! Brute-force reference implementations used as test oracles.
//!
//! Nothing here shares code with the engine: files are re-parsed from disk,
//! similarities are recomputed with plain loops, and neighbour lists come
//! from a full sort of the vocabulary.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs;
use std::path::Path;

/// A model re-parsed from a word2vec text file.
pub struct RawModel {
    pub id: String,
    pub order: Vec<String>,
    pub vectors: HashMap<String, Vec<f64>>,
}

impl RawModel {
    /// Parses `path`, keeping the first occurrence of each (lowercased)
    /// term and dropping zero vectors.
    pub fn parse(path: impl AsRef<Path>, id: &str) -> RawModel {
        let text = fs::read_to_string(path).expect("readable model file");
        let mut lines = text.lines();
        let header: Vec<usize> = lines
            .next()
            .expect("header")
            .split(' ')
            .map(|x| x.trim().parse().expect("numeric header"))
            .collect();
        let dim = header[1];
        let mut order = Vec::new();
        let mut vectors = HashMap::new();
        for line in lines {
            let mut parts = line.split_whitespace();
            let Some(term) = parts.next() else { continue };
            let term = term.to_lowercase();
            let raw: Vec<f64> = parts.map(|x| x.parse().unwrap()).collect();
            assert_eq!(raw.len(), dim, "row {term}");
            let mut norm = 0.0;
            for x in &raw {
                norm += x * x;
            }
            let norm = norm.sqrt();
            if norm == 0.0 || vectors.contains_key(&term) {
                continue;
            }
            order.push(term.clone());
            vectors.insert(term, raw.iter().map(|x| x / norm).collect());
        }
        RawModel {
            id: id.to_owned(),
            order,
            vectors,
        }
    }

    pub fn cosine(&self, a: &str, b: &str) -> Option<f64> {
        let (x, y) = (self.vectors.get(a)?, self.vectors.get(b)?);
        let mut dot = 0.0;
        for i in 0..x.len() {
            dot += x[i] * y[i];
        }
        Some(dot)
    }

    /// Full scan, full sort by (score desc, term asc), then truncate.
    pub fn brute_top_k(
        &self,
        query: &str,
        k: usize,
        exclude: &BTreeSet<String>,
    ) -> Vec<(String, f64)> {
        if !self.vectors.contains_key(query) {
            return Vec::new();
        }
        let mut all: Vec<(String, f64)> = self
            .order
            .iter()
            .filter(|t| t.as_str() != query && !exclude.contains(*t))
            .map(|t| (t.clone(), self.cosine(query, t).unwrap()))
            .collect();
        all.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
        all.truncate(k);
        all
    }
}

/// Reference ensemble and session scoring.
pub struct Oracle {
    pub models: Vec<RawModel>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleSuggestion {
    pub term: String,
    pub score: f64,
    pub anchor: String,
}

impl Oracle {
    pub fn new(models: Vec<RawModel>) -> Oracle {
        Oracle { models }
    }

    /// Mean cosine over models containing both terms.
    pub fn p(&self, a: &str, b: &str) -> Option<f64> {
        let values: Vec<f64> = self.models.iter().filter_map(|m| m.cosine(a, b)).collect();
        if values.is_empty() {
            None
        } else {
            Some(values.iter().sum::<f64>() / values.len() as f64)
        }
    }

    pub fn p_hat(&self, a: &str, b: &str) -> f64 {
        self.p(a, b).unwrap_or(0.0)
    }

    /// Union of per-model brute-force top-k lists with ensemble scores.
    pub fn candidates(
        &self,
        query: &str,
        k: usize,
        exclude: &BTreeSet<String>,
    ) -> Vec<(String, f64)> {
        let mut union = BTreeSet::new();
        for m in &self.models {
            for (t, _) in m.brute_top_k(query, k, exclude) {
                union.insert(t);
            }
        }
        let mut out: Vec<(String, f64)> = union
            .into_iter()
            .map(|t| {
                let p = self.p(&t, query).unwrap();
                (t, p)
            })
            .collect();
        out.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
        out
    }

    /// Suggested set for the given accepted/rejected terms: every per-term
    /// top-k candidate that is neither accepted nor rejected.
    pub fn suggestion_terms(
        &self,
        accepted: &[String],
        rejected: &[String],
        k: usize,
    ) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for a in accepted {
            for (t, _) in self.candidates(a, k, &BTreeSet::new()) {
                if !accepted.contains(&t) && !rejected.contains(&t) {
                    out.insert(t);
                }
            }
        }
        out
    }

    pub fn score(&self, term: &str, accepted: &[String], rejected: &[String], lambda: f64) -> f64 {
        let plus: f64 = accepted.iter().map(|a| self.p_hat(term, a)).sum();
        let minus: f64 = rejected.iter().map(|r| self.p_hat(term, r)).sum();
        plus - lambda * minus
    }

    /// Accepted term with the highest P, smallest term on ties.
    pub fn anchor(&self, term: &str, accepted: &[String]) -> String {
        let mut sorted = accepted.to_vec();
        sorted.sort();
        let mut best = sorted[0].clone();
        let mut best_p = self.p_hat(term, &best);
        for a in &sorted[1..] {
            let p = self.p_hat(term, a);
            if p > best_p {
                best = a.clone();
                best_p = p;
            }
        }
        best
    }

    /// Every suggestion with its score and anchor, ranked.
    pub fn ranked(
        &self,
        accepted: &[String],
        rejected: &[String],
        k: usize,
        lambda: f64,
    ) -> Vec<OracleSuggestion> {
        let mut out: Vec<OracleSuggestion> = self
            .suggestion_terms(accepted, rejected, k)
            .into_iter()
            .map(|t| OracleSuggestion {
                score: self.score(&t, accepted, rejected, lambda),
                anchor: self.anchor(&t, accepted),
                term: t,
            })
            .collect();
        out.sort_by(|a, b| {
            b.score
                .partial_cmp(&a.score)
                .unwrap()
                .then(a.term.cmp(&b.term))
        });
        out
    }

    /// Batch expansion: accept the seeds, then repeatedly accept the single
    /// best suggestion. Returns the final accepted list and ranking.
    pub fn expand(
        &self,
        seeds: &[String],
        k: usize,
        lambda: f64,
        rounds: usize,
    ) -> (Vec<String>, Vec<OracleSuggestion>) {
        let mut accepted: Vec<String> = Vec::new();
        for s in seeds {
            if !accepted.contains(s) {
                accepted.push(s.clone());
            }
        }
        for _ in 0..rounds {
            let ranked = self.ranked(&accepted, &[], k, lambda);
            match ranked.first() {
                Some(best) => accepted.push(best.term.clone()),
                None => break,
            }
        }
        let ranked = self.ranked(&accepted, &[], k, lambda);
        (accepted, ranked)
    }

    /// All accepted pairs (a < b) with defined P ≥ threshold.
    pub fn graph_edges(
        &self,
        accepted: &[String],
        threshold: f64,
    ) -> BTreeMap<(String, String), f64> {
        let mut out = BTreeMap::new();
        for a in accepted {
            for b in accepted {
                if a < b {
                    if let Some(p) = self.p(a, b) {
                        if p >= threshold {
                            out.insert((a.clone(), b.clone()), p);
                        }
                    }
                }
            }
        }
        out
    }
}
