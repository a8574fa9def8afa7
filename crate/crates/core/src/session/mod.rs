//! The accept/reject session state machine.
//!
//! A session partitions its word universe into accepted, rejected and
//! suggested terms. Each accepted term contributes the ensemble's top-k
//! candidates for it; every candidate that is neither accepted nor rejected
//! is a suggestion. A suggestion `s` is scored as
//!
//! ```text
//! score(s) = Σ_{a ∈ accepted} P(s, a) − λ · Σ_{r ∈ rejected} P(s, r)
//! ```
//!
//! where `P` is the ensemble similarity and undefined similarities count as
//! zero. Its anchor is the accepted term with the highest `P` (ties go to the
//! lexicographically smallest term).
//!
//! The suggestion set is a pure function of the accepted and rejected sets:
//! each accepted term's candidate list is fetched excluding only the term
//! itself, and accepted/rejected terms are filtered out afterwards. That
//! makes replay, undo and snapshot import agree with the incremental
//! operations exactly.

mod snapshot;
mod view;

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::ensemble::{Candidate, Ensemble, ModelRegistry, ModelSimilarity};
use crate::error::{Error, Result};
use crate::term::{display_form, normalize_term};

pub use snapshot::{SessionSnapshot, SNAPSHOT_FORMAT_VERSION};
pub use view::{Edge, Graph, ListGroup, SessionView};

pub const DEFAULT_K: usize = 10;
pub const DEFAULT_LAMBDA: f64 = 0.5;
pub const DEFAULT_DISPLAY_THRESHOLD: f64 = 0.3;
pub const DEFAULT_GRAPH_EDGE_THRESHOLD: f64 = 0.25;
pub const DEFAULT_PER_ANCHOR_DISPLAY: usize = 3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionParams {
    /// Neighbours fetched per model for every accepted term.
    pub k: usize,
    /// Weight of the rejection penalty.
    pub lambda: f64,
    /// Suggestions scoring strictly below this are flagged for dimming.
    pub display_threshold: f64,
    pub graph_edge_threshold: f64,
    /// Suggestions shown per accepted term in the list view.
    pub per_anchor_display: usize,
    pub model_ids: Vec<String>,
}

impl Default for SessionParams {
    fn default() -> Self {
        SessionParams {
            k: DEFAULT_K,
            lambda: DEFAULT_LAMBDA,
            display_threshold: DEFAULT_DISPLAY_THRESHOLD,
            graph_edge_threshold: DEFAULT_GRAPH_EDGE_THRESHOLD,
            per_anchor_display: DEFAULT_PER_ANCHOR_DISPLAY,
            model_ids: Vec::new(),
        }
    }
}

impl SessionParams {
    pub fn with_models<I, S>(ids: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        SessionParams {
            model_ids: ids.into_iter().map(Into::into).collect(),
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let invalid = |msg: &str| Err(Error::InvalidParams(msg.to_owned()));
        if self.k == 0 {
            return invalid("k must be at least 1");
        }
        if !(self.lambda.is_finite() && self.lambda >= 0.0) {
            return invalid("lambda must be a finite non-negative number");
        }
        if !self.display_threshold.is_finite() {
            return invalid("display_threshold must be finite");
        }
        if !self.graph_edge_threshold.is_finite() {
            return invalid("graph_edge_threshold must be finite");
        }
        if self.per_anchor_display == 0 {
            return invalid("per_anchor_display must be at least 1");
        }
        if self.model_ids.is_empty() {
            return invalid("model_ids must not be empty");
        }
        Ok(())
    }
}

/// A term key with the form it should be displayed in.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermRecord {
    pub term: String,
    pub display: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Suggestion {
    pub term: String,
    pub display: String,
    pub score: f64,
    pub anchor: String,
    pub below_threshold: bool,
    /// Defined ensemble similarities to accepted and rejected terms.
    pub contributions: BTreeMap<String, f64>,
    /// Accepted terms whose candidate list contains this term.
    pub sources: Vec<String>,
    /// Per-model similarity to the anchor.
    pub per_model: Vec<ModelSimilarity>,
}

type PairCache = HashMap<String, HashMap<String, Option<f64>>>;

#[derive(Clone)]
pub struct Session {
    id: String,
    params: SessionParams,
    ensemble: Ensemble,
    accepted: IndexMap<String, String>,
    rejected: IndexMap<String, String>,
    /// Candidate list of every accepted term.
    fetched: HashMap<String, Vec<Candidate>>,
    suggestions: BTreeMap<String, Suggestion>,
    pairs: PairCache,
}

impl Session {
    /// Creates an empty session with a fresh random id.
    pub fn new(params: SessionParams, registry: &ModelRegistry) -> Result<Self> {
        Self::with_id(uuid::Uuid::new_v4().simple().to_string(), params, registry)
    }

    pub fn with_id(id: String, params: SessionParams, registry: &ModelRegistry) -> Result<Self> {
        params.validate()?;
        let ensemble = registry.ensemble(&params.model_ids)?;
        Ok(Session {
            id,
            params,
            ensemble,
            accepted: IndexMap::new(),
            rejected: IndexMap::new(),
            fetched: HashMap::new(),
            suggestions: BTreeMap::new(),
            pairs: HashMap::new(),
        })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn params(&self) -> &SessionParams {
        &self.params
    }

    pub fn ensemble(&self) -> &Ensemble {
        &self.ensemble
    }

    pub fn accepted(&self) -> Vec<TermRecord> {
        records(&self.accepted)
    }

    pub fn rejected(&self) -> Vec<TermRecord> {
        records(&self.rejected)
    }

    pub fn is_accepted(&self, term: &str) -> bool {
        self.accepted.contains_key(term)
    }

    pub fn is_rejected(&self, term: &str) -> bool {
        self.rejected.contains_key(term)
    }

    pub fn suggestion(&self, term: &str) -> Option<&Suggestion> {
        self.suggestions.get(term)
    }

    /// Suggestions keyed by term.
    pub fn suggestions(&self) -> &BTreeMap<String, Suggestion> {
        &self.suggestions
    }

    /// Moves a term into the accepted set and fetches its candidates.
    ///
    /// Accepting a rejected term is allowed and un-rejects it. Accepting an
    /// already accepted term is a no-op.
    pub fn accept_term(&mut self, raw: &str) -> Result<()> {
        let key = normalize_term(raw)?;
        if self.accepted.contains_key(&key) {
            return Ok(());
        }
        self.insert_accepted(key, display_input(raw));
        self.recompute();
        Ok(())
    }

    /// Moves a term into the rejected set. Terms that were never suggested
    /// may be rejected too; accepted terms may not.
    pub fn reject_term(&mut self, raw: &str) -> Result<()> {
        let key = normalize_term(raw)?;
        if self.accepted.contains_key(&key) {
            return Err(Error::AcceptedConflict(key));
        }
        if self.rejected.contains_key(&key) {
            return Ok(());
        }
        self.rejected.insert(key, display_input(raw));
        self.recompute();
        Ok(())
    }

    /// Removes an accepted term together with the suggestions only it
    /// contributed. The result equals a session built without ever
    /// accepting the term.
    pub fn remove_accepted(&mut self, raw: &str) -> Result<()> {
        let key = normalize_term(raw)?;
        if self.accepted.shift_remove(&key).is_none() {
            return Err(Error::NotAccepted(key));
        }
        self.fetched.remove(&key);
        self.recompute();
        Ok(())
    }

    /// All suggestions by (score desc, term asc).
    pub fn ranked_suggestions(&self) -> Vec<&Suggestion> {
        let mut ranked: Vec<&Suggestion> = self.suggestions.values().collect();
        ranked.sort_by(|a, b| rank_order(a, b));
        ranked
    }

    fn insert_accepted(&mut self, key: String, display: String) {
        self.rejected.shift_remove(&key);
        if !self.fetched.contains_key(&key) {
            let candidates = self
                .ensemble
                .candidates(&key, self.params.k, &HashSet::new());
            self.fetched.insert(key.clone(), candidates);
        }
        self.accepted.insert(key, display);
    }

    /// Rebuilds every suggestion from the accepted/rejected sets.
    fn recompute(&mut self) {
        let Session {
            params,
            ensemble,
            accepted,
            rejected,
            fetched,
            suggestions,
            pairs,
            ..
        } = self;

        let mut sources: BTreeMap<&str, Vec<String>> = BTreeMap::new();
        for anchor in accepted.keys() {
            for c in &fetched[anchor] {
                if !accepted.contains_key(&c.term) && !rejected.contains_key(&c.term) {
                    sources.entry(&c.term).or_default().push(anchor.clone());
                }
            }
        }

        // Sums run in term order so scores do not depend on insertion order.
        let mut accepted_sorted: Vec<&String> = accepted.keys().collect();
        accepted_sorted.sort();
        let mut rejected_sorted: Vec<&String> = rejected.keys().collect();
        rejected_sorted.sort();

        let mut rebuilt = BTreeMap::new();
        for (term, sources) in sources {
            let mut contributions = BTreeMap::new();
            let mut positive = 0.0;
            let mut anchor: Option<(&str, f64)> = None;
            for a in &accepted_sorted {
                let p = pair_similarity(pairs, ensemble, term, a);
                if let Some(p) = p {
                    contributions.insert((*a).clone(), p);
                }
                let p = p.unwrap_or(0.0);
                positive += p;
                if anchor.is_none_or(|(_, best)| p > best) {
                    anchor = Some((a, p));
                }
            }
            let mut negative = 0.0;
            for r in &rejected_sorted {
                let p = pair_similarity(pairs, ensemble, term, r);
                if let Some(p) = p {
                    contributions.insert((*r).clone(), p);
                }
                negative += p.unwrap_or(0.0);
            }
            let score = positive - params.lambda * negative;
            // Every suggestion has a source, so accepted is non-empty here.
            let anchor = anchor.map(|(a, _)| a.to_owned()).unwrap_or_default();
            let suggestion = Suggestion {
                term: term.to_owned(),
                display: display_form(term),
                score,
                per_model: ensemble.per_model_similarity(term, &anchor),
                anchor,
                below_threshold: score < params.display_threshold,
                contributions,
                sources,
            };
            rebuilt.insert(term.to_owned(), suggestion);
        }
        *suggestions = rebuilt;
    }
}

fn pair_similarity(
    cache: &mut PairCache,
    ensemble: &Ensemble,
    term: &str,
    other: &str,
) -> Option<f64> {
    let row = cache.entry(term.to_owned()).or_default();
    if let Some(p) = row.get(other) {
        return *p;
    }
    let p = ensemble.similarity(term, other);
    row.insert(other.to_owned(), p);
    p
}

pub(crate) fn rank_order(a: &Suggestion, b: &Suggestion) -> std::cmp::Ordering {
    b.score
        .total_cmp(&a.score)
        .then_with(|| a.term.cmp(&b.term))
}

fn records(map: &IndexMap<String, String>) -> Vec<TermRecord> {
    map.iter()
        .map(|(term, display)| TermRecord {
            term: term.clone(),
            display: display.clone(),
        })
        .collect()
}

/// Trimmed user input with whitespace runs collapsed to single spaces.
fn display_input(raw: &str) -> String {
    raw.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Equality of observable state; ignores the id and internal caches.
impl PartialEq for Session {
    fn eq(&self, other: &Self) -> bool {
        self.params == other.params
            && self.ensemble.model_ids() == other.ensemble.model_ids()
            && self.accepted() == other.accepted()
            && self.rejected() == other.rejected()
            && self.suggestions == other.suggestions
    }
}

impl fmt::Debug for Session {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Session")
            .field("id", &self.id)
            .field("params", &self.params)
            .field("accepted", &self.accepted)
            .field("rejected", &self.rejected)
            .field("suggestions", &self.suggestions.len())
            .finish()
    }
}
