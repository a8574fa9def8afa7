//! Read-only projections of a session: the per-anchor list view, the graph
//! of accepted terms, and the full view served to clients.

use serde::{Deserialize, Serialize};

use super::{rank_order, Session, SessionParams, Suggestion, TermRecord};

/// Suggestions anchored at one accepted term.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ListGroup {
    pub anchor: String,
    pub display: String,
    /// Number of suggestions anchored here before truncation.
    pub total: usize,
    pub suggestions: Vec<Suggestion>,
}

/// Undirected edge with `a < b`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub a: String,
    pub b: String,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Graph {
    pub nodes: Vec<TermRecord>,
    pub edges: Vec<Edge>,
}

/// Everything a client needs to render a session.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionView {
    pub session_id: String,
    pub params: SessionParams,
    pub accepted: Vec<TermRecord>,
    pub rejected: Vec<TermRecord>,
    pub list_view: Vec<ListGroup>,
    /// All suggestions, ranked.
    pub suggestions: Vec<Suggestion>,
    pub graph: Graph,
}

impl Session {
    /// One group per accepted term, in acceptance order, holding its top
    /// `per_anchor_display` suggestions.
    pub fn list_view(&self) -> Vec<ListGroup> {
        let mut groups: Vec<ListGroup> = self
            .accepted()
            .into_iter()
            .map(|r| ListGroup {
                anchor: r.term,
                display: r.display,
                total: 0,
                suggestions: Vec::new(),
            })
            .collect();
        for s in self.ranked_suggestions() {
            if let Some(g) = groups.iter_mut().find(|g| g.anchor == s.anchor) {
                g.total += 1;
                if g.suggestions.len() < self.params.per_anchor_display {
                    g.suggestions.push(s.clone());
                }
            }
        }
        debug_assert!(groups
            .iter()
            .all(|g| g.suggestions.is_sorted_by(|a, b| rank_order(a, b).is_le())));
        groups
    }

    /// Accepted terms as nodes, with an edge for every pair whose ensemble
    /// similarity is defined and at least `graph_edge_threshold`.
    pub fn graph_view(&self) -> Graph {
        let nodes = self.accepted();
        let mut keys: Vec<&str> = nodes.iter().map(|n| n.term.as_str()).collect();
        keys.sort_unstable();
        let mut edges = Vec::new();
        for (i, a) in keys.iter().enumerate() {
            for b in &keys[i + 1..] {
                if let Some(w) = self.ensemble.similarity(a, b) {
                    if w >= self.params.graph_edge_threshold {
                        edges.push(Edge {
                            a: (*a).to_owned(),
                            b: (*b).to_owned(),
                            weight: w,
                        });
                    }
                }
            }
        }
        Graph { nodes, edges }
    }

    pub fn view(&self) -> SessionView {
        SessionView {
            session_id: self.id.clone(),
            params: self.params.clone(),
            accepted: self.accepted(),
            rejected: self.rejected(),
            list_view: self.list_view(),
            suggestions: self.ranked_suggestions().into_iter().cloned().collect(),
            graph: self.graph_view(),
        }
    }
}
