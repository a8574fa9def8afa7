//! Vocabulary expansion over an ensemble of word-embedding models.
//!
//! Users seed a vocabulary with a few accepted terms. For every accepted
//! term the engine fetches the `k` nearest neighbours from each model in
//! the ensemble, scores the resulting suggestions against all accepted and
//! rejected terms, and groups them under the accepted term they are most
//! similar to.
//!
//! The crate is organised bottom-up:
//!
//! * [`term`]: key normalization shared by models and sessions.
//! * [`embedding`]: a single model loaded from a word2vec text file.
//! * [`fixture`]: deterministic synthetic models for tests and demos.
//! * [`ensemble`]: averaged similarity and candidate pooling across models.
//! * [`session`]: the accept/reject state machine, views and snapshots.

pub mod embedding;
pub mod ensemble;
pub mod error;
pub mod fixture;
pub mod session;
pub mod term;

pub use embedding::{EmbeddingModel, LoadWarning, Neighbor};
pub use ensemble::{Candidate, Ensemble, ModelInfo, ModelRegistry, ModelSimilarity};
pub use error::{Error, Result};
pub use fixture::{generate_fixture, write_fixture, FixtureSpec};
pub use session::{
    Edge, Graph, ListGroup, Session, SessionParams, SessionSnapshot, SessionView, Suggestion,
    TermRecord, SNAPSHOT_FORMAT_VERSION,
};
pub use term::normalize_term;
