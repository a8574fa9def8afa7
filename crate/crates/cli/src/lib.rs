//! Library side of the `vocab-expander` binary: model specs, parallel
//! loading and non-interactive batch expansion.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use vocab_expander::{EmbeddingModel, ModelRegistry, Session, SessionParams};

/// A `--model id=path` argument.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelSpec {
    pub id: String,
    pub path: PathBuf,
}

impl FromStr for ModelSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (id, path) = s
            .split_once('=')
            .ok_or_else(|| format!("expected id=path, got {s:?}"))?;
        let (id, path) = (id.trim(), path.trim());
        if id.is_empty() || path.is_empty() {
            return Err(format!("expected id=path, got {s:?}"));
        }
        Ok(ModelSpec {
            id: id.to_owned(),
            path: PathBuf::from(path),
        })
    }
}

/// Loads every model on its own thread and registers them in spec order.
pub fn load_models(specs: &[ModelSpec]) -> Result<ModelRegistry> {
    if specs.is_empty() {
        bail!("at least one --model id=path is required");
    }
    let loaded: Vec<vocab_expander::Result<EmbeddingModel>> = std::thread::scope(|scope| {
        let handles: Vec<_> = specs
            .iter()
            .map(|spec| scope.spawn(move || EmbeddingModel::load(&spec.path, spec.id.clone())))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("model loader panicked"))
            .collect()
    });
    let mut registry = ModelRegistry::new();
    for (spec, model) in specs.iter().zip(loaded) {
        let model = model.with_context(|| format!("loading model {:?}", spec.id))?;
        for warning in model.warnings() {
            log::warn!("{}: {warning}", spec.path.display());
        }
        log::info!(
            "loaded {:?}: {} terms, dimension {}",
            model.id(),
            model.len(),
            model.dimension()
        );
        registry.insert(model)?;
    }
    Ok(registry)
}

/// Accepts every seed, then `rounds` times accepts the single best
/// suggestion, and renders the `top_n` remaining suggestions as
/// `term<TAB>score` lines.
pub fn expand(
    registry: &ModelRegistry,
    seeds: &str,
    params: SessionParams,
    rounds: usize,
    top_n: usize,
) -> Result<String> {
    if seeds.lines().all(|l| l.trim().is_empty()) {
        bail!("seeds file contains no terms");
    }
    let mut session = Session::new(params, registry)?;
    session.accept_term_list(seeds)?;
    for round in 0..rounds {
        let Some(best) = session.ranked_suggestions().first().map(|s| s.term.clone()) else {
            log::info!("no suggestions left after {round} round(s)");
            break;
        };
        session.accept_term(&best)?;
    }
    Ok(render_ranking(&session, top_n))
}

/// `term<TAB>score` for the first `top_n` ranked suggestions.
pub fn render_ranking(session: &Session, top_n: usize) -> String {
    let mut out = String::new();
    for s in session.ranked_suggestions().into_iter().take(top_n) {
        writeln!(out, "{}\t{:.6}", s.term, s.score).expect("writing to a String");
    }
    out
}

pub fn read_seeds(path: &std::path::Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| anyhow!("cannot read seeds {}: {e}", path.display()))
}
