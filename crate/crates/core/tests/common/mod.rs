#![allow(dead_code)]

use std::path::PathBuf;

use tempfile::TempDir;
use vocab_expander::{generate_fixture, EmbeddingModel, FixtureSpec, ModelRegistry};
use vocab_expander_testkit::{Oracle, RawModel};

/// Two overlapping fixture models (term_000..term_799 shared) plus the
/// matching oracle.
pub struct Fixtures {
    pub dir: TempDir,
    pub paths: Vec<(String, PathBuf)>,
    pub registry: ModelRegistry,
    pub oracle: Oracle,
}

pub fn fixture_file(dir: &TempDir, name: &str, spec: FixtureSpec) -> PathBuf {
    let path = dir.path().join(name);
    generate_fixture(&spec, &path).unwrap();
    path
}

pub fn two_models() -> Fixtures {
    build(&[
        ("alpha", FixtureSpec::new(7, 1000, 16, 20)),
        ("beta", FixtureSpec::new(11, 800, 16, 10)),
    ])
}

pub fn small_models() -> Fixtures {
    build(&[
        ("alpha", FixtureSpec::new(3, 120, 8, 6)),
        ("beta", FixtureSpec::new(5, 90, 8, 4)),
    ])
}

pub fn build(specs: &[(&str, FixtureSpec)]) -> Fixtures {
    let dir = tempfile::tempdir().unwrap();
    let mut paths = Vec::new();
    let mut registry = ModelRegistry::new();
    let mut raw = Vec::new();
    for (id, spec) in specs {
        let path = fixture_file(&dir, &format!("{id}.txt"), *spec);
        registry
            .insert(EmbeddingModel::load(&path, *id).unwrap())
            .unwrap();
        raw.push(RawModel::parse(&path, id));
        paths.push((id.to_string(), path));
    }
    Fixtures {
        dir,
        paths,
        registry,
        oracle: Oracle::new(raw),
    }
}

pub fn term(i: usize) -> String {
    format!("term_{i:03}")
}

pub fn strings(items: &[&str]) -> Vec<String> {
    items.iter().map(|s| s.to_string()).collect()
}
