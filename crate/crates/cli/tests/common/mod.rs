#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;
use vocab_expander::{EmbeddingModel, ModelRegistry};
use vocab_expander_testkit::{Oracle, RawModel};

pub const BIN: &str = env!("CARGO_BIN_EXE_vocab-expander");

/// (id, seed, n, dim, clusters) for the two overlapping fixture models.
pub const MODELS: [(&str, u64, usize, usize, usize); 2] =
    [("alpha", 7, 1000, 16, 20), ("beta", 11, 800, 16, 10)];

pub fn golden(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(name)
}

pub fn run(args: &[&str]) -> Output {
    Command::new(BIN)
        .args(args)
        .env("RUST_LOG", "warn")
        .env_remove("VOCAB_EXPANDER_MODELS")
        .output()
        .expect("binary runs")
}

pub fn fixture(
    dir: &Path,
    name: &str,
    seed: u64,
    n: usize,
    dim: usize,
    clusters: usize,
) -> PathBuf {
    let out = dir.join(name);
    let o = run(&[
        "fixture",
        "--seed",
        &seed.to_string(),
        "--n",
        &n.to_string(),
        "--dim",
        &dim.to_string(),
        "--clusters",
        &clusters.to_string(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    out
}

/// Fixture files written by the binary, loaded both by the engine and by
/// the brute-force oracle.
pub struct Fixtures {
    pub dir: TempDir,
    pub paths: Vec<(String, PathBuf)>,
    pub registry: ModelRegistry,
    pub oracle: Oracle,
}

impl Fixtures {
    pub fn new() -> Fixtures {
        let dir = tempfile::tempdir().unwrap();
        let mut paths = Vec::new();
        let mut registry = ModelRegistry::new();
        let mut raw = Vec::new();
        for (id, seed, n, dim, clusters) in MODELS {
            let path = fixture(dir.path(), &format!("{id}.txt"), seed, n, dim, clusters);
            registry
                .insert(EmbeddingModel::load(&path, id).unwrap())
                .unwrap();
            raw.push(RawModel::parse(&path, id));
            paths.push((id.to_owned(), path));
        }
        Fixtures {
            dir,
            paths,
            registry,
            oracle: Oracle::new(raw),
        }
    }

    /// `--model id=path` arguments for every fixture.
    pub fn model_args(&self) -> Vec<String> {
        self.paths
            .iter()
            .flat_map(|(id, p)| ["--model".to_owned(), format!("{id}={}", p.display())])
            .collect()
    }

    pub fn expand(&self, seeds: &Path, extra: &[&str]) -> Output {
        let mut args: Vec<String> = vec![
            "expand".into(),
            "--seeds".into(),
            seeds.display().to_string(),
        ];
        args.extend(self.model_args());
        args.extend(extra.iter().map(|s| s.to_string()));
        run(&args.iter().map(String::as_str).collect::<Vec<_>>())
    }
}
