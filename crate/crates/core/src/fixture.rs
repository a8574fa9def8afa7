//! Deterministic synthetic embedding files.
//!
//! Term `i` belongs to cluster `i % clusters`. Each vector is its cluster's
//! random unit centroid plus a bounded uniform perturbation whose norm never
//! exceeds [`PERTURBATION_NORM`], so terms of one cluster are always
//! positively correlated and usually far more similar to each other than to
//! terms of other clusters.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Upper bound on the Euclidean norm of the per-term perturbation.
pub const PERTURBATION_NORM: f64 = 0.35;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FixtureSpec {
    pub seed: u64,
    pub n: usize,
    pub dim: usize,
    pub clusters: usize,
}

impl FixtureSpec {
    pub fn new(seed: u64, n: usize, dim: usize, clusters: usize) -> Self {
        FixtureSpec {
            seed,
            n,
            dim,
            clusters,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n == 0 || self.dim == 0 || self.clusters == 0 {
            return Err(Error::InvalidFixture(
                "n, dim and clusters must be positive".into(),
            ));
        }
        if self.clusters > self.n {
            return Err(Error::InvalidFixture(format!(
                "clusters ({}) must not exceed n ({})",
                self.clusters, self.n
            )));
        }
        Ok(())
    }

    /// Name of the `i`-th term: `term_000`, `term_001`, ...
    pub fn term_name(&self, i: usize) -> String {
        let width = digits(self.n.saturating_sub(1)).max(3);
        format!("term_{i:0width$}")
    }
}

fn digits(mut x: usize) -> usize {
    let mut d = 1;
    while x >= 10 {
        x /= 10;
        d += 1;
    }
    d
}

/// Writes the fixture described by `spec` to `out`.
pub fn write_fixture<W: Write>(spec: &FixtureSpec, mut out: W) -> Result<()> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let centroids: Vec<Vec<f64>> = (0..spec.clusters)
        .map(|_| random_unit(&mut rng, spec.dim))
        .collect();
    // Per-component bound chosen so the perturbation norm is at most
    // PERTURBATION_NORM.
    let amplitude = PERTURBATION_NORM / (spec.dim as f64).sqrt();

    let io = |source| Error::Io {
        path: "<fixture>".into(),
        source,
    };
    writeln!(out, "{} {}", spec.n, spec.dim).map_err(io)?;
    for i in 0..spec.n {
        let centroid = &centroids[i % spec.clusters];
        write!(out, "{}", spec.term_name(i)).map_err(io)?;
        for c in centroid {
            let x = c + rng.random_range(-amplitude..=amplitude);
            write!(out, " {x:.6}").map_err(io)?;
        }
        writeln!(out).map_err(io)?;
    }
    Ok(())
}

/// Writes the fixture to `path`. Same inputs always produce a byte-identical
/// file.
pub fn generate_fixture(spec: &FixtureSpec, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let with_path = |e: Error| match e {
        Error::Io { source, .. } => Error::Io {
            path: path.to_owned(),
            source,
        },
        other => other,
    };
    spec.validate()?;
    let file = File::create(path).map_err(|source| Error::Io {
        path: path.to_owned(),
        source,
    })?;
    let mut out = BufWriter::new(file);
    write_fixture(spec, &mut out).map_err(with_path)?;
    out.flush().map_err(|source| Error::Io {
        path: path.to_owned(),
        source,
    })
}

fn random_unit(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..=1.0)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-3 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}
