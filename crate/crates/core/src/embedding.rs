//! Single embedding models loaded from word2vec text files.
//!
//! The file starts with a `<count> <dimension>` header, followed by one
//! line per term: the term and `dimension` whitespace-separated decimal
//! components. Vectors are unit-normalized at load time, so cosine
//! similarity is a plain dot product.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::term::normalize_term;

/// A nearest neighbour returned by [`EmbeddingModel::top_k`].
#[derive(Debug, Clone, PartialEq)]
pub struct Neighbor {
    pub term: String,
    pub score: f64,
}

/// A non-fatal problem found while loading a model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LoadWarning {
    ZeroVector { line: usize, term: String },
    DuplicateTerm { line: usize, term: String },
    CountMismatch { declared: usize, loaded: usize },
}

impl fmt::Display for LoadWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LoadWarning::ZeroVector { line, term } => {
                write!(f, "line {line}: zero vector for {term:?}, row skipped")
            }
            LoadWarning::DuplicateTerm { line, term } => {
                write!(f, "line {line}: duplicate term {term:?}, row skipped")
            }
            LoadWarning::CountMismatch { declared, loaded } => {
                write!(f, "header declares {declared} entries, loaded {loaded}")
            }
        }
    }
}

/// An immutable term → unit vector map.
///
/// Vectors live in one row-major buffer; `index` maps normalized terms to
/// row numbers.
#[derive(Debug, Clone)]
pub struct EmbeddingModel {
    id: String,
    dimension: usize,
    terms: Vec<String>,
    vectors: Vec<f64>,
    index: HashMap<String, usize>,
    warnings: Vec<LoadWarning>,
}

struct Builder {
    dimension: usize,
    terms: Vec<String>,
    vectors: Vec<f64>,
    index: HashMap<String, usize>,
    warnings: Vec<LoadWarning>,
}

impl Builder {
    fn new(dimension: usize, capacity: usize) -> Self {
        Builder {
            dimension,
            terms: Vec::with_capacity(capacity),
            vectors: Vec::with_capacity(capacity.saturating_mul(dimension)),
            index: HashMap::with_capacity(capacity),
            warnings: Vec::new(),
        }
    }

    /// `raw` must already have `dimension` finite components.
    fn push(&mut self, line: usize, term: &str, raw: &[f64]) -> Result<()> {
        let term = normalize_term(term)?;
        if self.index.contains_key(&term) {
            self.warn(LoadWarning::DuplicateTerm { line, term });
            return Ok(());
        }
        let norm = raw.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            self.warn(LoadWarning::ZeroVector { line, term });
            return Ok(());
        }
        self.index.insert(term.clone(), self.terms.len());
        self.terms.push(term);
        self.vectors.extend(raw.iter().map(|x| x / norm));
        Ok(())
    }

    fn warn(&mut self, warning: LoadWarning) {
        log::warn!("{warning}");
        self.warnings.push(warning);
    }

    fn finish(self, id: String) -> EmbeddingModel {
        EmbeddingModel {
            id,
            dimension: self.dimension,
            terms: self.terms,
            vectors: self.vectors,
            index: self.index,
            warnings: self.warnings,
        }
    }
}

impl EmbeddingModel {
    /// Loads a word2vec text file.
    ///
    /// Malformed headers, rows with the wrong number of components and
    /// unparsable numbers abort the load. Zero vectors and duplicate terms
    /// are skipped and reported through [`EmbeddingModel::warnings`].
    pub fn load(path: impl AsRef<Path>, id: impl Into<String>) -> Result<Self> {
        let path = path.as_ref();
        let io_err = |source| Error::Io {
            path: path.to_owned(),
            source,
        };
        let file = File::open(path).map_err(io_err)?;
        Self::read(BufReader::new(file), path, id).map_err(|e| match e {
            Error::Io { source, .. } => io_err(source),
            other => other,
        })
    }

    /// Reads word2vec text from any buffered reader. `origin` only labels
    /// error messages.
    pub fn read<R: BufRead>(mut reader: R, origin: &Path, id: impl Into<String>) -> Result<Self> {
        let origin = origin.to_owned();
        let mut buf = Vec::new();
        let mut line_no = 1;
        let read_line = |reader: &mut R, buf: &mut Vec<u8>| -> Result<bool> {
            buf.clear();
            let n = reader.read_until(b'\n', buf).map_err(|source| Error::Io {
                path: origin.clone(),
                source,
            })?;
            Ok(n > 0)
        };

        if !read_line(&mut reader, &mut buf)? {
            return Err(header_error(&origin, "file is empty"));
        }
        let (declared, dimension) = parse_header(&String::from_utf8_lossy(&buf), &origin)?;

        let mut builder = Builder::new(dimension, declared);
        let mut components = Vec::with_capacity(dimension);
        let mut rows = 0;
        while read_line(&mut reader, &mut buf)? {
            line_no += 1;
            let line = String::from_utf8_lossy(&buf);
            let mut fields = line.split_whitespace();
            let Some(term) = fields.next() else {
                continue;
            };
            components.clear();
            for field in fields {
                let value: f64 = field.parse().map_err(|_| Error::MalformedRow {
                    path: origin.clone(),
                    line: line_no,
                    reason: format!("cannot parse component {field:?}"),
                })?;
                if !value.is_finite() {
                    return Err(Error::MalformedRow {
                        path: origin.clone(),
                        line: line_no,
                        reason: format!("non-finite component {field:?}"),
                    });
                }
                components.push(value);
            }
            if components.len() != dimension {
                return Err(Error::DimensionMismatch {
                    path: origin.clone(),
                    line: line_no,
                    expected: dimension,
                    found: components.len(),
                });
            }
            builder.push(line_no, term, &components)?;
            rows += 1;
        }

        if rows != declared {
            let loaded = builder.terms.len();
            builder.warn(LoadWarning::CountMismatch { declared, loaded });
        }
        Ok(builder.finish(id.into()))
    }

    /// Builds a model from in-memory rows with the same normalization,
    /// duplicate and zero-vector rules as [`EmbeddingModel::load`].
    pub fn from_rows<I, S>(id: impl Into<String>, dimension: usize, rows: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, Vec<f64>)>,
        S: AsRef<str>,
    {
        let id = id.into();
        let origin = PathBuf::from(format!("<{id}>"));
        if dimension == 0 {
            return Err(header_error(&origin, "dimension must be positive"));
        }
        let mut builder = Builder::new(dimension, 0);
        for (i, (term, vector)) in rows.into_iter().enumerate() {
            let line = i + 1;
            if vector.len() != dimension {
                return Err(Error::DimensionMismatch {
                    path: origin,
                    line,
                    expected: dimension,
                    found: vector.len(),
                });
            }
            if vector.iter().any(|x| !x.is_finite()) {
                return Err(Error::MalformedRow {
                    path: origin,
                    line,
                    reason: "non-finite component".into(),
                });
            }
            builder.push(line, term.as_ref(), &vector)?;
        }
        Ok(builder.finish(id))
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn contains(&self, term: &str) -> bool {
        self.index.contains_key(term)
    }

    /// Terms in file order.
    pub fn terms(&self) -> impl Iterator<Item = &str> {
        self.terms.iter().map(String::as_str)
    }

    pub fn warnings(&self) -> &[LoadWarning] {
        &self.warnings
    }

    /// The unit vector stored for `term`.
    pub fn vector(&self, term: &str) -> Option<&[f64]> {
        self.index.get(term).map(|&row| self.row(row))
    }

    fn row(&self, row: usize) -> &[f64] {
        let start = row * self.dimension;
        &self.vectors[start..start + self.dimension]
    }

    /// Cosine similarity of two in-vocabulary terms, `None` if either is
    /// missing.
    pub fn similarity(&self, a: &str, b: &str) -> Option<f64> {
        Some(cosine(self.vector(a)?, self.vector(b)?))
    }

    /// Exact `k` nearest neighbours of `query`, excluding the query itself
    /// and every term in `exclude`. Ordered by score descending, then term
    /// ascending. Out-of-vocabulary queries yield no neighbours.
    pub fn top_k(&self, query: &str, k: usize, exclude: &HashSet<String>) -> Vec<Neighbor> {
        let Some(&query_row) = self.index.get(query) else {
            return Vec::new();
        };
        if k == 0 {
            return Vec::new();
        }
        let q = self.row(query_row);
        let mut scored: Vec<(f64, usize)> = (0..self.terms.len())
            .filter(|&row| row != query_row && !exclude.contains(&self.terms[row]))
            .map(|row| (cosine(q, self.row(row)), row))
            .collect();

        let order = |a: &(f64, usize), b: &(f64, usize)| {
            b.0.total_cmp(&a.0)
                .then_with(|| self.terms[a.1].cmp(&self.terms[b.1]))
        };
        if scored.len() > k {
            scored.select_nth_unstable_by(k - 1, order);
            scored.truncate(k);
        }
        scored.sort_unstable_by(order);
        scored
            .into_iter()
            .map(|(score, row)| Neighbor {
                term: self.terms[row].clone(),
                score,
            })
            .collect()
    }

    /// Writes the (normalized) model back out in word2vec text format.
    pub fn write_text<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "{} {}", self.len(), self.dimension)?;
        for (row, term) in self.terms.iter().enumerate() {
            write!(out, "{term}")?;
            for x in self.row(row) {
                write!(out, " {x}")?;
            }
            writeln!(out)?;
        }
        Ok(())
    }
}

/// Dot product of two unit vectors, clamped to [-1, 1] against rounding.
fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    dot.clamp(-1.0, 1.0)
}

fn header_error(path: &Path, reason: &str) -> Error {
    Error::MalformedHeader {
        path: path.to_owned(),
        line: 1,
        reason: reason.to_owned(),
    }
}

fn parse_header(line: &str, path: &Path) -> Result<(usize, usize)> {
    let fields: Vec<&str> = line.split_whitespace().collect();
    let [count, dim] = fields.as_slice() else {
        return Err(header_error(
            path,
            &format!("found {} fields", fields.len()),
        ));
    };
    let count: usize = count
        .parse()
        .map_err(|_| header_error(path, &format!("bad entry count {count:?}")))?;
    let dim: usize = dim
        .parse()
        .map_err(|_| header_error(path, &format!("bad dimension {dim:?}")))?;
    if dim == 0 {
        return Err(header_error(path, "dimension must be positive"));
    }
    Ok((count, dim))
}
