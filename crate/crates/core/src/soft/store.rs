use std::collections::HashMap;
use std::fs;
use std::io;
use std::path::Path;

use super::embed::EmbeddingBackend;
use super::SoftError;

const VECTOR_MAGIC: &[u8; 4] = b"LGSV";
const HEADER_PREFIX: &str = "% logicgen sentence store";
pub const SENTENCES_FILE: &str = "sentences.txt";
pub const VECTORS_FILE: &str = "vectors.bin";

/// Distances this close to zero are reported as exactly zero.
const ZERO_SNAP: f64 = 1e-12;

/// Sentences with their embeddings, row-aligned. Sentence texts are unique.
#[derive(Debug, Clone, PartialEq)]
pub struct SentenceStore {
    backend: String,
    dim: usize,
    sentences: Vec<String>,
    index: HashMap<String, usize>,
    vectors: Vec<f32>,
}

impl SentenceStore {
    pub fn new(backend: impl Into<String>, dim: usize) -> Self {
        SentenceStore {
            backend: backend.into(),
            dim,
            sentences: Vec::new(),
            index: HashMap::new(),
            vectors: Vec::new(),
        }
    }

    pub fn for_backend<B: EmbeddingBackend + ?Sized>(backend: &B) -> Self {
        SentenceStore::new(backend.name(), backend.dimension())
    }

    pub fn backend(&self) -> &str {
        &self.backend
    }

    pub fn dimension(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.sentences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }

    pub fn sentences(&self) -> &[String] {
        &self.sentences
    }

    pub fn contains(&self, sentence: &str) -> bool {
        self.index.contains_key(sentence)
    }

    pub fn vector(&self, row: usize) -> &[f32] {
        &self.vectors[row * self.dim..(row + 1) * self.dim]
    }

    fn check_backend<B: EmbeddingBackend + ?Sized>(&self, backend: &B) -> Result<(), SoftError> {
        if backend.name() != self.backend || backend.dimension() != self.dim {
            return Err(SoftError::Incompatible {
                store: format!("{}/{}", self.backend, self.dim),
                backend: format!("{}/{}", backend.name(), backend.dimension()),
            });
        }
        Ok(())
    }

    /// Embeds and appends the texts not already stored; returns how many
    /// were added. Texts are trimmed and empty ones skipped.
    pub fn add_sentences<B: EmbeddingBackend + ?Sized>(&mut self, backend: &B, texts: &[String]) -> Result<usize, SoftError> {
        self.check_backend(backend)?;
        let mut fresh: Vec<String> = Vec::new();
        for t in texts {
            let t = t.trim();
            if !t.is_empty() && !self.index.contains_key(t) && !fresh.iter().any(|f| f == t) {
                fresh.push(t.to_string());
            }
        }
        if fresh.is_empty() {
            return Ok(0);
        }
        let rows = backend.embed_batch(&fresh)?;
        if rows.len() != fresh.len() {
            return Err(SoftError::Backend(format!("{} vectors for {} sentences", rows.len(), fresh.len())));
        }
        for row in &rows {
            if row.len() != self.dim {
                return Err(SoftError::DimensionMismatch {
                    expected: self.dim,
                    found: row.len(),
                });
            }
        }
        let added = fresh.len();
        for (text, row) in fresh.into_iter().zip(rows) {
            self.index.insert(text.clone(), self.sentences.len());
            self.sentences.push(text);
            self.vectors.extend_from_slice(&row);
        }
        Ok(added)
    }

    /// The `k` nearest sentences to an already embedded query, ascending by
    /// cosine distance; equal distances keep insertion order.
    pub fn knn_vector(&self, query: &[f32], k: usize) -> Result<Vec<(String, f64)>, SoftError> {
        if self.is_empty() {
            return Err(SoftError::EmptyStore);
        }
        if k == 0 {
            return Err(SoftError::ZeroK);
        }
        if query.len() != self.dim {
            return Err(SoftError::DimensionMismatch {
                expected: self.dim,
                found: query.len(),
            });
        }
        let mut scored: Vec<(usize, f64)> = (0..self.len()).map(|r| (r, cosine_distance(query, self.vector(r)))).collect();
        scored.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
        scored.truncate(k);
        Ok(scored.into_iter().map(|(r, d)| (self.sentences[r].clone(), d)).collect())
    }

    pub fn knn<B: EmbeddingBackend + ?Sized>(&self, backend: &B, query: &str, k: usize) -> Result<Vec<(String, f64)>, SoftError> {
        self.check_backend(backend)?;
        if self.is_empty() {
            return Err(SoftError::EmptyStore);
        }
        let q = backend.embed(query)?;
        self.knn_vector(&q, k)
    }

    /// Writes `sentences.txt` and `vectors.bin` into `dir`, creating it.
    pub fn save(&self, dir: &Path) -> Result<(), SoftError> {
        fs::create_dir_all(dir)?;
        let mut text = format!("{HEADER_PREFIX} backend={} dim={}\n", self.backend, self.dim);
        for s in &self.sentences {
            text.push_str(&escape_line(s));
            text.push('\n');
        }
        fs::write(dir.join(SENTENCES_FILE), text)?;

        let mut bin = Vec::with_capacity(16 + self.vectors.len() * 4);
        bin.extend_from_slice(VECTOR_MAGIC);
        bin.extend_from_slice(&(self.dim as u32).to_le_bytes());
        bin.extend_from_slice(&(self.len() as u64).to_le_bytes());
        for x in &self.vectors {
            bin.extend_from_slice(&x.to_le_bytes());
        }
        fs::write(dir.join(VECTORS_FILE), bin)?;
        Ok(())
    }

    pub fn load(dir: &Path) -> Result<Self, SoftError> {
        let text = fs::read_to_string(dir.join(SENTENCES_FILE))?;
        let mut lines = text.lines();
        let header = lines.next().unwrap_or_default();
        let (backend, dim) = parse_header(header).ok_or_else(|| SoftError::Format(format!("bad store header {header:?}")))?;
        let sentences: Vec<String> = lines.map(unescape_line).collect();

        let bin = fs::read(dir.join(VECTORS_FILE))?;
        if bin.len() < 16 || &bin[..4] != VECTOR_MAGIC {
            return Err(SoftError::Format("vectors file lacks the store header".into()));
        }
        let bin_dim = u32::from_le_bytes(bin[4..8].try_into().unwrap()) as usize;
        let rows = u64::from_le_bytes(bin[8..16].try_into().unwrap()) as usize;
        if bin_dim != dim || rows != sentences.len() || bin.len() != 16 + rows * dim * 4 {
            return Err(SoftError::Format(format!(
                "{} sentences of dimension {dim} but vectors file holds {rows} rows of dimension {bin_dim} in {} bytes",
                sentences.len(),
                bin.len()
            )));
        }
        let vectors = bin[16..]
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes(c.try_into().unwrap()))
            .collect();
        let mut index = HashMap::with_capacity(sentences.len());
        for (i, s) in sentences.iter().enumerate() {
            if index.insert(s.clone(), i).is_some() {
                return Err(SoftError::Format(format!("duplicate sentence {s:?}")));
            }
        }
        Ok(SentenceStore {
            backend,
            dim,
            sentences,
            index,
            vectors,
        })
    }

    /// Loads the store in `dir`, or starts an empty one for `backend` when
    /// the directory holds no store yet.
    pub fn open_or_create<B: EmbeddingBackend + ?Sized>(dir: &Path, backend: &B) -> Result<Self, SoftError> {
        match SentenceStore::load(dir) {
            Ok(store) => Ok(store),
            Err(SoftError::Io(e)) if e.kind() == io::ErrorKind::NotFound => Ok(SentenceStore::for_backend(backend)),
            Err(e) => Err(e),
        }
    }
}

/// `1 - cos(a, b)` accumulated in `f64` in index order, clamped to `[0, 2]`.
/// A zero vector is at distance 1 from everything.
pub fn cosine_distance(a: &[f32], b: &[f32]) -> f64 {
    let (mut dot, mut na, mut nb) = (0f64, 0f64, 0f64);
    for (&x, &y) in a.iter().zip(b) {
        let (x, y) = (x as f64, y as f64);
        dot += x * y;
        na += x * x;
        nb += y * y;
    }
    if na == 0.0 || nb == 0.0 {
        return 1.0;
    }
    let d = 1.0 - dot / (na.sqrt() * nb.sqrt());
    if d.abs() < ZERO_SNAP {
        0.0
    } else {
        d.clamp(0.0, 2.0)
    }
}

fn parse_header(line: &str) -> Option<(String, usize)> {
    let rest = line.strip_prefix(HEADER_PREFIX)?.trim();
    let (backend, dim) = rest.rsplit_once(" dim=")?;
    let backend = backend.strip_prefix("backend=")?;
    Some((backend.to_string(), dim.trim().parse().ok().filter(|&d| d > 0)?))
}

fn escape_line(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            c => out.push(c),
        }
    }
    out
}

fn unescape_line(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    let mut chars = s.chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        match chars.next() {
            Some('n') => out.push('\n'),
            Some('r') => out.push('\r'),
            Some(other) => out.push(other),
            None => out.push('\\'),
        }
    }
    out
}
