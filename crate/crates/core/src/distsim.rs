//! Distributional similarity: windowed collocation counts, PMI vectors,
//! additive phrase composition and cosine.

use std::collections::{BTreeMap, HashMap};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use rayon::prelude::*;

use crate::error::{Error, Result};

pub const DEFAULT_WINDOW: usize = 3;
pub const DEFAULT_TOP_K: usize = 1000;

/// Splits whitespace-tokenized text into lowercased sentences. Blank lines
/// separate sentences; consecutive non-blank lines belong to one sentence.
pub fn read_sentences(reader: impl Read) -> std::io::Result<Vec<Vec<String>>> {
    let mut sentences = Vec::new();
    let mut current = Vec::new();
    for line in BufReader::new(reader).lines() {
        let line = line?;
        if line.trim().is_empty() {
            if !current.is_empty() {
                sentences.push(std::mem::take(&mut current));
            }
            continue;
        }
        current.extend(line.split_whitespace().map(str::to_lowercase));
    }
    if !current.is_empty() {
        sentences.push(current);
    }
    Ok(sentences)
}

pub fn read_sentences_file(path: &Path) -> Result<Vec<Vec<String>>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_sentences(file).map_err(|e| Error::io(path, e))
}

/// Co-occurrence counts of (target, context) pairs.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CollocationCounts {
    pairs: HashMap<String, HashMap<String, u64>>,
    target_totals: HashMap<String, u64>,
    context_totals: HashMap<String, u64>,
    grand_total: u64,
    token_count: u64,
}

impl CollocationCounts {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, target: &str, context: &str, count: u64) {
        if count == 0 {
            return;
        }
        *self
            .pairs
            .entry(target.to_string())
            .or_default()
            .entry(context.to_string())
            .or_insert(0) += count;
        *self.target_totals.entry(target.to_string()).or_insert(0) += count;
        *self.context_totals.entry(context.to_string()).or_insert(0) += count;
        self.grand_total += count;
    }

    /// Counts every token against each neighbor up to `window` positions
    /// away on either side, within one sentence.
    pub fn count_sentence<S: AsRef<str>>(&mut self, sentence: &[S], window: usize) {
        self.token_count += sentence.len() as u64;
        for (i, target) in sentence.iter().enumerate() {
            let lo = i.saturating_sub(window);
            let hi = (i + window).min(sentence.len() - 1);
            for (j, context) in sentence.iter().enumerate().take(hi + 1).skip(lo) {
                if j != i {
                    self.add(target.as_ref(), context.as_ref(), 1);
                }
            }
        }
    }

    pub fn from_sentences<S: AsRef<str>>(sentences: &[Vec<S>], window: usize) -> Self {
        let mut counts = Self::new();
        for s in sentences {
            counts.count_sentence(s, window);
        }
        counts
    }

    /// Counts sentence shards in parallel and merges the results.
    pub fn from_sentences_parallel<S: AsRef<str> + Sync>(
        sentences: &[Vec<S>],
        window: usize,
        shard_size: usize,
    ) -> Self {
        sentences
            .par_chunks(shard_size.max(1))
            .map(|shard| Self::from_sentences(shard, window))
            .reduce(Self::new, |mut a, b| {
                a.merge(b);
                a
            })
    }

    pub fn merge(&mut self, other: CollocationCounts) {
        for (target, row) in other.pairs {
            let mine = self.pairs.entry(target).or_default();
            for (context, n) in row {
                *mine.entry(context).or_insert(0) += n;
            }
        }
        for (w, n) in other.target_totals {
            *self.target_totals.entry(w).or_insert(0) += n;
        }
        for (w, n) in other.context_totals {
            *self.context_totals.entry(w).or_insert(0) += n;
        }
        self.grand_total += other.grand_total;
        self.token_count += other.token_count;
    }

    pub fn pair(&self, target: &str, context: &str) -> u64 {
        self.pairs
            .get(target)
            .and_then(|row| row.get(context))
            .copied()
            .unwrap_or(0)
    }

    pub fn target_total(&self, word: &str) -> u64 {
        self.target_totals.get(word).copied().unwrap_or(0)
    }

    pub fn context_total(&self, word: &str) -> u64 {
        self.context_totals.get(word).copied().unwrap_or(0)
    }

    pub fn grand_total(&self) -> u64 {
        self.grand_total
    }

    /// Tokens seen while counting raw text; zero for counts read from a file.
    pub fn token_count(&self) -> u64 {
        self.token_count
    }

    pub fn contexts(&self, target: &str) -> impl Iterator<Item = (&str, u64)> {
        self.pairs
            .get(target)
            .into_iter()
            .flatten()
            .map(|(c, &n)| (c.as_str(), n))
    }

    /// All pairs sorted by (target, context).
    pub fn sorted_pairs(&self) -> Vec<(&str, &str, u64)> {
        let mut out: Vec<_> = self
            .pairs
            .iter()
            .flat_map(|(t, row)| row.iter().map(move |(c, &n)| (t.as_str(), c.as_str(), n)))
            .collect();
        out.sort_unstable();
        out
    }

    pub fn from_corpus(reader: impl Read, window: usize) -> std::io::Result<Self> {
        Ok(Self::from_sentences(&read_sentences(reader)?, window))
    }

    pub fn from_corpus_file(path: &Path, window: usize) -> Result<Self> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        Self::from_corpus(file, window).map_err(|e| Error::io(path, e))
    }

    /// Reads `target<TAB>context<TAB>count` lines. Marginals are rebuilt
    /// from the pairs.
    pub fn read_tsv(reader: impl Read) -> Result<Self> {
        let mut counts = Self::new();
        for (idx, line) in BufReader::new(reader).lines().enumerate() {
            let lineno = idx + 1;
            let line = line.map_err(|e| Error::parse(lineno, e.to_string()))?;
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            let [target, context, n] = fields[..] else {
                return Err(Error::parse(
                    lineno,
                    format!("expected 3 tab-separated fields, found {}", fields.len()),
                ));
            };
            let n: u64 = n
                .trim()
                .parse()
                .map_err(|_| Error::parse(lineno, format!("bad count {n:?}")))?;
            let (target, context) = (target.trim().to_lowercase(), context.trim().to_lowercase());
            if target.is_empty() || context.is_empty() {
                return Err(Error::parse(lineno, "empty word"));
            }
            counts.add(&target, &context, n);
        }
        Ok(counts)
    }

    pub fn read_tsv_file(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read_tsv(file).map_err(|e| e.in_file(path))
    }

    pub fn write_tsv(&self, writer: impl Write) -> std::io::Result<()> {
        let mut w = BufWriter::new(writer);
        for (t, c, n) in self.sorted_pairs() {
            writeln!(w, "{t}\t{c}\t{n}")?;
        }
        w.flush()
    }

    pub fn save_tsv(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_tsv(file).map_err(|e| Error::io(path, e))
    }
}

/// The `k` most frequent contexts of `word`, count-descending with ties
/// broken lexicographically.
pub fn top_k_collocates(counts: &CollocationCounts, word: &str, k: usize) -> Vec<(String, u64)> {
    let mut ctx: Vec<(&str, u64)> = counts.contexts(word).collect();
    ctx.sort_unstable_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    ctx.truncate(k);
    ctx.into_iter().map(|(c, n)| (c.to_string(), n)).collect()
}

/// Sparse vector of PMI values keyed by context word. Zero entries are never
/// stored.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PmiVector {
    pub owner: String,
    pub entries: BTreeMap<String, f64>,
}

impl PmiVector {
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn norm(&self) -> f64 {
        self.entries.values().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn scaled(&self, factor: f64) -> PmiVector {
        PmiVector {
            owner: self.owner.clone(),
            entries: self
                .entries
                .iter()
                .map(|(k, v)| (k.clone(), v * factor))
                .filter(|(_, v)| *v != 0.0)
                .collect(),
        }
    }

    /// `owner<TAB>context<TAB>pmi` lines, sorted by context.
    pub fn write_dump(&self, mut w: impl Write) -> std::io::Result<()> {
        for (ctx, v) in &self.entries {
            writeln!(w, "{}\t{}\t{}", self.owner, ctx, v)?;
        }
        Ok(())
    }
}

/// PMI vector over the `k` most frequent contexts of `word`:
/// `log2(pair·N / (target_total·context_total))`. Contexts are truncated by
/// raw frequency before PMI is computed.
pub fn pmi_vector(counts: &CollocationCounts, word: &str, k: usize) -> PmiVector {
    let word = word.trim().to_lowercase();
    let grand = u128::from(counts.grand_total());
    let target_total = u128::from(counts.target_total(&word));
    let mut entries = BTreeMap::new();
    for (ctx, pair) in top_k_collocates(counts, &word, k) {
        let num = u128::from(pair) * grand;
        let den = target_total * u128::from(counts.context_total(&ctx));
        if num == den {
            continue;
        }
        let pmi = (num as f64 / den as f64).log2();
        entries.insert(ctx, pmi);
    }
    PmiVector {
        owner: word,
        entries,
    }
}

/// Key-wise sum of vectors; keys that sum to zero are dropped.
pub fn compose(vectors: &[PmiVector]) -> Result<PmiVector> {
    let (first, rest) = vectors.split_first().ok_or(Error::EmptyInput)?;
    let mut entries = first.entries.clone();
    for v in rest {
        for (k, x) in &v.entries {
            *entries.entry(k.clone()).or_insert(0.0) += x;
        }
    }
    entries.retain(|_, v| *v != 0.0);
    let owner = vectors
        .iter()
        .map(|v| v.owner.as_str())
        .collect::<Vec<_>>()
        .join(" ");
    Ok(PmiVector { owner, entries })
}

/// Cosine of two sparse vectors; 0 when either has zero norm.
pub fn cosine(a: &PmiVector, b: &PmiVector) -> f64 {
    let (na, nb) = (a.norm(), b.norm());
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    let dot: f64 = small
        .entries
        .iter()
        .filter_map(|(k, x)| large.entries.get(k).map(|y| x * y))
        .sum();
    (dot / (na * nb)).clamp(-1.0, 1.0)
}

/// Cosine between the word's vector and the sum of the phrase words'
/// vectors. Zero if any of the vectors involved is empty.
pub fn word_phrase_similarity<S: AsRef<str>>(
    counts: &CollocationCounts,
    word: &str,
    phrase: &[S],
    k: usize,
) -> Result<f64> {
    if phrase.is_empty() {
        return Err(Error::EmptyPhrase);
    }
    let word_vec = pmi_vector(counts, word, k);
    if word_vec.is_empty() {
        return Ok(0.0);
    }
    let parts: Vec<PmiVector> = phrase
        .iter()
        .map(|w| pmi_vector(counts, w.as_ref(), k))
        .collect();
    if parts.iter().any(PmiVector::is_empty) {
        return Ok(0.0);
    }
    Ok(cosine(&word_vec, &compose(&parts)?))
}
