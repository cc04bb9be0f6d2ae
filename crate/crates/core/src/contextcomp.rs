//! Literal versus figurative use of a phrase in a sentence.
//!
//! Three features per instance: FC, whether the phrase sits next to one of
//! its most frequent neighboring expressions in a corpus; SRB and SRA, the
//! network relatedness of the nearest content word before and after the
//! phrase to the phrase itself.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::netstore::SemanticNetwork;
use crate::pathrel::{self, RelatednessParams};
use crate::ruleset::{Comparator, Condition, FeatureSource, Rule, RuleSet};

pub const LITERAL: &str = "literal";
pub const FIGURATIVE: &str = "figurative";

/// Relatedness used when a side has no usable content word.
pub const MISSING_SIDE_RELATEDNESS: f64 = 1.0;

/// Longest neighboring expression collected, in tokens.
const MAX_EXPRESSION_LEN: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ContextLabel {
    Literal,
    Figurative,
}

impl ContextLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            ContextLabel::Literal => LITERAL,
            ContextLabel::Figurative => FIGURATIVE,
        }
    }
}

impl FromStr for ContextLabel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim().to_lowercase().as_str() {
            LITERAL => Ok(ContextLabel::Literal),
            FIGURATIVE => Ok(ContextLabel::Figurative),
            other => Err(format!(
                "label must be literal or figurative, found {other:?}"
            )),
        }
    }
}

impl fmt::Display for ContextLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContextInstance {
    pub phrase: Vec<String>,
    pub sentence: Vec<String>,
    /// Token range `[start, end)` of the phrase in `sentence`.
    pub span: (usize, usize),
    pub label: Option<ContextLabel>,
}

impl ContextInstance {
    /// Lowercases all tokens and checks that the span holds the phrase.
    pub fn new(
        phrase: &str,
        sentence: &str,
        span: (usize, usize),
        label: Option<ContextLabel>,
    ) -> Result<Self, String> {
        let phrase: Vec<String> = phrase.split_whitespace().map(str::to_lowercase).collect();
        let sentence: Vec<String> = sentence.split_whitespace().map(str::to_lowercase).collect();
        let (start, end) = span;
        if phrase.is_empty() {
            return Err("empty phrase".into());
        }
        if start >= end || end > sentence.len() {
            return Err(format!(
                "span {start}..{end} out of range for a {}-token sentence",
                sentence.len()
            ));
        }
        if sentence[start..end] != phrase[..] {
            return Err(format!(
                "span {start}..{end} holds {:?}, not the phrase {:?}",
                sentence[start..end].join(" "),
                phrase.join(" ")
            ));
        }
        Ok(ContextInstance {
            phrase,
            sentence,
            span,
            label,
        })
    }

    pub fn phrase_text(&self) -> String {
        self.phrase.join(" ")
    }
}

/// Reads `phrase<TAB>start<TAB>end<TAB>label<TAB>sentence` lines. The label
/// field may be empty.
pub fn read_context_dataset(reader: impl Read) -> Result<Vec<ContextInstance>> {
    let mut out = Vec::new();
    for (idx, line) in BufReader::new(reader).lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| Error::parse(lineno, e.to_string()))?;
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        let [phrase, start, end, label, sentence] = fields[..] else {
            return Err(Error::parse(
                lineno,
                format!("expected 5 tab-separated fields, found {}", fields.len()),
            ));
        };
        let index = |s: &str| {
            s.trim()
                .parse::<usize>()
                .map_err(|_| Error::parse(lineno, format!("bad token index {s:?}")))
        };
        let span = (index(start)?, index(end)?);
        let label = match label.trim() {
            "" => None,
            l => Some(l.parse().map_err(|m| Error::parse(lineno, m))?),
        };
        let inst = ContextInstance::new(phrase, sentence, span, label)
            .map_err(|m| Error::parse(lineno, m))?;
        out.push(inst);
    }
    Ok(out)
}

pub fn read_context_dataset_file(path: &Path) -> Result<Vec<ContextInstance>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_context_dataset(file).map_err(|e| e.in_file(path))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Before,
    After,
}

impl Side {
    fn name(self) -> &'static str {
        match self {
            Side::Before => "before",
            Side::After => "after",
        }
    }
}

/// The most frequent expressions of 1 to 3 tokens seen immediately before
/// and immediately after a phrase.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CollocationSet {
    pub phrase: String,
    /// Count-descending, ties in lexicographic order.
    pub before: Vec<(String, u64)>,
    pub after: Vec<(String, u64)>,
}

impl CollocationSet {
    pub fn contains(&self, side: Side, expression: &str) -> bool {
        let list = match side {
            Side::Before => &self.before,
            Side::After => &self.after,
        };
        list.iter().any(|(e, _)| e == expression)
    }

    /// `side<TAB>expression<TAB>count` lines after a `# phrase<TAB>...`
    /// marker.
    pub fn write(&self, mut w: impl Write) -> std::io::Result<()> {
        writeln!(w, "# phrase\t{}", self.phrase)?;
        for (side, list) in [(Side::Before, &self.before), (Side::After, &self.after)] {
            for (expr, n) in list {
                writeln!(w, "{}\t{}\t{}", side.name(), expr, n)?;
            }
        }
        Ok(())
    }
}

/// Reads collocation sets. A `# phrase<TAB>text` line starts the set for
/// that phrase; lines before any marker form a set with an empty phrase,
/// which applies to every phrase.
pub fn read_collocation_sets(reader: impl Read) -> Result<Vec<CollocationSet>> {
    let mut sets: Vec<CollocationSet> = Vec::new();
    for (idx, line) in BufReader::new(reader).lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| Error::parse(lineno, e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            if let Some((key, phrase)) = rest.trim_start().split_once('\t') {
                if key.trim() == "phrase" {
                    sets.push(CollocationSet {
                        phrase: normalize_phrase(phrase),
                        ..CollocationSet::default()
                    });
                }
            }
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        let [side, expr, count] = fields[..] else {
            return Err(Error::parse(
                lineno,
                format!("expected 3 tab-separated fields, found {}", fields.len()),
            ));
        };
        let count: u64 = count
            .trim()
            .parse()
            .map_err(|_| Error::parse(lineno, format!("bad count {count:?}")))?;
        let expr = normalize_phrase(expr);
        let n_tokens = expr.split(' ').count();
        if expr.is_empty() || n_tokens > MAX_EXPRESSION_LEN {
            return Err(Error::parse(lineno, "expressions must have 1 to 3 tokens"));
        }
        if sets.is_empty() {
            sets.push(CollocationSet::default());
        }
        let set = sets.last_mut().expect("just ensured non-empty");
        let list = match side.trim() {
            "before" => &mut set.before,
            "after" => &mut set.after,
            other => {
                return Err(Error::parse(
                    lineno,
                    format!("side must be before or after, found {other:?}"),
                ))
            }
        };
        if !list.iter().any(|(e, _)| *e == expr) {
            list.push((expr, count));
        }
    }
    Ok(sets)
}

pub fn read_collocation_sets_file(path: &Path) -> Result<Vec<CollocationSet>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_collocation_sets(file).map_err(|e| e.in_file(path))
}

fn normalize_phrase(s: &str) -> String {
    s.split_whitespace()
        .map(str::to_lowercase)
        .collect::<Vec<_>>()
        .join(" ")
}

fn top_k(counts: HashMap<String, u64>, k: usize) -> Vec<(String, u64)> {
    let mut v: Vec<_> = counts.into_iter().collect();
    v.sort_unstable_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    v.truncate(k);
    v
}

/// Collects the `k` most frequent 1-3 token expressions on each side of
/// every occurrence of `phrase` in the corpus sentences.
pub fn build_collocation_set<S: AsRef<str>>(
    sentences: &[Vec<S>],
    phrase: &str,
    k: usize,
) -> CollocationSet {
    let phrase = normalize_phrase(phrase);
    let tokens: Vec<&str> = phrase.split(' ').filter(|t| !t.is_empty()).collect();
    let mut before: HashMap<String, u64> = HashMap::new();
    let mut after: HashMap<String, u64> = HashMap::new();
    if !tokens.is_empty() {
        for sentence in sentences {
            let s: Vec<&str> = sentence.iter().map(AsRef::as_ref).collect();
            if s.len() < tokens.len() {
                continue;
            }
            for start in 0..=s.len() - tokens.len() {
                let end = start + tokens.len();
                if s[start..end] != tokens[..] {
                    continue;
                }
                for len in 1..=MAX_EXPRESSION_LEN {
                    if start >= len {
                        *before.entry(s[start - len..start].join(" ")).or_insert(0) += 1;
                    }
                    if end + len <= s.len() {
                        *after.entry(s[end..end + len].join(" ")).or_insert(0) += 1;
                    }
                }
            }
        }
    }
    CollocationSet {
        phrase,
        before: top_k(before, k),
        after: top_k(after, k),
    }
}

/// 1 when the tokens right before the phrase end with a frequent
/// before-expression, or the tokens right after it start with a frequent
/// after-expression.
pub fn fc_feature(instance: &ContextInstance, cset: &CollocationSet) -> u8 {
    let (start, end) = instance.span;
    let s = &instance.sentence;
    let hit = (1..=MAX_EXPRESSION_LEN).any(|len| {
        (start >= len && cset.contains(Side::Before, &s[start - len..start].join(" ")))
            || (end + len <= s.len() && cset.contains(Side::After, &s[end..end + len].join(" ")))
    });
    u8::from(hit)
}

/// Function words skipped when looking for content words.
#[derive(Debug, Clone)]
pub struct Stopwords(HashSet<String>);

impl Default for Stopwords {
    fn default() -> Self {
        Self::bundled()
    }
}

impl Stopwords {
    pub fn bundled() -> Self {
        Self::parse(include_str!("stopwords.txt"))
    }

    fn parse(text: &str) -> Self {
        Stopwords(
            text.lines()
                .map(|l| l.trim().to_lowercase())
                .filter(|l| !l.is_empty() && !l.starts_with('#'))
                .collect(),
        )
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(Self::parse(&text))
    }

    pub fn contains(&self, word: &str) -> bool {
        self.0.contains(word)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Nearest alphabetic non-stopword outside the span, scanning to the
/// sentence edge.
pub fn content_word<'a>(
    sentence: &'a [String],
    span: (usize, usize),
    side: Side,
    stopwords: &Stopwords,
) -> Option<&'a str> {
    let usable = |t: &&String| {
        !t.is_empty() && t.chars().all(char::is_alphabetic) && !stopwords.contains(t.as_str())
    };
    match side {
        Side::Before => sentence[..span.0.min(sentence.len())]
            .iter()
            .rev()
            .find(usable),
        Side::After => sentence[span.1.min(sentence.len())..].iter().find(usable),
    }
    .map(String::as_str)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ContextFeatures {
    pub fc: u8,
    pub srb: f64,
    pub sra: f64,
}

impl ContextFeatures {
    pub const NAMES: [&'static str; 3] = ["fc", "srb", "sra"];
}

impl FeatureSource for ContextFeatures {
    fn feature(&self, name: &str) -> Option<f64> {
        match name {
            "fc" => Some(f64::from(self.fc)),
            "srb" => Some(self.srb),
            "sra" => Some(self.sra),
            _ => None,
        }
    }
}

fn side_relatedness(
    word: Option<&str>,
    phrase: &[String],
    net: &SemanticNetwork,
    params: &RelatednessParams,
) -> Result<f64> {
    let Some(word) = word else {
        return Ok(MISSING_SIDE_RELATEDNESS);
    };
    match pathrel::word_phrase_relatedness(net, word, phrase, params) {
        Ok(score) => Ok(score.value),
        Err(Error::WordNotInNetwork(_)) => Ok(MISSING_SIDE_RELATEDNESS),
        Err(e) => Err(e),
    }
}

pub fn context_features(
    instance: &ContextInstance,
    cset: &CollocationSet,
    net: &SemanticNetwork,
    params: &RelatednessParams,
    stopwords: &Stopwords,
) -> Result<ContextFeatures> {
    let (s, span) = (&instance.sentence, instance.span);
    let before = content_word(s, span, Side::Before, stopwords);
    let after = content_word(s, span, Side::After, stopwords);
    Ok(ContextFeatures {
        fc: fc_feature(instance, cset),
        srb: side_relatedness(before, &instance.phrase, net, params)?,
        sra: side_relatedness(after, &instance.phrase, net, params)?,
    })
}

/// Literal when the phrase has no frequent collocation and either side is
/// weakly related; figurative otherwise.
pub fn context_rules() -> RuleSet {
    let fc_zero = || Condition::new("fc", Comparator::Eq, 0.0);
    RuleSet::new(
        vec![
            Rule::new(
                vec![fc_zero(), Condition::new("srb", Comparator::Lt, 0.75)],
                LITERAL,
            ),
            Rule::new(
                vec![fc_zero(), Condition::new("sra", Comparator::Lt, 0.75)],
                LITERAL,
            ),
        ],
        FIGURATIVE,
    )
}

/// Everything needed to classify context instances.
pub struct ContextPipeline<'a> {
    pub net: &'a SemanticNetwork,
    pub params: RelatednessParams,
    pub stopwords: Stopwords,
    pub rules: RuleSet,
    sets: BTreeMap<String, CollocationSet>,
    shared: CollocationSet,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContextPrediction {
    pub features: ContextFeatures,
    pub label: String,
}

impl<'a> ContextPipeline<'a> {
    pub fn new(net: &'a SemanticNetwork, params: RelatednessParams) -> Self {
        ContextPipeline {
            net,
            params,
            stopwords: Stopwords::bundled(),
            rules: context_rules(),
            sets: BTreeMap::new(),
            shared: CollocationSet::default(),
        }
    }

    /// Registers a collocation set. A set with an empty phrase applies to
    /// every phrase that has no set of its own.
    pub fn add_set(&mut self, set: CollocationSet) {
        if set.phrase.is_empty() {
            self.shared = set;
        } else {
            self.sets.insert(set.phrase.clone(), set);
        }
    }

    /// Builds a set from the corpus for every distinct phrase in `instances`.
    pub fn add_sets_from_corpus<S: AsRef<str> + Sync>(
        &mut self,
        sentences: &[Vec<S>],
        instances: &[ContextInstance],
        k: usize,
    ) {
        let phrases: Vec<String> = instances
            .iter()
            .map(ContextInstance::phrase_text)
            .collect::<std::collections::BTreeSet<_>>()
            .into_iter()
            .collect();
        let built: Vec<CollocationSet> = phrases
            .par_iter()
            .map(|p| build_collocation_set(sentences, p, k))
            .collect();
        for set in built {
            self.add_set(set);
        }
    }

    pub fn sets(&self) -> impl Iterator<Item = &CollocationSet> {
        self.sets.values()
    }

    pub fn set_for(&self, phrase: &str) -> &CollocationSet {
        self.sets.get(phrase).unwrap_or(&self.shared)
    }

    pub fn classify(&self, instance: &ContextInstance) -> Result<ContextPrediction> {
        let cset = self.set_for(&instance.phrase_text());
        let features = context_features(instance, cset, self.net, &self.params, &self.stopwords)?;
        let label = self.rules.apply(&features).to_string();
        Ok(ContextPrediction { features, label })
    }

    /// Classifies in parallel; output order matches input order.
    pub fn classify_all(&self, instances: &[ContextInstance]) -> Result<Vec<ContextPrediction>> {
        instances.par_iter().map(|i| self.classify(i)).collect()
    }

    /// Fraction of labeled instances classified correctly.
    pub fn evaluate_accuracy(&self, instances: &[ContextInstance]) -> Result<f64> {
        let predictions = self.classify_all(instances)?;
        accuracy(instances, &predictions)
    }
}

pub fn accuracy(instances: &[ContextInstance], predictions: &[ContextPrediction]) -> Result<f64> {
    let (mut right, mut total) = (0usize, 0usize);
    for (inst, pred) in instances.iter().zip(predictions) {
        if let Some(gold) = inst.label {
            total += 1;
            right += usize::from(gold.as_str() == pred.label);
        }
    }
    if total == 0 {
        return Err(Error::EmptyDataset);
    }
    Ok(right as f64 / total as f64)
}
