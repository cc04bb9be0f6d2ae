//! Ordered threshold rules over named features, the published rule sets for
//! word-phrase similarity, a greedy rule learner and P/R/F evaluation.

use std::collections::BTreeMap;
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;

use crate::distsim::{self, CollocationCounts};
use crate::error::{Error, Result};
use crate::netstore::SemanticNetwork;
use crate::pathrel::{self, RelatednessParams};

pub const POSITIVE: &str = "positive";
pub const NEGATIVE: &str = "negative";

/// Anything that exposes named numeric features. `None` means the feature is
/// absent, and any condition on an absent feature fails.
pub trait FeatureSource {
    fn feature(&self, name: &str) -> Option<f64>;
}

impl FeatureSource for BTreeMap<String, f64> {
    fn feature(&self, name: &str) -> Option<f64> {
        self.get(name).copied()
    }
}

impl<F: FeatureSource + ?Sized> FeatureSource for &F {
    fn feature(&self, name: &str) -> Option<f64> {
        (**self).feature(name)
    }
}

/// Word-phrase features: semantic-network relatedness and distributional
/// similarity.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct FeatureVector {
    /// Absent when a word was not in the network.
    pub sn: Option<f64>,
    pub ds: Option<f64>,
}

impl FeatureVector {
    pub const NAMES: [&'static str; 2] = ["sn", "ds"];

    pub fn new(sn: Option<f64>, ds: f64) -> Self {
        FeatureVector { sn, ds: Some(ds) }
    }
}

impl FeatureSource for FeatureVector {
    fn feature(&self, name: &str) -> Option<f64> {
        match name {
            "sn" => self.sn,
            "ds" => self.ds,
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Comparator {
    Gt,
    Lt,
    Ge,
    Le,
    Eq,
}

impl Comparator {
    pub fn symbol(self) -> &'static str {
        match self {
            Comparator::Gt => ">",
            Comparator::Lt => "<",
            Comparator::Ge => ">=",
            Comparator::Le => "<=",
            Comparator::Eq => "=",
        }
    }

    pub fn holds(self, value: f64, threshold: f64) -> bool {
        match self {
            Comparator::Gt => value > threshold,
            Comparator::Lt => value < threshold,
            Comparator::Ge => value >= threshold,
            Comparator::Le => value <= threshold,
            Comparator::Eq => value == threshold,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Condition {
    pub feature: String,
    pub comparator: Comparator,
    pub threshold: f64,
}

impl Condition {
    pub fn new(feature: &str, comparator: Comparator, threshold: f64) -> Self {
        Condition {
            feature: feature.to_string(),
            comparator,
            threshold,
        }
    }

    pub fn holds(&self, features: &impl FeatureSource) -> bool {
        features
            .feature(&self.feature)
            .is_some_and(|v| self.comparator.holds(v, self.threshold))
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}{}{}",
            self.feature,
            self.comparator.symbol(),
            self.threshold
        )
    }
}

impl FromStr for Condition {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        // two-character operators first so ">=" is not read as ">"
        let ops = [
            (">=", Comparator::Ge),
            ("<=", Comparator::Le),
            (">", Comparator::Gt),
            ("<", Comparator::Lt),
            ("=", Comparator::Eq),
        ];
        for (sym, cmp) in ops {
            if let Some((name, value)) = s.split_once(sym) {
                let name = name.trim();
                if name.is_empty() {
                    return Err(format!("missing feature name in {s:?}"));
                }
                let threshold: f64 = value
                    .trim()
                    .parse()
                    .map_err(|_| format!("bad threshold in {s:?}"))?;
                if !threshold.is_finite() {
                    return Err(format!("threshold must be finite in {s:?}"));
                }
                return Ok(Condition::new(&name.to_lowercase(), cmp, threshold));
            }
        }
        Err(format!("no comparator in {s:?}"))
    }
}

/// Conjunction of conditions with an outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct Rule {
    pub conditions: Vec<Condition>,
    pub outcome: String,
}

impl Rule {
    pub fn new(conditions: Vec<Condition>, outcome: &str) -> Self {
        Rule {
            conditions,
            outcome: outcome.to_string(),
        }
    }

    pub fn matches(&self, features: &impl FeatureSource) -> bool {
        !self.conditions.is_empty() && self.conditions.iter().all(|c| c.holds(features))
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IF ")?;
        for (i, c) in self.conditions.iter().enumerate() {
            if i > 0 {
                write!(f, " AND ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, " THEN {}", self.outcome)
    }
}

/// Ordered rules, first match wins, with a default outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct RuleSet {
    pub rules: Vec<Rule>,
    pub default_outcome: String,
}

impl RuleSet {
    pub fn new(rules: Vec<Rule>, default_outcome: &str) -> Self {
        RuleSet {
            rules,
            default_outcome: default_outcome.to_string(),
        }
    }

    pub fn apply(&self, features: &impl FeatureSource) -> &str {
        self.rules
            .iter()
            .find(|r| r.matches(features))
            .map_or(self.default_outcome.as_str(), |r| r.outcome.as_str())
    }

    /// Checks that every rule has conditions and uses only known features.
    pub fn validate(&self, feature_names: &[&str]) -> Result<()> {
        for (i, rule) in self.rules.iter().enumerate() {
            if rule.conditions.is_empty() {
                return Err(Error::parse(i + 1, "rule has no conditions"));
            }
            if let Some(c) = rule
                .conditions
                .iter()
                .find(|c| !feature_names.contains(&c.feature.as_str()))
            {
                return Err(Error::parse(
                    i + 1,
                    format!(
                        "unknown feature {:?} (expected one of {feature_names:?})",
                        c.feature
                    ),
                ));
            }
        }
        Ok(())
    }

    pub fn read(reader: impl Read) -> Result<Self> {
        let mut rules = Vec::new();
        let mut default = None;
        for (idx, line) in BufReader::new(reader).lines().enumerate() {
            let lineno = idx + 1;
            let line = line.map_err(|e| Error::parse(lineno, e.to_string()))?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if default.is_some() {
                return Err(Error::parse(lineno, "content after DEFAULT line"));
            }
            if let Some(outcome) = line.strip_prefix("DEFAULT ") {
                default = Some(outcome.trim().to_string());
                continue;
            }
            let body = line
                .strip_prefix("IF ")
                .ok_or_else(|| Error::parse(lineno, "expected IF or DEFAULT"))?;
            let (conds, outcome) = body
                .rsplit_once(" THEN ")
                .ok_or_else(|| Error::parse(lineno, "missing THEN"))?;
            let conditions = conds
                .split(" AND ")
                .map(str::parse)
                .collect::<Result<Vec<Condition>, String>>()
                .map_err(|m| Error::parse(lineno, m))?;
            let outcome = outcome.trim();
            if outcome.is_empty() {
                return Err(Error::parse(lineno, "empty outcome"));
            }
            rules.push(Rule::new(conditions, outcome));
        }
        let default = default.ok_or_else(|| Error::parse(0, "missing DEFAULT line"))?;
        Ok(RuleSet {
            rules,
            default_outcome: default,
        })
    }

    pub fn read_file(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read(file).map_err(|e| e.in_file(path))
    }
}

impl fmt::Display for RuleSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rules {
            writeln!(f, "{r}")?;
        }
        writeln!(f, "DEFAULT {}", self.default_outcome)
    }
}

impl FromStr for RuleSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        RuleSet::read(s.as_bytes())
    }
}

pub fn apply_rules<'a>(rs: &'a RuleSet, features: &impl FeatureSource) -> &'a str {
    rs.apply(features)
}

fn sn_over(t: f64) -> Condition {
    Condition::new("sn", Comparator::Gt, t)
}

fn ds_over(t: f64) -> Condition {
    Condition::new("ds", Comparator::Gt, t)
}

/// Semantic network only: positive above 61%.
pub fn run1_rules() -> RuleSet {
    RuleSet::new(vec![Rule::new(vec![sn_over(0.61)], POSITIVE)], NEGATIVE)
}

/// Semantic network first; the distributional rule (above 40%) decides only
/// when the network relatedness is unavailable.
pub fn run2_rules() -> RuleSet {
    RuleSet::new(
        vec![
            Rule::new(vec![sn_over(0.61)], POSITIVE),
            Rule::new(vec![Condition::new("sn", Comparator::Le, 0.61)], NEGATIVE),
            Rule::new(vec![ds_over(0.40)], POSITIVE),
        ],
        NEGATIVE,
    )
}

pub fn run2_classify(fv: &FeatureVector) -> &'static str {
    match fv.sn {
        Some(sn) if sn > 0.61 => POSITIVE,
        Some(_) => NEGATIVE,
        None if fv.ds.is_some_and(|ds| ds > 0.40) => POSITIVE,
        None => NEGATIVE,
    }
}

/// Hybrid rules over both features.
pub fn run3_rules() -> RuleSet {
    RuleSet::new(
        vec![
            Rule::new(vec![sn_over(0.61)], POSITIVE),
            Rule::new(vec![ds_over(0.40)], POSITIVE),
            Rule::new(vec![sn_over(0.53), ds_over(0.31)], POSITIVE),
        ],
        NEGATIVE,
    )
}

/// SN and DS for a word-phrase pair. SN is absent when any word is missing
/// from the network (or no network is given); DS is absent only when no
/// counts are given.
pub fn assemble_features<S: AsRef<str>>(
    net: Option<&SemanticNetwork>,
    counts: Option<&CollocationCounts>,
    word: &str,
    phrase: &[S],
    params: &RelatednessParams,
    k: usize,
) -> Result<FeatureVector> {
    if phrase.is_empty() {
        return Err(Error::EmptyPhrase);
    }
    let sn = match net {
        Some(net) => match pathrel::word_phrase_relatedness(net, word, phrase, params) {
            Ok(score) => Some(score.value),
            Err(Error::WordNotInNetwork(_)) => None,
            Err(e) => return Err(e),
        },
        None => None,
    };
    let ds = counts
        .map(|c| distsim::word_phrase_similarity(c, word, phrase, k))
        .transpose()?;
    Ok(FeatureVector { sn, ds })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Positive,
    Negative,
}

impl Label {
    pub fn as_str(self) -> &'static str {
        match self {
            Label::Positive => POSITIVE,
            Label::Negative => NEGATIVE,
        }
    }
}

impl FromStr for Label {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim().to_lowercase().as_str() {
            POSITIVE => Ok(Label::Positive),
            NEGATIVE => Ok(Label::Negative),
            other => Err(format!(
                "label must be positive or negative, found {other:?}"
            )),
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub word: String,
    pub phrase: Vec<String>,
    pub label: Option<Label>,
}

/// Word-phrase pairs, read from `word<TAB>phrase<TAB>label` lines. The label
/// column may be omitted for unlabeled data.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LabeledDataset {
    pub instances: Vec<Instance>,
}

impl LabeledDataset {
    pub fn read(reader: impl Read) -> Result<Self> {
        let mut instances = Vec::new();
        for (idx, line) in BufReader::new(reader).lines().enumerate() {
            let lineno = idx + 1;
            let line = line.map_err(|e| Error::parse(lineno, e.to_string()))?;
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            let (word, phrase, label) = match fields[..] {
                [w, p] => (w, p, None),
                [w, p, l] if l.trim().is_empty() => (w, p, None),
                [w, p, l] => (w, p, Some(l.parse().map_err(|m| Error::parse(lineno, m))?)),
                _ => {
                    return Err(Error::parse(
                        lineno,
                        format!(
                            "expected 2 or 3 tab-separated fields, found {}",
                            fields.len()
                        ),
                    ))
                }
            };
            let word = word.trim().to_lowercase();
            let phrase: Vec<String> = phrase.split_whitespace().map(str::to_lowercase).collect();
            if word.is_empty() {
                return Err(Error::parse(lineno, "empty word"));
            }
            if phrase.is_empty() {
                return Err(Error::parse(lineno, "empty phrase"));
            }
            instances.push(Instance {
                word,
                phrase,
                label,
            });
        }
        Ok(LabeledDataset { instances })
    }

    pub fn read_file(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read(file).map_err(|e| e.in_file(path))
    }

    pub fn is_fully_labeled(&self) -> bool {
        !self.instances.is_empty() && self.instances.iter().all(|i| i.label.is_some())
    }
}

/// Feature rows with gold labels, read from a TSV whose header names the
/// feature columns and a `label` column. Empty cells are absent features;
/// `word` and `phrase` columns are ignored.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FeatureTable {
    pub feature_names: Vec<String>,
    pub rows: Vec<(BTreeMap<String, f64>, Label)>,
}

impl FeatureTable {
    pub fn read(reader: impl Read) -> Result<Self> {
        let mut lines = BufReader::new(reader).lines().enumerate();
        let (header, label_col, columns) = loop {
            let Some((idx, line)) = lines.next() else {
                return Err(Error::EmptyDataset);
            };
            let line = line.map_err(|e| Error::parse(idx + 1, e.to_string()))?;
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let header: Vec<String> = line.split('\t').map(|h| h.trim().to_lowercase()).collect();
            let label_col = header
                .iter()
                .position(|h| h == "label")
                .ok_or_else(|| Error::parse(idx + 1, "header has no label column"))?;
            let columns: Vec<usize> = (0..header.len())
                .filter(|&i| i != label_col && !matches!(header[i].as_str(), "word" | "phrase"))
                .collect();
            break (header, label_col, columns);
        };
        let mut rows = Vec::new();
        for (idx, line) in lines {
            let lineno = idx + 1;
            let line = line.map_err(|e| Error::parse(lineno, e.to_string()))?;
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() != header.len() {
                return Err(Error::parse(
                    lineno,
                    format!("expected {} fields, found {}", header.len(), fields.len()),
                ));
            }
            let label: Label = fields[label_col]
                .parse()
                .map_err(|m| Error::parse(lineno, m))?;
            let mut features = BTreeMap::new();
            for &c in &columns {
                let cell = fields[c].trim();
                if cell.is_empty() {
                    continue;
                }
                let v: f64 = cell.parse().map_err(|_| {
                    Error::parse(lineno, format!("bad value {cell:?} for {}", header[c]))
                })?;
                features.insert(header[c].clone(), v);
            }
            rows.push((features, label));
        }
        if rows.is_empty() {
            return Err(Error::EmptyDataset);
        }
        Ok(FeatureTable {
            feature_names: columns.iter().map(|&c| header[c].clone()).collect(),
            rows,
        })
    }

    pub fn read_file(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read(file).map_err(|e| e.in_file(path))
    }

    pub fn names(&self) -> Vec<&str> {
        self.feature_names.iter().map(String::as_str).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct Confusion {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
}

impl Confusion {
    pub fn record(&mut self, predicted_positive: bool, gold: Label) {
        match (predicted_positive, gold) {
            (true, Label::Positive) => self.tp += 1,
            (true, Label::Negative) => self.fp += 1,
            (false, Label::Negative) => self.tn += 1,
            (false, Label::Positive) => self.fn_ += 1,
        }
    }

    pub fn metrics(self) -> Metrics {
        let ratio = |num: usize, den: usize| {
            if den == 0 {
                0.0
            } else {
                num as f64 / den as f64
            }
        };
        let precision = ratio(self.tp, self.tp + self.fp);
        let recall = ratio(self.tp, self.tp + self.fn_);
        let f_measure = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        Metrics {
            precision,
            recall,
            f_measure,
            confusion: self,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Metrics {
    pub precision: f64,
    pub recall: f64,
    pub f_measure: f64,
    pub confusion: Confusion,
}

impl Metrics {
    pub fn accuracy(&self) -> f64 {
        let c = self.confusion;
        let total = c.tp + c.fp + c.tn + c.fn_;
        if total == 0 {
            0.0
        } else {
            (c.tp + c.tn) as f64 / total as f64
        }
    }
}

/// Scores a rule set with `positive` as the target class.
pub fn evaluate<F: FeatureSource>(rs: &RuleSet, data: &[(F, Label)]) -> Metrics {
    let mut confusion = Confusion::default();
    for (features, gold) in data {
        confusion.record(rs.apply(features) == POSITIVE, *gold);
    }
    confusion.metrics()
}

/// Coverage of one learned rule on the data it was grown from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RuleStats {
    pub covered_positive: usize,
    pub covered_total: usize,
    /// Positives and total instances still uncovered when the rule was grown.
    pub pool_positive: usize,
    pub pool_total: usize,
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    feature: usize,
    comparator: Comparator,
    threshold: f64,
    positive: usize,
    total: usize,
}

impl Candidate {
    /// Higher precision, then more positives covered, then lower threshold.
    fn beats(&self, other: &Candidate) -> bool {
        let lhs = self.positive * other.total;
        let rhs = other.positive * self.total;
        if lhs != rhs {
            return lhs > rhs;
        }
        if self.positive != other.positive {
            return self.positive > other.positive;
        }
        if self.threshold != other.threshold {
            return self.threshold < other.threshold;
        }
        (self.feature, self.comparator == Comparator::Lt)
            < (other.feature, other.comparator == Comparator::Lt)
    }
}

/// Best single `>`/`<` condition on `covered` across all features, with
/// thresholds at midpoints between consecutive distinct values.
fn best_condition<F: FeatureSource>(
    data: &[(F, Label)],
    covered: &[usize],
    features: &[&str],
) -> Option<Candidate> {
    let mut best: Option<Candidate> = None;
    for (fi, name) in features.iter().enumerate() {
        let mut values: Vec<(f64, bool)> = covered
            .iter()
            .filter_map(|&i| {
                let (f, label) = &data[i];
                f.feature(name)
                    .filter(|v| v.is_finite())
                    .map(|v| (v, *label == Label::Positive))
            })
            .collect();
        values.sort_by(|a, b| a.0.total_cmp(&b.0));
        let total = values.len();
        let total_pos = values.iter().filter(|v| v.1).count();
        let mut below = 0;
        let mut below_pos = 0;
        for i in 0..total {
            below += 1;
            below_pos += usize::from(values[i].1);
            if i + 1 == total || values[i].0 == values[i + 1].0 {
                continue;
            }
            let threshold = (values[i].0 + values[i + 1].0) / 2.0;
            let options = [
                (Comparator::Lt, below_pos, below),
                (Comparator::Gt, total_pos - below_pos, total - below),
            ];
            for (comparator, positive, covered_n) in options {
                if positive == 0 {
                    continue;
                }
                let cand = Candidate {
                    feature: fi,
                    comparator,
                    threshold,
                    positive,
                    total: covered_n,
                };
                if best.as_ref().is_none_or(|b| cand.beats(b)) {
                    best = Some(cand);
                }
            }
        }
    }
    best
}

/// Greedy separate-and-conquer learner for positive-class threshold rules.
///
/// Each rule is grown one condition at a time, always taking the condition
/// with the highest precision on what the rule currently covers, until it
/// is pure or no condition improves it. Positives covered by a finished
/// rule are removed before the next rule is grown. The default outcome is
/// negative.
pub fn learn_threshold_rules<F: FeatureSource>(
    train: &[(F, Label)],
    features: &[&str],
    max_rules: usize,
) -> Result<RuleSet> {
    learn_with_stats(train, features, max_rules).map(|(rs, _)| rs)
}

pub fn learn_with_stats<F: FeatureSource>(
    train: &[(F, Label)],
    features: &[&str],
    max_rules: usize,
) -> Result<(RuleSet, Vec<RuleStats>)> {
    let has = |l: Label| train.iter().any(|(_, g)| *g == l);
    if train.len() < 2 || !has(Label::Positive) || !has(Label::Negative) {
        return Err(Error::DegenerateTraining);
    }
    let is_pos = |i: usize| train[i].1 == Label::Positive;

    let mut pool: Vec<usize> = (0..train.len()).collect();
    let mut rules = Vec::new();
    let mut stats = Vec::new();
    while rules.len() < max_rules && pool.iter().any(|&i| is_pos(i)) {
        let pool_positive = pool.iter().filter(|&&i| is_pos(i)).count();
        let mut covered = pool.clone();
        let mut conditions = Vec::new();
        loop {
            let positive = covered.iter().filter(|&&i| is_pos(i)).count();
            if positive == covered.len() {
                break;
            }
            let Some(cand) = best_condition(train, &covered, features) else {
                break;
            };
            // must strictly improve precision
            if cand.positive * covered.len() <= positive * cand.total {
                break;
            }
            let cond = Condition::new(features[cand.feature], cand.comparator, cand.threshold);
            covered.retain(|&i| cond.holds(&train[i].0));
            conditions.push(cond);
        }
        if conditions.is_empty() {
            break;
        }
        let covered_positive = covered.iter().filter(|&&i| is_pos(i)).count();
        stats.push(RuleStats {
            covered_positive,
            covered_total: covered.len(),
            pool_positive,
            pool_total: pool.len(),
        });
        let rule = Rule::new(conditions, POSITIVE);
        pool.retain(|&i| !(is_pos(i) && rule.matches(&train[i].0)));
        rules.push(rule);
    }
    Ok((RuleSet::new(rules, NEGATIVE), stats))
}
