//! The weighted, directed lexical network of words and synsets.
//!
//! Words connect to their synsets through sense links, synsets connect to
//! each other through lexical relations, and synsets connect to the words
//! of their gloss logical form through predicate links. Every relation is
//! mapped onto one of seven categories and the category determines the
//! traversal cost of the edge.

use std::collections::HashMap;
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::report::LoadReport;

/// Canonical name of the word-synset relation.
pub const SENSE_RELATION: &str = "lemma-synset";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct NodeId(pub u32);

impl NodeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum NodeKind {
    Word,
    Synset,
}

impl NodeKind {
    pub fn code(self) -> &'static str {
        match self {
            NodeKind::Word => "W",
            NodeKind::Synset => "S",
        }
    }

    pub fn from_code(code: &str) -> Option<Self> {
        match code {
            "W" => Some(NodeKind::Word),
            "S" => Some(NodeKind::Synset),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Node {
    pub kind: NodeKind,
    pub label: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum RelationCategory {
    Similar,
    Hypernym,
    Sense,
    Predicate,
    Part,
    Instance,
    Other,
}

impl RelationCategory {
    pub const ALL: [RelationCategory; 7] = [
        RelationCategory::Similar,
        RelationCategory::Hypernym,
        RelationCategory::Sense,
        RelationCategory::Predicate,
        RelationCategory::Part,
        RelationCategory::Instance,
        RelationCategory::Other,
    ];

    /// Traversal cost of an edge in this category. Lower cost means the
    /// relation contributes more to relatedness.
    pub fn weight(self) -> u32 {
        match self {
            RelationCategory::Similar => 1,
            RelationCategory::Hypernym => 2,
            RelationCategory::Sense => 4,
            RelationCategory::Predicate => 6,
            RelationCategory::Part => 8,
            RelationCategory::Instance => 10,
            RelationCategory::Other => 12,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            RelationCategory::Similar => "Similar",
            RelationCategory::Hypernym => "Hypernym",
            RelationCategory::Sense => "Sense",
            RelationCategory::Predicate => "Predicate",
            RelationCategory::Part => "Part",
            RelationCategory::Instance => "Instance",
            RelationCategory::Other => "Other",
        }
    }

    fn slot(self) -> usize {
        self as usize
    }
}

impl FromStr for RelationCategory {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        RelationCategory::ALL
            .into_iter()
            .find(|c| c.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| format!("unknown relation category {s:?}"))
    }
}

/// Which node kinds a relation may connect.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Endpoints {
    SynsetToSynset,
    /// Sense links, stored in both directions.
    WordSynset,
    SynsetToWord,
    WordToSynset,
    Any,
}

impl Endpoints {
    fn admits(self, src: NodeKind, dst: NodeKind) -> bool {
        use NodeKind::*;
        match self {
            Endpoints::SynsetToSynset => src == Synset && dst == Synset,
            Endpoints::WordSynset => src != dst,
            Endpoints::SynsetToWord => src == Synset && dst == Word,
            Endpoints::WordToSynset => src == Word && dst == Synset,
            Endpoints::Any => true,
        }
    }
}

/// Built-in relation vocabulary: (name, category, endpoint constraint).
const BUILTIN_RELATIONS: &[(&str, RelationCategory, Endpoints)] = {
    use Endpoints::*;
    use RelationCategory::*;
    &[
        ("similar_to", Similar, SynsetToSynset),
        ("pertainym", Similar, SynsetToSynset),
        ("participle_of_verb", Similar, SynsetToSynset),
        ("entailment", Similar, SynsetToSynset),
        ("cause", Similar, SynsetToSynset),
        ("antonym", Similar, SynsetToSynset),
        ("verb_group", Similar, SynsetToSynset),
        ("hypernym", Hypernym, SynsetToSynset),
        ("instance_hypernym", Hypernym, SynsetToSynset),
        ("derivationally_related", Hypernym, Any),
        ("lemma_synset", Sense, WordSynset),
        ("predicate", Predicate, SynsetToWord),
        ("holonym", Part, SynsetToSynset),
        ("holonym_instance", Part, SynsetToSynset),
        ("holonym_member", Part, SynsetToSynset),
        ("holonym_substance", Part, SynsetToSynset),
        ("meronym", Part, SynsetToSynset),
        ("meronym_instance", Part, SynsetToSynset),
        ("meronym_member", Part, SynsetToSynset),
        ("meronym_substance", Part, SynsetToSynset),
        ("inverse_predicate", Part, WordToSynset),
        ("hyponym", Instance, SynsetToSynset),
        ("instance_hyponym", Instance, SynsetToSynset),
        ("attribute", Other, SynsetToSynset),
        ("also_see", Other, SynsetToSynset),
        ("domain_topic", Other, SynsetToSynset),
        ("domain_region", Other, SynsetToSynset),
        ("domain_usage", Other, SynsetToSynset),
        ("member_of_domain_topic", Other, SynsetToSynset),
        ("member_of_domain_region", Other, SynsetToSynset),
        ("member_of_domain_usage", Other, SynsetToSynset),
    ]
};

/// Normalizes a relation name as written in data files: trimmed,
/// lowercased, spaces replaced by underscores.
pub fn normalize_relation(name: &str) -> String {
    name.trim().to_lowercase().replace(' ', "_")
}

/// Lookup key for a normalized relation: the part before any `:` suffix,
/// with hyphens folded to underscores.
fn relation_key(normalized: &str) -> String {
    let base = normalized.split(':').next().unwrap_or(normalized);
    base.replace('-', "_")
}

/// Trims and lowercases a node label. Lookups and insertions both go through
/// this, so labels behave as opaque case-insensitive strings.
pub fn normalize_label(label: &str) -> String {
    label.trim().to_lowercase()
}

/// Category for a relation name using the built-in vocabulary.
pub fn relation_category(relation_name: &str) -> Result<RelationCategory> {
    RelationTable::builtin().category(relation_name)
}

/// Maps relation names to categories.
#[derive(Debug, Clone)]
pub struct RelationTable {
    entries: HashMap<String, (RelationCategory, Endpoints)>,
}

impl Default for RelationTable {
    fn default() -> Self {
        Self::builtin()
    }
}

impl RelationTable {
    pub fn builtin() -> Self {
        let entries = BUILTIN_RELATIONS
            .iter()
            .map(|&(name, cat, ends)| (name.to_string(), (cat, ends)))
            .collect();
        RelationTable { entries }
    }

    /// Adds or replaces a relation name. User-supplied relations carry no
    /// endpoint constraint.
    pub fn insert(&mut self, relation_name: &str, category: RelationCategory) {
        let key = relation_key(&normalize_relation(relation_name));
        self.entries.insert(key, (category, Endpoints::Any));
    }

    /// Reads `relation_name<TAB>Category` lines on top of the current table.
    pub fn extend_from_reader(&mut self, reader: impl Read) -> Result<()> {
        for (idx, line) in BufReader::new(reader).lines().enumerate() {
            let lineno = idx + 1;
            let line = line.map_err(|e| Error::parse(lineno, e.to_string()))?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut fields = line.split('\t');
            let (Some(name), Some(cat), None) = (fields.next(), fields.next(), fields.next())
            else {
                return Err(Error::parse(lineno, "expected relation<TAB>category"));
            };
            let category = cat.parse().map_err(|m| Error::parse(lineno, m))?;
            self.insert(name, category);
        }
        Ok(())
    }

    pub fn extend_from_file(&mut self, path: &Path) -> Result<()> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        self.extend_from_reader(file).map_err(|e| e.in_file(path))
    }

    pub fn category(&self, relation_name: &str) -> Result<RelationCategory> {
        self.resolve(relation_name).map(|(c, _)| c)
    }

    pub fn resolve(&self, relation_name: &str) -> Result<(RelationCategory, Endpoints)> {
        let key = relation_key(&normalize_relation(relation_name));
        self.entries
            .get(&key)
            .copied()
            .ok_or_else(|| Error::UnknownRelation {
                name: relation_name.to_string(),
            })
    }

    /// All relation names in the table, sorted.
    pub fn names(&self) -> Vec<&str> {
        let mut names: Vec<&str> = self.entries.keys().map(String::as_str).collect();
        names.sort_unstable();
        names
    }
}

/// Per-category edge costs. Defaults to the standard table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CategoryWeights([u32; 7]);

impl Default for CategoryWeights {
    fn default() -> Self {
        let mut w = [0; 7];
        for c in RelationCategory::ALL {
            w[c.slot()] = c.weight();
        }
        CategoryWeights(w)
    }
}

impl CategoryWeights {
    pub fn get(&self, category: RelationCategory) -> u32 {
        self.0[category.slot()]
    }

    pub fn set(&mut self, category: RelationCategory, weight: u32) -> Result<()> {
        if weight == 0 {
            return Err(Error::InvalidParams(format!(
                "weight for {} must be a positive integer",
                category.name()
            )));
        }
        self.0[category.slot()] = weight;
        Ok(())
    }

    pub fn max(&self) -> u32 {
        self.0.iter().copied().max().unwrap_or(0)
    }

    /// Reads `Category<TAB>weight` lines over the defaults.
    pub fn from_reader(reader: impl Read) -> Result<Self> {
        let mut weights = CategoryWeights::default();
        for (idx, line) in BufReader::new(reader).lines().enumerate() {
            let lineno = idx + 1;
            let line = line.map_err(|e| Error::parse(lineno, e.to_string()))?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut fields = line.split('\t');
            let (Some(cat), Some(w), None) = (fields.next(), fields.next(), fields.next()) else {
                return Err(Error::parse(lineno, "expected category<TAB>weight"));
            };
            let category: RelationCategory = cat.parse().map_err(|m| Error::parse(lineno, m))?;
            let weight: u32 = w.trim().parse().map_err(|_| {
                Error::parse(lineno, format!("weight {w:?} is not a positive integer"))
            })?;
            weights
                .set(category, weight)
                .map_err(|e| e.at_line(lineno))?;
        }
        Ok(weights)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        Self::from_reader(file).map_err(|e| e.in_file(path))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub src: NodeId,
    pub dst: NodeId,
    pub category: RelationCategory,
    pub weight: u32,
    pub relation: String,
    /// Set on the reverse copy of a sense link.
    pub mirror: bool,
}

/// Word and synset nodes with category-weighted directed edges.
///
/// Built by a single writer; once loaded it is only read, and shared
/// references may be queried from any number of threads.
#[derive(Debug, Clone, Default)]
pub struct SemanticNetwork {
    nodes: Vec<Node>,
    edges: Vec<Edge>,
    out_edges: Vec<Vec<u32>>,
    word_index: HashMap<String, NodeId>,
    synset_index: HashMap<String, NodeId>,
    relations: RelationTable,
    weights: CategoryWeights,
}

impl SemanticNetwork {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_tables(relations: RelationTable, weights: CategoryWeights) -> Self {
        SemanticNetwork {
            relations,
            weights,
            ..Self::default()
        }
    }

    pub fn weights(&self) -> &CategoryWeights {
        &self.weights
    }

    pub fn relations(&self) -> &RelationTable {
        &self.relations
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn node(&self, id: NodeId) -> Result<&Node> {
        self.nodes.get(id.index()).ok_or(Error::InvalidNode(id))
    }

    pub fn nodes(&self) -> impl Iterator<Item = (NodeId, &Node)> {
        self.nodes
            .iter()
            .enumerate()
            .map(|(i, n)| (NodeId(i as u32), n))
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    fn index(&self, kind: NodeKind) -> &HashMap<String, NodeId> {
        match kind {
            NodeKind::Word => &self.word_index,
            NodeKind::Synset => &self.synset_index,
        }
    }

    pub fn lookup(&self, kind: NodeKind, label: &str) -> Option<NodeId> {
        self.index(kind).get(&normalize_label(label)).copied()
    }

    pub fn word(&self, label: &str) -> Option<NodeId> {
        self.lookup(NodeKind::Word, label)
    }

    pub fn add_node(&mut self, kind: NodeKind, label: &str) -> Result<NodeId> {
        let label = normalize_label(label);
        if label.is_empty() || label.contains(['\t', '\n', '\r']) {
            return Err(Error::InvalidLabel);
        }
        if let Some(&id) = self.index(kind).get(&label) {
            return Ok(id);
        }
        let id = NodeId(u32::try_from(self.nodes.len()).expect("node count exceeds u32"));
        let index = match kind {
            NodeKind::Word => &mut self.word_index,
            NodeKind::Synset => &mut self.synset_index,
        };
        index.insert(label.clone(), id);
        self.nodes.push(Node { kind, label });
        self.out_edges.push(Vec::new());
        Ok(id)
    }

    /// Adds a directed edge weighted by the relation's category. Sense links
    /// are also added in the reverse direction.
    pub fn add_edge(&mut self, src: NodeId, dst: NodeId, relation_name: &str) -> Result<()> {
        let src_kind = self.node(src)?.kind;
        let dst_kind = self.node(dst)?.kind;
        let (category, endpoints) = self.relations.resolve(relation_name)?;
        if src == dst {
            return Err(Error::SelfLoop(src));
        }
        if !endpoints.admits(src_kind, dst_kind) {
            return Err(Error::EndpointKindMismatch {
                relation: relation_name.to_string(),
                category,
                src: src_kind,
                dst: dst_kind,
            });
        }
        let relation = normalize_relation(relation_name);
        let weight = self.weights.get(category);
        self.push_edge(Edge {
            src,
            dst,
            category,
            weight,
            relation: relation.clone(),
            mirror: false,
        });
        if category == RelationCategory::Sense {
            self.push_edge(Edge {
                src: dst,
                dst: src,
                category,
                weight,
                relation,
                mirror: true,
            });
        }
        Ok(())
    }

    fn push_edge(&mut self, edge: Edge) {
        let idx = u32::try_from(self.edges.len()).expect("edge count exceeds u32");
        self.out_edges[edge.src.index()].push(idx);
        self.edges.push(edge);
    }

    /// Out-edges of `id` in insertion order as (neighbor, weight, relation).
    pub fn neighbors(&self, id: NodeId) -> Result<Vec<(NodeId, u32, &str)>> {
        Ok(self.out_iter(id)?.collect())
    }

    pub(crate) fn out_iter(
        &self,
        id: NodeId,
    ) -> Result<impl Iterator<Item = (NodeId, u32, &str)> + '_> {
        let list = self
            .out_edges
            .get(id.index())
            .ok_or(Error::InvalidNode(id))?;
        Ok(list.iter().map(|&e| {
            let edge = &self.edges[e as usize];
            (edge.dst, edge.weight, edge.relation.as_str())
        }))
    }

    /// Reads an edge file with the built-in vocabulary and weights.
    pub fn load(path: &Path) -> Result<(Self, LoadReport)> {
        Self::load_with(path, RelationTable::builtin(), CategoryWeights::default())
    }

    pub fn load_with(
        path: &Path,
        relations: RelationTable,
        weights: CategoryWeights,
    ) -> Result<(Self, LoadReport)> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let mut net = Self::with_tables(relations, weights);
        net.read_edges(file).map_err(|e| e.in_file(path))?;
        let report = net.load_report();
        Ok((net, report))
    }

    pub fn load_report(&self) -> LoadReport {
        let mut report = LoadReport {
            node_count: self.node_count(),
            edge_count: self.edge_count(),
            ..LoadReport::default()
        };
        if self.node_count() == 0 {
            report.warnings.push("empty network".to_string());
        }
        report
    }

    /// Applies every edge line from `reader`.
    ///
    /// Line format: `src_kind<TAB>src_label<TAB>relation<TAB>dst_kind<TAB>dst_label`
    /// with kinds `W` or `S`. Blank lines and `#` comments are skipped.
    pub fn read_edges(&mut self, reader: impl Read) -> Result<()> {
        for (idx, line) in BufReader::new(reader).lines().enumerate() {
            let lineno = idx + 1;
            let line = line.map_err(|e| Error::parse(lineno, e.to_string()))?;
            let line = line.trim_end_matches(['\r', '\n']);
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            let [sk, sl, rel, dk, dl] = fields[..] else {
                return Err(Error::parse(
                    lineno,
                    format!("expected 5 tab-separated fields, found {}", fields.len()),
                ));
            };
            let kind = |code: &str| {
                NodeKind::from_code(code.trim()).ok_or_else(|| {
                    Error::parse(lineno, format!("node kind must be W or S, found {code:?}"))
                })
            };
            let (src_kind, dst_kind) = (kind(sk)?, kind(dk)?);
            // Resolve first so an unknown relation leaves no dangling nodes.
            self.relations.resolve(rel).map_err(|e| e.at_line(lineno))?;
            let src = self.add_node(src_kind, sl).map_err(|e| e.at_line(lineno))?;
            let dst = self.add_node(dst_kind, dl).map_err(|e| e.at_line(lineno))?;
            self.add_edge(src, dst, rel)
                .map_err(|e| e.at_line(lineno))?;
        }
        Ok(())
    }

    /// Writes the network as an edge file. Mirrored sense links are implied
    /// by their primary edge and are not written.
    pub fn write_edges(&self, writer: impl Write) -> std::io::Result<()> {
        let mut w = BufWriter::new(writer);
        for edge in self.edges.iter().filter(|e| !e.mirror) {
            let s = &self.nodes[edge.src.index()];
            let d = &self.nodes[edge.dst.index()];
            writeln!(
                w,
                "{}\t{}\t{}\t{}\t{}",
                s.kind.code(),
                s.label,
                edge.relation,
                d.kind.code(),
                d.label
            )?;
        }
        w.flush()
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_edges(file).map_err(|e| Error::io(path, e))
    }
}
