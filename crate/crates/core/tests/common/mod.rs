//! Independent reference implementations shared by the integration tests.
#![allow(dead_code)]

use std::collections::HashMap;
use std::path::PathBuf;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use semrel::netstore::{NodeKind, SemanticNetwork};
use semrel::pathrel::RelatednessParams;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
}

const SYNSET_RELATIONS: &[&str] = &["similar_to", "hypernym", "meronym", "hyponym", "also_see"];

/// Random network of 2..=`max_nodes` nodes with edges drawn from every
/// category. Returns the network and its word labels.
pub fn random_network(seed: u64, max_nodes: usize) -> (SemanticNetwork, Vec<String>) {
    let mut rng = StdRng::seed_from_u64(seed);
    let n = rng.random_range(2..=max_nodes);
    let mut net = SemanticNetwork::new();
    let mut ids = Vec::new();
    let mut words = Vec::new();
    for i in 0..n {
        // at least two words so there is always a pair to query
        let kind = if i < 2 || rng.random_bool(0.5) {
            NodeKind::Word
        } else {
            NodeKind::Synset
        };
        let label = format!("n{i}");
        if kind == NodeKind::Word {
            words.push(label.clone());
        }
        ids.push((net.add_node(kind, &label).unwrap(), kind));
    }
    let m = rng.random_range(0..=3 * n);
    for _ in 0..m {
        let a = rng.random_range(0..n);
        let b = rng.random_range(0..n);
        if a == b {
            continue;
        }
        let ((src, sk), (dst, dk)) = (ids[a], ids[b]);
        let rel = random_relation(&mut rng, sk, dk);
        net.add_edge(src, dst, rel).unwrap();
    }
    (net, words)
}

fn random_relation(rng: &mut StdRng, src: NodeKind, dst: NodeKind) -> &'static str {
    use NodeKind::*;
    match (src, dst) {
        (Word, Synset) => ["lemma-synset", "inverse_predicate"][rng.random_range(0..2)],
        (Synset, Word) => ["lemma-synset", "predicate:of"][rng.random_range(0..2)],
        (Synset, Synset) => SYNSET_RELATIONS[rng.random_range(0..SYNSET_RELATIONS.len())],
        (Word, Word) => "derivationally_related",
    }
}

/// Exhaustive search over all simple paths no more expensive than the cap.
/// Returns `(cost, capped)` under the same-word and cap conventions.
pub fn brute_force_cost(
    net: &SemanticNetwork,
    src: &str,
    dst: &str,
    params: &RelatednessParams,
) -> (u32, bool) {
    let s = net.word(src).expect("source word");
    let t = net.word(dst).expect("target word");
    if s == t {
        return (params.min_path_cost, false);
    }
    let mut adj: Vec<Vec<(usize, u32)>> = vec![Vec::new(); net.node_count()];
    for e in net.edges() {
        adj[e.src.index()].push((e.dst.index(), e.weight));
    }
    let mut best = None;
    let mut visited = vec![false; net.node_count()];
    visited[s.index()] = true;
    dfs(
        &adj,
        s.index(),
        t.index(),
        0,
        params.max_path_cost,
        &mut visited,
        &mut best,
    );
    match best {
        Some(c) => (c, false),
        None => (params.max_path_cost, true),
    }
}

fn dfs(
    adj: &[Vec<(usize, u32)>],
    at: usize,
    target: usize,
    cost: u32,
    cap: u32,
    visited: &mut [bool],
    best: &mut Option<u32>,
) {
    if at == target {
        *best = Some(best.map_or(cost, |b: u32| b.min(cost)));
        return;
    }
    for &(next, w) in &adj[at] {
        let c = cost + w;
        if c > cap || visited[next] {
            continue;
        }
        visited[next] = true;
        dfs(adj, next, target, c, cap, visited, best);
        visited[next] = false;
    }
}

/// Symmetric-window pair counts straight from token positions.
pub struct NaiveCounts {
    pub pairs: HashMap<(String, String), u64>,
    pub rows: HashMap<String, u64>,
    pub cols: HashMap<String, u64>,
    pub total: u64,
}

pub fn naive_counts(sentences: &[Vec<String>], window: usize) -> NaiveCounts {
    let mut pairs = HashMap::new();
    for s in sentences {
        for i in 0..s.len() {
            for j in 0..s.len() {
                if i != j && i.abs_diff(j) <= window {
                    *pairs.entry((s[i].clone(), s[j].clone())).or_insert(0) += 1;
                }
            }
        }
    }
    let mut rows = HashMap::new();
    let mut cols = HashMap::new();
    let mut total = 0;
    for ((t, c), n) in &pairs {
        *rows.entry(t.clone()).or_insert(0) += n;
        *cols.entry(c.clone()).or_insert(0) += n;
        total += n;
    }
    NaiveCounts {
        pairs,
        rows,
        cols,
        total,
    }
}

/// PMI of every attested context of `word`, with no truncation. Entries
/// whose ratio is exactly one are left out.
pub fn naive_pmi(c: &NaiveCounts, word: &str) -> HashMap<String, f64> {
    c.pairs
        .iter()
        .filter(|((t, _), _)| t == word)
        .filter_map(|((_, ctx), &n)| {
            let num = n * c.total;
            let den = c.rows[word] * c.cols[ctx];
            (num != den).then(|| (ctx.clone(), (num as f64 / den as f64).ln() / 2f64.ln()))
        })
        .collect()
}

/// Direct reading of the run-3 decision.
pub fn run3_predicate(sn: f64, ds: f64) -> bool {
    sn > 0.61 || ds > 0.40 || (sn > 0.53 && ds > 0.31)
}
