//! Word-to-phrase relatedness from capped weighted shortest paths.
//!
//! The relatedness of a word to an `n`-word phrase sums the shortest path
//! cost from the word to each phrase word, with every per-word cost held in
//! `[min_path_cost, max_path_cost]`, and normalizes it:
//!
//! ```text
//! value = (M·n − (S − m·n)) / (M·n)
//! ```
//!
//! A phrase whose words are all unreachable scores `1/3` under the default
//! costs (M = 24, m = 8), and a phrase made of the word itself scores 1.

use std::cmp::Reverse;
use std::collections::hash_map::Entry;
use std::collections::{BinaryHeap, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::netstore::{CategoryWeights, NodeId, RelationCategory, SemanticNetwork};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelatednessParams {
    /// Cost beyond which two words are taken as unrelated.
    pub max_path_cost: u32,
    /// Cost of going from a word to itself.
    pub min_path_cost: u32,
    pub max_edge_weight: u32,
    pub sense_weight: u32,
}

impl Default for RelatednessParams {
    fn default() -> Self {
        Self::from_weights(&CategoryWeights::default())
    }
}

impl RelatednessParams {
    /// Twice the heaviest edge for the cap, twice the sense link for the floor.
    pub fn from_weights(weights: &CategoryWeights) -> Self {
        let max_edge_weight = weights.max();
        let sense_weight = weights.get(RelationCategory::Sense);
        RelatednessParams {
            max_path_cost: 2 * max_edge_weight,
            min_path_cost: 2 * sense_weight,
            max_edge_weight,
            sense_weight,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.min_path_cost == 0 || self.max_path_cost <= self.min_path_cost {
            return Err(Error::InvalidParams(format!(
                "need max_path_cost > min_path_cost > 0 (got {} and {})",
                self.max_path_cost, self.min_path_cost
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Hop {
    pub node: NodeId,
    /// Relation used to reach `node`; empty for the source.
    pub relation: String,
    pub weight: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PathResult {
    pub cost: u32,
    /// Source to target. Empty for the same-word convention and for capped
    /// results.
    pub hops: Vec<Hop>,
    pub capped: bool,
}

impl PathResult {
    /// One `label --relation(weight)--> label` line per traversed edge.
    pub fn explain(&self, net: &SemanticNetwork) -> Vec<String> {
        let label = |id: NodeId| net.node(id).map(|n| n.label.as_str()).unwrap_or("?");
        self.hops
            .windows(2)
            .map(|pair| {
                format!(
                    "{} --{}({})--> {}",
                    label(pair[0].node),
                    pair[1].relation,
                    pair[1].weight,
                    label(pair[1].node)
                )
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RelatednessScore {
    pub value: f64,
    pub per_word_costs: Vec<u32>,
}

fn resolve_word(net: &SemanticNetwork, label: &str) -> Result<NodeId> {
    net.word(label)
        .ok_or_else(|| Error::WordNotInNetwork(label.trim().to_string()))
}

/// (cost, hop count), compared lexicographically.
type Key = (u32, u32);

/// Least-cost directed path between two words, searching no further than
/// `max_path_cost`.
///
/// Among equal-cost paths the one with the fewest hops wins, then the one
/// whose node labels are lexicographically smallest from the source onward.
pub fn shortest_path_cost(
    net: &SemanticNetwork,
    source_word: &str,
    target_word: &str,
    params: &RelatednessParams,
) -> Result<PathResult> {
    let source = resolve_word(net, source_word)?;
    let target = resolve_word(net, target_word)?;
    if source == target {
        return Ok(PathResult {
            cost: params.min_path_cost,
            hops: Vec::new(),
            capped: false,
        });
    }

    let cap = params.max_path_cost;
    let mut tentative: HashMap<NodeId, Key> = HashMap::new();
    let mut settled: HashMap<NodeId, Key> = HashMap::new();
    let mut heap = BinaryHeap::new();
    tentative.insert(source, (0, 0));
    heap.push(Reverse((0u32, 0u32, source)));

    while let Some(Reverse((cost, hops, node))) = heap.pop() {
        if settled.contains_key(&node) {
            continue;
        }
        settled.insert(node, (cost, hops));
        if node == target {
            break;
        }
        for (next, weight, _) in net.out_iter(node)? {
            let next_cost = cost + weight;
            if next_cost > cap || settled.contains_key(&next) {
                continue;
            }
            let key = (next_cost, hops + 1);
            match tentative.entry(next) {
                Entry::Occupied(e) if *e.get() <= key => continue,
                Entry::Occupied(mut e) => {
                    e.insert(key);
                }
                Entry::Vacant(e) => {
                    e.insert(key);
                }
            }
            heap.push(Reverse((key.0, key.1, next)));
        }
    }

    let Some(&(cost, _)) = settled.get(&target) else {
        return Ok(PathResult {
            cost: cap,
            hops: Vec::new(),
            capped: true,
        });
    };

    let hops = trace_path(net, source, target, &settled)?;
    Ok(PathResult {
        cost,
        hops,
        capped: false,
    })
}

fn tight(from: Key, weight: u32, to: Key) -> bool {
    (from.0 + weight, from.1 + 1) == to
}

/// Walks the optimal-edge DAG from source to target, choosing the smallest
/// label at each step. All optimal paths have the same hop count, so the
/// greedy choice yields the lexicographically smallest label sequence.
fn trace_path(
    net: &SemanticNetwork,
    source: NodeId,
    target: NodeId,
    settled: &HashMap<NodeId, Key>,
) -> Result<Vec<Hop>> {
    let mut preds: HashMap<NodeId, Vec<NodeId>> = HashMap::new();
    for (&u, &du) in settled {
        for (v, w, _) in net.out_iter(u)? {
            if let Some(&dv) = settled.get(&v) {
                if tight(du, w, dv) {
                    preds.entry(v).or_default().push(u);
                }
            }
        }
    }
    let mut on_path = HashSet::from([target]);
    let mut stack = vec![target];
    while let Some(v) = stack.pop() {
        for &u in preds.get(&v).into_iter().flatten() {
            if on_path.insert(u) {
                stack.push(u);
            }
        }
    }

    let mut hops = vec![Hop {
        node: source,
        relation: String::new(),
        weight: 0,
    }];
    let mut current = source;
    while current != target {
        let du = settled[&current];
        let mut best: Option<(&str, NodeId, &str, u32)> = None;
        for (v, w, rel) in net.out_iter(current)? {
            if !on_path.contains(&v) || !tight(du, w, settled[&v]) {
                continue;
            }
            let node = net.node(v)?;
            let cand = (node.label.as_str(), v, rel, w);
            let better = match best {
                None => true,
                Some(b) => {
                    let bn = net.node(b.1)?;
                    (cand.0, node.kind, cand.1, cand.2) < (b.0, bn.kind, b.1, b.2)
                }
            };
            if better {
                best = Some(cand);
            }
        }
        let (_, v, rel, w) = best.expect("optimal path must continue towards the target");
        hops.push(Hop {
            node: v,
            relation: rel.to_string(),
            weight: w,
        });
        current = v;
    }
    Ok(hops)
}

/// Normalized relatedness for the given per-word path costs.
pub fn relatedness_value(per_word_costs: &[u32], params: &RelatednessParams) -> f64 {
    let n = per_word_costs.len() as f64;
    let max = f64::from(params.max_path_cost) * n;
    let min = f64::from(params.min_path_cost) * n;
    let sum: f64 = per_word_costs.iter().map(|&c| f64::from(c)).sum();
    ((max - (sum - min)) / max).clamp(0.0, 1.0)
}

/// Relatedness of `word` to a multiword `phrase`, one independent capped
/// path per phrase word.
pub fn word_phrase_relatedness<S: AsRef<str>>(
    net: &SemanticNetwork,
    word: &str,
    phrase: &[S],
    params: &RelatednessParams,
) -> Result<RelatednessScore> {
    if phrase.is_empty() {
        return Err(Error::EmptyPhrase);
    }
    resolve_word(net, word)?;
    let per_word_costs = phrase
        .iter()
        .map(|target| {
            shortest_path_cost(net, word, target.as_ref(), params)
                .map(|p| p.cost.clamp(params.min_path_cost, params.max_path_cost))
        })
        .collect::<Result<Vec<u32>>>()?;
    Ok(RelatednessScore {
        value: relatedness_value(&per_word_costs, params),
        per_word_costs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netstore::NodeKind;

    fn fig2() -> SemanticNetwork {
        let mut net = SemanticNetwork::new();
        net.read_edges(include_str!("../fixtures/interview.edges").as_bytes())
            .unwrap();
        net
    }

    #[test]
    fn default_params() {
        let p = RelatednessParams::default();
        assert_eq!(p.max_path_cost, 24);
        assert_eq!(p.min_path_cost, 8);
        assert_eq!(p.max_edge_weight, 12);
        assert_eq!(p.sense_weight, 4);
        p.validate().unwrap();
        let bad = RelatednessParams {
            max_path_cost: 8,
            ..p
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn worked_example_paths() {
        let net = fig2();
        let p = RelatednessParams::default();
        let formal = shortest_path_cost(&net, "Interview", "Formal", &p).unwrap();
        assert_eq!(formal.cost, 12);
        assert!(!formal.capped);
        assert_eq!(
            formal.explain(&net),
            vec![
                "interview --lemma-synset(4)--> #107210735",
                "#107210735 --hypernym(2)--> examination",
                "examination --predicate:is(6)--> formal",
            ]
        );
        let meeting = shortest_path_cost(&net, "Interview", "Meeting", &p).unwrap();
        assert_eq!(meeting.cost, 20);
        assert_eq!(meeting.hops.len(), 5);
    }

    #[test]
    fn worked_example_score() {
        let net = fig2();
        let s = word_phrase_relatedness(
            &net,
            "Interview",
            &["Formal", "Meeting"],
            &RelatednessParams::default(),
        )
        .unwrap();
        assert_eq!(s.per_word_costs, vec![12, 20]);
        assert!((s.value - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn same_word_convention() {
        let net = fig2();
        let p = RelatednessParams::default();
        let r = shortest_path_cost(&net, "interview", "INTERVIEW", &p).unwrap();
        assert_eq!(r.cost, 8);
        assert!(!r.capped);
        assert!(r.hops.is_empty());
        let s = word_phrase_relatedness(&net, "formal", &["formal"], &p).unwrap();
        assert_eq!(s.value, 1.0);
    }

    #[test]
    fn unreachable_words_saturate() {
        let mut net = SemanticNetwork::new();
        for w in ["a", "b", "c", "d"] {
            net.add_node(NodeKind::Word, w).unwrap();
        }
        let p = RelatednessParams::default();
        let r = shortest_path_cost(&net, "a", "b", &p).unwrap();
        assert_eq!((r.cost, r.capped), (24, true));
        let s = word_phrase_relatedness(&net, "a", &["b", "c", "d"], &p).unwrap();
        assert_eq!(s.per_word_costs, vec![24, 24, 24]);
        assert_eq!(s.value, 1.0 / 3.0);
    }

    #[test]
    fn path_of_exactly_cap_is_not_capped() {
        let mut net = SemanticNetwork::new();
        let a = net.add_node(NodeKind::Word, "a").unwrap();
        let b = net.add_node(NodeKind::Word, "b").unwrap();
        let s = net.add_node(NodeKind::Synset, "s").unwrap();
        let t = net.add_node(NodeKind::Synset, "t").unwrap();
        net.add_edge(a, s, "lemma-synset").unwrap();
        net.add_edge(s, t, "hyponym").unwrap();
        net.add_edge(t, b, "predicate").unwrap();
        // 4 + 10 + 6 = 20
        let p = RelatednessParams::default();
        assert_eq!(shortest_path_cost(&net, "a", "b", &p).unwrap().cost, 20);
        let tight_cap = RelatednessParams {
            max_path_cost: 20,
            ..p
        };
        let r = shortest_path_cost(&net, "a", "b", &tight_cap).unwrap();
        assert_eq!((r.cost, r.capped), (20, false));
        let tighter = RelatednessParams {
            max_path_cost: 19,
            ..p
        };
        let r = shortest_path_cost(&net, "a", "b", &tighter).unwrap();
        assert_eq!((r.cost, r.capped), (19, true));
    }

    #[test]
    fn errors() {
        let net = fig2();
        let p = RelatednessParams::default();
        match shortest_path_cost(&net, "interview", "zebra", &p) {
            Err(Error::WordNotInNetwork(w)) => assert_eq!(w, "zebra"),
            other => panic!("{other:?}"),
        }
        match word_phrase_relatedness(&net, "interview", &["formal", "zebra"], &p) {
            Err(Error::WordNotInNetwork(w)) => assert_eq!(w, "zebra"),
            other => panic!("{other:?}"),
        }
        let empty: [&str; 0] = [];
        assert!(matches!(
            word_phrase_relatedness(&net, "interview", &empty, &p),
            Err(Error::EmptyPhrase)
        ));
        // synset labels are not words
        assert!(shortest_path_cost(&net, "examination", "formal", &p).is_err());
    }

    #[test]
    fn ties_prefer_fewer_hops_then_smaller_labels() {
        let mut net = SemanticNetwork::new();
        let w = net.add_node(NodeKind::Word, "w").unwrap();
        let x = net.add_node(NodeKind::Word, "x").unwrap();
        let s1 = net.add_node(NodeKind::Synset, "zz").unwrap();
        let s2 = net.add_node(NodeKind::Synset, "aa").unwrap();
        let s3 = net.add_node(NodeKind::Synset, "mid").unwrap();
        net.add_edge(w, s1, "lemma-synset").unwrap();
        net.add_edge(w, s2, "lemma-synset").unwrap();
        net.add_edge(s1, x, "predicate").unwrap();
        net.add_edge(s2, x, "predicate").unwrap();
        net.add_edge(s1, s3, "hypernym").unwrap();
        let r = shortest_path_cost(&net, "w", "x", &RelatednessParams::default()).unwrap();
        assert_eq!(r.cost, 10);
        assert_eq!(r.hops[1].node, s2);
    }

    #[test]
    fn clamps_costs_below_floor() {
        let mut net = SemanticNetwork::new();
        let a = net.add_node(NodeKind::Word, "a").unwrap();
        let b = net.add_node(NodeKind::Word, "b").unwrap();
        net.add_edge(a, b, "derivationally_related").unwrap();
        let p = RelatednessParams::default();
        assert_eq!(shortest_path_cost(&net, "a", "b", &p).unwrap().cost, 2);
        let s = word_phrase_relatedness(&net, "a", &["b"], &p).unwrap();
        assert_eq!(s.per_word_costs, vec![8]);
        assert_eq!(s.value, 1.0);
    }
}
