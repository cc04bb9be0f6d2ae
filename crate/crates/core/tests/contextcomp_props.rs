use proptest::prelude::*;
use semrel::contextcomp::{
    self, CollocationSet, ContextFeatures, ContextInstance, Side, Stopwords,
};
use semrel::ruleset::RuleSet;

fn instance() -> impl Strategy<Value = ContextInstance> {
    let word = prop::sample::select(vec![
        "the", "of", "look", "at", "hall", "one", "big", "picture",
    ]);
    (
        prop::collection::vec(word, 2..10),
        any::<usize>(),
        1usize..3,
    )
        .prop_map(|(toks, at, len)| {
            let len = len.min(toks.len());
            let start = at % (toks.len() - len + 1);
            let phrase = toks[start..start + len].join(" ");
            ContextInstance::new(&phrase, &toks.join(" "), (start, start + len), None).unwrap()
        })
}

fn set() -> impl Strategy<Value = CollocationSet> {
    let expr = prop::sample::select(vec!["the", "at the", "look at the", "of", "one", "hall of"]);
    (
        prop::collection::vec(expr.clone(), 0..4),
        prop::collection::vec(expr, 0..4),
    )
        .prop_map(|(b, a)| {
            let list = |v: Vec<&str>| {
                let mut out: Vec<(String, u64)> = Vec::new();
                for e in v {
                    if !out.iter().any(|(x, _)| x == e) {
                        out.push((e.to_string(), 1));
                    }
                }
                out
            };
            CollocationSet {
                phrase: String::new(),
                before: list(b),
                after: list(a),
            }
        })
}

proptest! {
    #[test]
    fn fc_is_monotone_in_the_set(inst in instance(), small in set(), extra in set()) {
        let mut big = small.clone();
        for (e, n) in extra.before {
            if !big.contains(Side::Before, &e) { big.before.push((e, n)); }
        }
        for (e, n) in extra.after {
            if !big.contains(Side::After, &e) { big.after.push((e, n)); }
        }
        prop_assert!(contextcomp::fc_feature(&inst, &big) >= contextcomp::fc_feature(&inst, &small));
    }

    #[test]
    fn content_word_is_outside_span_and_not_a_stopword(inst in instance()) {
        let stop = Stopwords::bundled();
        for side in [Side::Before, Side::After] {
            if let Some(w) = contextcomp::content_word(&inst.sentence, inst.span, side, &stop) {
                prop_assert!(!stop.contains(w));
                let pos = inst.sentence.iter().position(|t| std::ptr::eq(t.as_str(), w)).unwrap();
                prop_assert!(pos < inst.span.0 || pos >= inst.span.1);
            }
        }
    }

    #[test]
    fn frequent_collocation_means_figurative(srb in 0.0f64..=1.0, sra in 0.0f64..=1.0) {
        let f = ContextFeatures { fc: 1, srb, sra };
        let rules = contextcomp::context_rules();
        prop_assert_eq!(rules.apply(&f), contextcomp::FIGURATIVE);
    }
}

#[test]
fn context_rules_round_trip_through_text() {
    let rs = contextcomp::context_rules();
    assert_eq!(rs.to_string().parse::<RuleSet>().unwrap(), rs);
}

#[test]
fn collocation_sets_round_trip() {
    let sentences = vec![
        "we look at the big picture now"
            .split(' ')
            .map(String::from)
            .collect::<Vec<_>>(),
        "look at the big picture"
            .split(' ')
            .map(String::from)
            .collect(),
    ];
    let set = contextcomp::build_collocation_set(&sentences, "big picture", 1000);
    assert!(set.contains(Side::Before, "look at the"));
    let mut buf = Vec::new();
    set.write(&mut buf).unwrap();
    let back = contextcomp::read_collocation_sets(buf.as_slice()).unwrap();
    assert_eq!(back, vec![set]);
}
