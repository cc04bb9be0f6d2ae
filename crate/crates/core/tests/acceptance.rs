//! Acceptance suite: one PASS/FAIL line per criterion.

mod common;

use std::collections::BTreeMap;
use std::panic::{self, AssertUnwindSafe};
use std::path::Path;
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use common::{brute_force_cost, fixture, naive_counts, naive_pmi, random_network, run3_predicate};
use semrel::contextcomp::{self, ContextPipeline};
use semrel::distsim::{self, CollocationCounts};
use semrel::pathrel::{self, RelatednessParams};
use semrel::ruleset::{self, Comparator, Confusion, FeatureVector, Label};
use semrel::SemanticNetwork;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    ensure(elapsed < limit, || {
        format!("took {elapsed:?}, limit {limit:?}")
    })
}

fn fixture_net(name: &str) -> SemanticNetwork {
    SemanticNetwork::load(&fixture(name)).unwrap().0
}

fn semrel_cmd(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_semrel"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("run semrel")
}

fn worked_example() -> Outcome {
    let t = Instant::now();
    let net = fixture_net("interview.edges");
    let params = RelatednessParams::default();
    let score =
        pathrel::word_phrase_relatedness(&net, "Interview", &["Formal", "Meeting"], &params)
            .map_err(|e| e.to_string())?;
    within(t.elapsed(), Duration::from_secs(1))?;
    ensure(score.per_word_costs == [12, 20], || {
        format!("costs {:?}", score.per_word_costs)
    })?;
    ensure((score.value - 0.6667).abs() <= 1e-4, || {
        format!("value {}", score.value)
    })?;
    Ok(format!("value {:.4}", score.value))
}

fn identity_and_saturation() -> Outcome {
    let mut net = fixture_net("interview.edges");
    let params = RelatednessParams::default();
    let same = pathrel::word_phrase_relatedness(&net, "formal", &["formal"], &params).unwrap();
    ensure(same.value == 1.0, || {
        format!("same word gave {}", same.value)
    })?;
    for w in ["isle1", "isle2", "isle3"] {
        net.add_node(semrel::NodeKind::Word, w).unwrap();
    }
    let islands = ["isle1", "isle2", "isle3"];
    for n in 1..=3 {
        let s =
            pathrel::word_phrase_relatedness(&net, "interview", &islands[..n], &params).unwrap();
        ensure(s.value == 1.0 / 3.0, || format!("n={n} gave {}", s.value))?;
    }
    Ok("1.0 and 1/3 for n=1..3".into())
}

fn dijkstra_oracle() -> Outcome {
    let t = Instant::now();
    let params = RelatednessParams::default();
    let mut pairs = 0;
    for seed in 0..200 {
        let (net, words) = random_network(seed, 12);
        for a in &words {
            for b in &words {
                let got = pathrel::shortest_path_cost(&net, a, b, &params).unwrap();
                let want = brute_force_cost(&net, a, b, &params);
                ensure((got.cost, got.capped) == want, || {
                    format!(
                        "seed {seed} {a}->{b}: got {:?}, oracle {want:?}",
                        (got.cost, got.capped)
                    )
                })?;
                let hop_sum: u32 = got.hops.iter().map(|h| h.weight).sum();
                ensure(got.hops.is_empty() || hop_sum == got.cost, || {
                    format!(
                        "seed {seed} {a}->{b}: hop weights {hop_sum} != cost {}",
                        got.cost
                    )
                })?;
                pairs += 1;
            }
        }
    }
    within(t.elapsed(), Duration::from_secs(30))?;
    Ok(format!("200 networks, {pairs} pairs"))
}

fn pmi_oracle() -> Outcome {
    let sentences = distsim::read_sentences_file(&fixture("corpus.txt")).unwrap();
    let tokens: usize = sentences.iter().map(Vec::len).sum();
    ensure(tokens <= 50, || format!("corpus has {tokens} tokens"))?;
    let window = distsim::DEFAULT_WINDOW;
    let counts = CollocationCounts::from_sentences(&sentences, window);
    let naive = naive_counts(&sentences, window);
    let mut checked = 0;
    for word in naive.rows.keys() {
        let got = distsim::pmi_vector(&counts, word, distsim::DEFAULT_TOP_K);
        let want = naive_pmi(&naive, word);
        ensure(got.len() == want.len(), || {
            format!("{word}: {} entries, oracle {}", got.len(), want.len())
        })?;
        for (ctx, v) in &want {
            let g = got.entries.get(ctx).copied().unwrap_or(f64::NAN);
            ensure((g - v).abs() <= 1e-9, || {
                format!("pmi({word},{ctx}) = {g}, oracle {v}")
            })?;
            checked += 1;
        }
        if !got.is_empty() {
            let c = distsim::cosine(&got, &got);
            ensure((c - 1.0).abs() <= 1e-12, || {
                format!("self-cosine of {word} = {c}")
            })?;
        }
    }
    for shard in 1..=sentences.len() {
        let merged = CollocationCounts::from_sentences_parallel(&sentences, window, shard);
        ensure(merged == counts, || format!("shard size {shard} differs"))?;
    }
    Ok(format!("{checked} entries over {tokens} tokens"))
}

fn rule_fidelity() -> Outcome {
    let rules = ruleset::run3_rules();
    let mut points = Vec::new();
    // even grid over the unit square
    for i in 0..40 {
        for j in 0..25 {
            points.push((i as f64 / 39.0, j as f64 / 24.0));
        }
    }
    // hundredths around every threshold, so boundary values are hit exactly
    for i in 30..70 {
        for j in 20..45 {
            points.push((i as f64 / 100.0, j as f64 / 100.0));
        }
    }
    for &(sn, ds) in &points {
        let got = rules.apply(&FeatureVector::new(Some(sn), ds)) == ruleset::POSITIVE;
        ensure(got == run3_predicate(sn, ds), || {
            format!("disagree at sn={sn} ds={ds}")
        })?;
    }
    Ok(format!("{} grid points", points.len()))
}

fn learner_recovery() -> Outcome {
    let one_d: Vec<_> = (0..=200)
        .map(|i| {
            let sn = i as f64 / 200.0;
            let label = if sn > 0.61 {
                Label::Positive
            } else {
                Label::Negative
            };
            (BTreeMap::from([("sn".to_string(), sn)]), label)
        })
        .collect();
    let rs = ruleset::learn_threshold_rules(&one_d, &["sn"], 10).map_err(|e| e.to_string())?;
    let first = rs.rules.first().ok_or("no rules learned")?;
    let cond = &first.conditions[0];
    ensure(
        cond.comparator == Comparator::Gt && (cond.threshold - 0.61).abs() <= 0.02,
        || format!("learned {cond}"),
    )?;

    let mut grid = Vec::new();
    for i in 0..=50 {
        for j in 0..=50 {
            let (sn, ds) = (i as f64 / 50.0, j as f64 / 50.0);
            let label = if run3_predicate(sn, ds) {
                Label::Positive
            } else {
                Label::Negative
            };
            grid.push((FeatureVector::new(Some(sn), ds), label));
        }
    }
    let rs = ruleset::learn_threshold_rules(&grid, &FeatureVector::NAMES, 20)
        .map_err(|e| e.to_string())?;
    let acc = ruleset::evaluate(&rs, &grid).accuracy();
    ensure(acc == 1.0, || format!("training accuracy {acc}"))?;
    Ok(format!(
        "threshold {}, {} rules at 100%",
        cond.threshold,
        rs.rules.len()
    ))
}

fn metrics_arithmetic() -> Outcome {
    let m = Confusion {
        tp: 2,
        fp: 1,
        tn: 3,
        fn_: 2,
    }
    .metrics();
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-4;
    ensure(
        close(m.precision, 0.6667) && close(m.recall, 0.5) && close(m.f_measure, 0.5714),
        || format!("{m:?}"),
    )?;
    // same confusion reached through the evaluator
    let rows = [
        (0.9, Label::Positive),
        (0.8, Label::Positive),
        (0.7, Label::Negative),
    ]
    .into_iter()
    .chain([(0.1, Label::Negative); 3])
    .chain([(0.2, Label::Positive); 2])
    .map(|(sn, l)| (FeatureVector::new(Some(sn), 0.0), l))
    .collect::<Vec<_>>();
    let e = ruleset::evaluate(&ruleset::run1_rules(), &rows);
    ensure(e.confusion == m.confusion, || {
        format!("evaluator gave {:?}", e.confusion)
    })?;
    Ok(format!(
        "P={:.4} R={:.4} F={:.4}",
        m.precision, m.recall, m.f_measure
    ))
}

fn context_pipeline() -> Outcome {
    let net = fixture_net("context.edges");
    let instances = contextcomp::read_context_dataset_file(&fixture("context.tsv")).unwrap();
    ensure(instances.len() == 12, || {
        format!("{} instances", instances.len())
    })?;
    let mut pipeline = ContextPipeline::new(&net, RelatednessParams::default());
    for set in contextcomp::read_collocation_sets_file(&fixture("context.colloc")).unwrap() {
        pipeline.add_set(set);
    }
    let preds = pipeline.classify_all(&instances).unwrap();
    // every branch of the rule list must be exercised
    let (mut fc1, mut srb, mut sra, mut default) = (0, 0, 0, 0);
    for p in &preds {
        let f = p.features;
        match (f.fc, f.srb < 0.75, f.sra < 0.75) {
            (1, _, _) => fc1 += 1,
            (_, true, _) => srb += 1,
            (_, false, true) => sra += 1,
            _ => default += 1,
        }
    }
    ensure(fc1 > 0 && srb > 0 && sra > 0 && default > 0, || {
        format!("branches fc1={fc1} srb={srb} sra={sra} default={default}")
    })?;
    let acc = contextcomp::accuracy(&instances, &preds).unwrap();
    ensure(acc == 1.0, || format!("library accuracy {acc}"))?;

    let dir = fixture("");
    let t = Instant::now();
    let out = semrel_cmd(
        &[
            "context",
            "--dataset",
            "context.tsv",
            "--net",
            "context.edges",
            "--collocations",
            "context.colloc",
        ],
        &dir,
    );
    within(t.elapsed(), Duration::from_secs(5))?;
    let stdout = String::from_utf8_lossy(&out.stdout);
    ensure(out.status.success(), || {
        String::from_utf8_lossy(&out.stderr).into_owned()
    })?;
    ensure(stdout.contains("# accuracy\t1.0000"), || {
        format!("cli output:\n{stdout}")
    })?;
    Ok(format!("12/12, branches {fc1}/{srb}/{sra}/{default}"))
}

fn smoke_run(dir: &Path) -> Result<Vec<u8>, String> {
    let edges = fixture("interview.edges");
    let corpus = fixture("corpus.txt");
    let pairs = fixture("pairs.tsv");
    let steps: [Vec<&str>; 3] = [
        vec!["build-net", edges.to_str().unwrap(), "net.edges"],
        vec!["dist-build", corpus.to_str().unwrap(), "counts.tsv"],
        vec![
            "classify",
            "--dataset",
            pairs.to_str().unwrap(),
            "--mode",
            "run3",
            "--net",
            "net.edges",
            "--counts",
            "counts.tsv",
        ],
    ];
    let mut transcript = Vec::new();
    for args in &steps {
        let out = semrel_cmd(args, dir);
        if !out.status.success() {
            return Err(format!(
                "{args:?}: {}",
                String::from_utf8_lossy(&out.stderr)
            ));
        }
        transcript.extend(out.stdout);
    }
    for file in ["net.edges", "counts.tsv"] {
        transcript.extend(std::fs::read(dir.join(file)).map_err(|e| e.to_string())?);
    }
    Ok(transcript)
}

fn end_to_end_smoke() -> Outcome {
    let t = Instant::now();
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let first = smoke_run(a.path())?;
    let second = smoke_run(b.path())?;
    within(t.elapsed(), Duration::from_secs(10))?;
    ensure(first == second, || "outputs differ between runs".into())?;
    let text = String::from_utf8_lossy(&first);
    ensure(text.contains("interview\tformal meeting\t0.6667"), || {
        format!("unexpected output:\n{text}")
    })?;
    Ok(format!(
        "{} identical bytes in {:?}",
        first.len(),
        t.elapsed()
    ))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("worked example relatedness", worked_example),
        ("identity and saturation", identity_and_saturation),
        ("shortest paths match brute force", dijkstra_oracle),
        ("PMI matches brute force", pmi_oracle),
        ("run-3 rules match the predicate", rule_fidelity),
        ("learner recovers thresholds", learner_recovery),
        ("metrics arithmetic", metrics_arithmetic),
        ("context pipeline", context_pipeline),
        ("end-to-end smoke", end_to_end_smoke),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let result = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match result {
            Ok(detail) => println!("PASS {} {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {} {name}: {why}", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
