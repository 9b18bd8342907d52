//! Acceptance run: one PASS/FAIL line per criterion. Exits non-zero when any
//! criterion fails.

use std::collections::{BTreeSet, VecDeque};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use fscale::experiments::{contagion_states, size_prediction, ExperimentConfig, Method, CG_CPRED};
use fscale::par::Rayon;
use fscale::synth::{generate, PlantedRule, SynthConfig};
use fscale_core::baselines::{LrcqModel, LrcqParams, LrcqVariant};
use fscale_core::engine::{
    partition_susceptible, run, select_update_set, step, step_with_update_set, FnModel, SimMode, ThresholdRule,
};
use fscale_core::exec::rng;
use fscale_core::features::{interest_diversity, interest_similarity, Mechanism, FEATURE_COUNT, MECHANISM_OF};
use fscale_core::learners::{
    default_feature_names, Classifier, ClassifierKind, Dataset, ForestParams, Hyper, Objective,
};
use fscale_core::pipeline::{learn, mechanism_measure, sfbs, Criterion, LearnConfig};
use fscale_core::{Cascade, CascadeState, Corpus, Env, Message, NodeId, Profiles, Sequential, SimConfig, SocialGraph, Topology};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::StandardNormal;

type Check = fn() -> Outcome;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn secs(d: Duration) -> String {
    format!("{:.1}s", d.as_secs_f64())
}

fn message(id: &str) -> Message {
    Message {
        message_id: id.into(),
        content_length: 10,
        has_keyword: false,
        topic: vec![1.0],
        origin_time: 0.0,
    }
}

fn ids(v: &[u32]) -> Vec<NodeId> {
    v.iter().map(|&i| NodeId(i)).collect()
}

/// Nine-node frontier below root 12 with frontier edges 1-2, the 4-5-6
/// triangle and 7-8; nodes 9..11 sit one shell deeper.
fn walkthrough_graph() -> SocialGraph {
    let mut e: Vec<(u32, u32)> = (0..9).map(|v| (v, 12)).collect();
    e.extend([(2, 1), (5, 4), (6, 5), (4, 6), (8, 7)]);
    e.extend([(9, 0), (10, 2), (11, 5), (11, 10)]);
    SocialGraph::from_edges(13, &e)
}

fn delta_t_arithmetic() -> Outcome {
    let g = walkthrough_graph();
    let corpus = Corpus::new(13, vec![message("m")], vec![]).unwrap();
    let profiles = Profiles::new(13);
    let env = Env::new(&g, &corpus, &profiles);
    let mut s = CascadeState::observe_prefix(&g, &Cascade::from_pairs("m", &[(12, 0.0)]), 1).unwrap();
    let cfg = SimConfig::default();
    let fires = ids(&[0, 2, 3, 5]);
    let model = FnModel(|_: Env<'_>, _: &CascadeState, _: &Message, v: NodeId| {
        Ok(if fires.contains(&v) { 1.0 } else { 0.0 })
    });
    let mut r = rng(0);
    let first = step_with_update_set(env, &mut s, &message("m"), &model, &cfg, &ids(&[0, 2, 3, 5, 8]), &mut r, &Sequential)
        .unwrap();
    let update = select_update_set(&partition_susceptible(&g, &s), &mut r);
    let second = step_with_update_set(env, &mut s, &message("m"), &model, &cfg, &update, &mut r, &Sequential).unwrap();
    let ratio = |o: &fscale_core::engine::StepOutcome| (o.n_update, o.n_susceptible);
    let exact = |o: &fscale_core::engine::StepOutcome, num: u32, den: u32| {
        ratio(o) == (num as usize, den as usize) && o.delta_t == f64::from(num) / f64::from(den) * cfg.delta_t
    };
    let pass = exact(&first, 5, 9) && exact(&second, 5, 8);
    outcome(
        pass,
        format!(
            "steps {}/{} and {}/{} of dT, dt = {:.4}s, {:.4}s",
            first.n_update, first.n_susceptible, second.n_update, second.n_susceptible, first.delta_t, second.delta_t
        ),
    )
}

fn random_graph(n: usize, follows: usize, r: &mut impl Rng) -> SocialGraph {
    let mut edges = Vec::new();
    for v in 0..n as u32 {
        for _ in 0..follows {
            let p = r.random_range(0..n as u32);
            if p != v {
                edges.push((v, p));
            }
        }
    }
    SocialGraph::from_edges(n, &edges)
}

/// Fixpoint of "activate once `theta` parents are active", by breadth-first
/// propagation of parent counts.
fn threshold_closure(g: &SocialGraph, seeds: &[NodeId], theta: usize) -> BTreeSet<NodeId> {
    let mut active = vec![false; g.len()];
    let mut hits = vec![0usize; g.len()];
    let mut queue: VecDeque<NodeId> = VecDeque::new();
    for &s in seeds {
        if !active[s.index()] {
            active[s.index()] = true;
            queue.push_back(s);
        }
    }
    while let Some(u) = queue.pop_front() {
        for &c in g.children(u) {
            hits[c.index()] += 1;
            if !active[c.index()] && hits[c.index()] >= theta {
                active[c.index()] = true;
                queue.push_back(c);
            }
        }
    }
    (0..g.len()).filter(|&i| active[i]).map(|i| NodeId(i as u32)).collect()
}

fn closure_oracle() -> Outcome {
    let start = Instant::now();
    let mut r = rng(2024);
    let mut mismatches = 0;
    let mut runs = 0;
    for k in 0..100u64 {
        let g = random_graph(500, 1 + (k % 4) as usize, &mut r);
        let corpus = Corpus::new(500, vec![message("m")], vec![]).unwrap();
        let profiles = Profiles::new(500);
        let env = Env::new(&g, &corpus, &profiles);
        let mut pool: Vec<u32> = (0..500).collect();
        pool.shuffle(&mut r);
        let seeds: Vec<(u32, f64)> = pool[..20].iter().enumerate().map(|(i, &v)| (v, i as f64)).collect();
        let c = Cascade::from_pairs("m", &seeds);
        let observed = CascadeState::observe_prefix(&g, &c, c.len()).unwrap();
        let seed_ids: Vec<NodeId> = seeds.iter().map(|s| NodeId(s.0)).collect();
        for theta in 1..=3 {
            let cfg = SimConfig {
                horizon: 1e15,
                seed: k,
                ..SimConfig::default()
            };
            let out = run(env, &observed, &message("m"), &ThresholdRule { theta }, &cfg, &Sequential).unwrap();
            let got: BTreeSet<NodeId> = out.state.activated().collect();
            runs += 1;
            if got != threshold_closure(&g, &seed_ids, theta) {
                mismatches += 1;
            }
        }
    }
    let t = start.elapsed();
    outcome(
        mismatches == 0 && t < Duration::from_secs(10),
        format!("{mismatches} of {runs} runs differ from the closure, {}", secs(t)),
    )
}

fn planted_dataset(seed: u64, d: usize, n: usize) -> (Dataset, [usize; 2]) {
    let mut r = rng(seed);
    let mut cols: Vec<usize> = (0..d).collect();
    cols.shuffle(&mut r);
    let mut pair = [cols[0], cols[1]];
    pair.sort_unstable();
    let mut rows = Vec::with_capacity(n);
    let mut y = Vec::with_capacity(n);
    for _ in 0..n {
        let x: Vec<f64> = (0..d).map(|_| r.sample(StandardNormal)).collect();
        let noise: f64 = r.sample(StandardNormal);
        y.push(if x[pair[0]] + x[pair[1]] + 0.3 * noise > 0.0 { 1 } else { -1 });
        rows.push(x);
    }
    (Dataset::new(rows, y, default_feature_names(d)).unwrap(), pair)
}

/// Plain backward elimination: repeatedly drop the feature whose removal
/// scores best, lowest index on ties.
fn sbs(c: &mut Criterion<'_>, k: usize) -> Vec<usize> {
    let mut set: Vec<usize> = (0..c.dim()).collect();
    while set.len() > k {
        let mut best: Option<(f64, usize)> = None;
        for i in 0..set.len() {
            let mut s = set.clone();
            s.remove(i);
            let j = c.score(&s).unwrap();
            if best.is_none_or(|(b, _)| j > b) {
                best = Some((j, i));
            }
        }
        set.remove(best.unwrap().1);
    }
    set
}

fn sfbs_recovery() -> Outcome {
    let start = Instant::now();
    let (mut recovered, mut dominated) = (0, 0);
    for seed in 0..20 {
        let (data, pair) = planted_dataset(100 + seed, 8, 500);
        let mut c = Criterion::new(&data, ClassifierKind::Logreg, Hyper::default(), 10, seed, &Sequential).unwrap();
        let mut got = sfbs(&mut c, 2).unwrap();
        got.sort_unstable();
        recovered += usize::from(got == pair);
        let j_sfbs = c.score(&got).unwrap();
        let oracle = sbs(&mut c, 2);
        let j_sbs = c.score(&oracle).unwrap();
        dominated += usize::from(j_sfbs >= j_sbs);
    }
    let t = start.elapsed();
    outcome(
        recovered >= 18 && dominated == 20 && t < Duration::from_secs(60),
        format!("pair recovered {recovered}/20, J(SFBS) >= J(SBS) {dominated}/20, {}", secs(t)),
    )
}

fn learner_numerics() -> Outcome {
    let mut r = rng(9);
    let (n, d) = (60, 4);
    let x: Vec<f64> = (0..n * d).map(|_| r.sample(StandardNormal)).collect();
    let y: Vec<i8> = (0..n).map(|_| if r.random::<bool>() { 1 } else { -1 }).collect();
    let obj = Objective { x: &x, y: &y, d, l2: 0.1 };
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let theta: Vec<f64> = (0..=d).map(|_| r.random_range(-2.0..2.0)).collect();
        let (_, grad) = obj.value_and_gradient(&theta);
        let h = 1e-5;
        let fd: Vec<f64> = (0..=d)
            .map(|j| {
                let (mut a, mut b) = (theta.clone(), theta.clone());
                a[j] += h;
                b[j] -= h;
                (obj.value(&a) - obj.value(&b)) / (2.0 * h)
            })
            .collect();
        let err: f64 = grad.iter().zip(&fd).map(|(g, f)| (g - f).powi(2)).sum::<f64>().sqrt();
        let norm: f64 = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
        worst = worst.max(err / norm.max(1e-12));
    }

    let rows: Vec<Vec<f64>> = (0..200).map(|_| (0..3).map(|_| r.random::<f64>()).collect()).collect();
    let labels: Vec<i8> = (0..200).map(|_| if r.random::<bool>() { 1 } else { -1 }).collect();
    let data = Dataset::new(rows, labels, default_feature_names(3)).unwrap();
    let mut hyper = Hyper::default();
    hyper.cart.min_leaf = 1;
    hyper.cart.max_depth = None;
    hyper.rforest = ForestParams {
        n_trees: 1,
        max_features: Some(3),
        bootstrap: false,
        max_depth: None,
        min_leaf: 1,
    };
    let cart = Classifier::fit(ClassifierKind::Cart, &data, &hyper, 1).unwrap();
    let correct = (0..data.len())
        .filter(|&i| cart.predict(data.row(i)).unwrap() == data.label(i))
        .count();
    let forest = Classifier::fit(ClassifierKind::Rforest, &data, &hyper, 2).unwrap();
    let same_tree = matches!((&cart, &forest), (Classifier::Cart(t), Classifier::Rforest(f)) if f.trees.len() == 1 && &f.trees[0] == t);
    let same_pred = (0..data.len()).all(|i| cart.predict_proba(data.row(i)).unwrap() == forest.predict_proba(data.row(i)).unwrap());
    outcome(
        worst < 1e-5 && correct == data.len() && same_tree && same_pred,
        format!(
            "max gradient rel. error {worst:.2e}, CART train accuracy {correct}/{}, one-tree forest equal {}",
            data.len(),
            same_tree && same_pred
        ),
    )
}

fn mechanism_proportions() -> Outcome {
    let targets = [4.786, 91.985, 2.897, 0.332];
    let counts = [4, 3, 5, 1];
    let mut selected = Vec::new();
    let mut weights = Vec::new();
    for m in Mechanism::ALL {
        let members: Vec<usize> = (0..FEATURE_COUNT).filter(|&j| MECHANISM_OF[j] == m).take(counts[m.index()]).collect();
        // Uneven split inside the group, scaled by an arbitrary factor.
        let parts: Vec<f64> = (1..=members.len()).map(|k| k as f64).collect();
        let total: f64 = parts.iter().sum();
        for (&j, p) in members.iter().zip(&parts) {
            selected.push(j);
            weights.push(7.3 * targets[m.index()] * p / total);
        }
    }
    let w = mechanism_measure(&weights, &selected).unwrap();
    let want = [0.04786, 0.91985, 0.02897, 0.00332];
    let err = w.iter().zip(want).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let mut r = rng(5);
    let all: Vec<usize> = (0..FEATURE_COUNT).collect();
    let mut worst_sum: f64 = 0.0;
    for _ in 0..1000 {
        let k = r.random_range(1..=FEATURE_COUNT);
        let mut sel = all.clone();
        sel.shuffle(&mut r);
        sel.truncate(k);
        let ws: Vec<f64> = (0..k).map(|_| r.random_range(0.001..1.0)).collect();
        let m = mechanism_measure(&ws, &sel).unwrap();
        worst_sum = worst_sum.max((m.iter().sum::<f64>() - 1.0).abs());
    }
    outcome(
        err < 1e-6 && worst_sum < 1e-12,
        format!(
            "W = ({:.5}, {:.5}, {:.5}, {:.5}), max error {err:.1e}; random sums off by at most {worst_sum:.1e}",
            w[0], w[1], w[2], w[3]
        ),
    )
}

fn train_lrcq(data: &fscale::io::DataSet, variant: LrcqVariant) -> LrcqModel {
    LrcqModel::train(data.env(), variant, LrcqParams::default(), 0, 10, Some(2000), &Rayon).unwrap()
}

fn comparative_shape() -> Outcome {
    let start = Instant::now();
    let data = generate(&SynthConfig::default()).unwrap();
    let cfg = LearnConfig {
        seed: 0,
        folds: 10,
        max_per_class: Some(2000),
        ..LearnConfig::default()
    };
    let model = learn(data.env(), &cfg, &Rayon).unwrap();
    let q1 = train_lrcq(&data, LrcqVariant::Q1);
    let q2 = train_lrcq(&data, LrcqVariant::Q2);
    let methods = [
        Method { name: "FScaleCP".into(), model: &model },
        Method { name: "LRC-Q1".into(), model: &q1 },
        Method { name: "LRC-Q2".into(), model: &q2 },
    ];
    let ecfg = ExperimentConfig {
        fractions: vec![0.05, 0.10, 0.20],
        groups: vec![50],
        per_group: 30,
        ..ExperimentConfig::default()
    };
    let rows = contagion_states(&data, &methods, &ecfg).unwrap();
    let acc = |m: &str, f: f64| {
        rows.iter()
            .find(|r| r.method == m && r.fraction == f)
            .and_then(|r| r.value)
            .unwrap_or(f64::NAN)
    };
    let (f10, q1_10, q2_10) = (acc("FScaleCP", 0.10), acc("LRC-Q1", 0.10), acc("LRC-Q2", 0.10));
    let (f5, f20) = (acc("FScaleCP", 0.05), acc("FScaleCP", 0.20));
    let t = start.elapsed();
    outcome(
        f10 > q1_10 && f10 > q2_10 && f20 >= f5 - 0.02 && t < Duration::from_secs(300),
        format!(
            "at 10%: FScaleCP {f10:.4}, LRC-Q1 {q1_10:.4}, LRC-Q2 {q2_10:.4}; FScaleCP 5% {f5:.4}, 20% {f20:.4}; {}",
            secs(t)
        ),
    )
}

fn fscale(args: &[&str]) -> bool {
    Command::new(env!("CARGO_BIN_EXE_fscale"))
        .args(args)
        .output()
        .map(|o| o.status.success())
        .unwrap_or(false)
}

/// Runs the whole command-line pipeline into `dir` and returns the produced
/// files in a fixed order.
fn pipeline(dir: &Path, threads: &str) -> Option<Vec<(String, Vec<u8>)>> {
    let p = |name: &str| dir.join(name).to_str().unwrap().to_string();
    let ok = fscale(&["--threads", threads, "synth", "--nodes", "300", "--messages", "60", "--seed", "7", "--out", &p("data")])
        && fscale(&[
            "--threads", threads, "train", "--data", &p("data"), "--folds", "5", "--max-per-class", "300", "--seed", "7",
            "--out", &p("model.json"),
        ])
        && fscale(&[
            "--threads", threads, "train", "--data", &p("data"), "--method", "lrcq2", "--folds", "5", "--max-per-class",
            "300", "--seed", "7", "--out", &p("q2.json"),
        ])
        && fscale(&[
            "--threads", threads, "simulate", "--data", &p("data"), "--model", &p("model.json"), "--cascade", "m0003",
            "--seed", "7", "--out", &p("pred.jsonl"), "--trace", &p("trace.csv"),
        ])
        && fscale(&[
            "--threads", threads, "evaluate", "--data", &p("data"), "--models",
            &format!("{},{}", p("model.json"), p("q2.json")), "--experiment", "states", "--groups", "10",
            "--fractions", "0.1,0.2", "--per-group", "8", "--seed", "7", "--out", &p("states.csv"),
        ]);
    if !ok {
        return None;
    }
    let names = [
        "data/graph.tsv",
        "data/messages.jsonl",
        "data/cascades.jsonl",
        "data/profiles.jsonl",
        "data/manifest.json",
        "model.json",
        "q2.json",
        "pred.jsonl",
        "trace.csv",
        "states.csv",
        "states.json",
    ];
    names
        .iter()
        .map(|n| std::fs::read(dir.join(n)).ok().map(|b| (n.to_string(), b)))
        .collect()
}

fn determinism() -> Outcome {
    let tmp = tempfile::tempdir().unwrap();
    let runs: Vec<_> = [("a", "1"), ("b", "1"), ("c", "8")]
        .iter()
        .map(|(d, t)| pipeline(&tmp.path().join(d), t))
        .collect();
    let [Some(a), Some(b), Some(c)] = &runs[..] else {
        return outcome(false, "a pipeline command failed");
    };
    let differ: Vec<&str> = a
        .iter()
        .zip(b)
        .zip(c)
        .filter(|((x, y), z)| x.1 != y.1 || x.1 != z.1)
        .map(|((x, _), _)| x.0.as_str())
        .collect();
    outcome(
        differ.is_empty(),
        if differ.is_empty() {
            format!("{} files byte-identical across two runs and --threads 1/8", a.len())
        } else {
            format!("differing files: {}", differ.join(", "))
        },
    )
}

fn invariant_suites() -> Outcome {
    let mut r = rng(77);
    let mut failures = Vec::new();

    // Monotone activation and step length, on random graphs with a random
    // Bernoulli model.
    let mut steps = 0usize;
    for k in 0..30u64 {
        let n = r.random_range(20..400);
        let g = random_graph(n, r.random_range(1..4), &mut r);
        let corpus = Corpus::new(n, vec![message("m")], vec![]).unwrap();
        let profiles = Profiles::new(n);
        let env = Env::new(&g, &corpus, &profiles);
        let c = Cascade::from_pairs("m", &[(0, 0.0), (1 % n as u32, 1.0)]);
        let mut s = CascadeState::observe_prefix(&g, &c, c.len()).unwrap();
        let cfg = SimConfig {
            mode: SimMode::Bernoulli,
            seed: k,
            ..SimConfig::default()
        };
        let p: f64 = r.random_range(0.05..0.9);
        let model = FnModel(move |_: Env<'_>, _: &CascadeState, _: &Message, _| Ok(p));
        let mut srng = rng(k);
        while !s.susceptible().is_empty() && steps < 1_000_000 {
            let before = s.cascade.events.clone();
            let out = step(env, &mut s, &message("m"), &model, &cfg, &mut srng, &Sequential).unwrap();
            steps += 1;
            if !(out.delta_t > 0.0 && out.delta_t <= cfg.delta_t) {
                failures.push(format!("dt {} outside (0, dT]", out.delta_t));
            }
            if s.cascade.events[..before.len()] != before[..] {
                failures.push("an activation was removed or re-timestamped".into());
            }
        }
    }

    // Susceptible set against a scan over all nodes.
    for _ in 0..40 {
        let n = r.random_range(2..=1000);
        let g = random_graph(n, r.random_range(1..5), &mut r);
        let mut pool: Vec<u32> = (0..n as u32).collect();
        pool.shuffle(&mut r);
        let k = r.random_range(1..=n.min(50));
        let pairs: Vec<(u32, f64)> = pool[..k].iter().enumerate().map(|(i, &v)| (v, i as f64)).collect();
        let c = Cascade::from_pairs("m", &pairs);
        let s = CascadeState::observe_prefix(&g, &c, k).unwrap();
        let brute: BTreeSet<NodeId> = g
            .nodes()
            .filter(|&v| !s.is_active(v) && g.parents(v).iter().any(|&p| s.is_active(p)))
            .collect();
        if &brute != s.susceptible() {
            failures.push(format!("susceptible set differs on a {n}-node graph"));
        }
    }

    // Divergence and entropy on random probability vectors.
    let mut checked = 0;
    for _ in 0..10_000 {
        let k = r.random_range(1..12);
        let draw = |r: &mut fscale_core::exec::Rng| {
            let v: Vec<f64> = (0..k).map(|_| r.random::<f64>().powi(3)).collect();
            let s: f64 = v.iter().sum();
            v.iter().map(|x| x / s).collect::<Vec<f64>>()
        };
        let (p, q) = (draw(&mut r), draw(&mut r));
        let dpq = interest_similarity(&p, &q).unwrap();
        let dqp = interest_similarity(&q, &p).unwrap();
        let dpp = interest_similarity(&p, &p).unwrap();
        let h = interest_diversity(&p).unwrap();
        let uniform = interest_diversity(&vec![1.0 / k as f64; k]).unwrap();
        let ln_k = (k as f64).ln();
        let ok = dpq >= 0.0
            && (dpq - dqp).abs() <= 1e-12 * dpq.max(1.0)
            && dpp.abs() < 1e-12
            && h >= -1e-12
            && h <= uniform + 1e-12
            && (uniform - ln_k).abs() < 1e-12;
        if !ok {
            failures.push(format!("divergence/entropy property broken for p={p:?} q={q:?}"));
        }
        checked += 1;
    }
    outcome(
        failures.is_empty(),
        if failures.is_empty() {
            format!("{steps} engine steps, 40 susceptible-set graphs, {checked} vector pairs")
        } else {
            format!("{} violations, first: {}", failures.len(), failures[0])
        },
    )
}

fn size_precision() -> Outcome {
    let start = Instant::now();
    let data = generate(&SynthConfig {
        rule: PlantedRule::Threshold { theta: 2 },
        roots: 2,
        seed: 0,
        ..SynthConfig::default()
    })
    .unwrap();
    let cfg = LearnConfig {
        seed: 0,
        folds: 10,
        max_per_class: Some(2000),
        ..LearnConfig::default()
    };
    let model = learn(data.env(), &cfg, &Rayon).unwrap();
    let ecfg = ExperimentConfig {
        fractions: vec![0.05],
        groups: vec![2],
        per_group: 30,
        ..ExperimentConfig::default()
    };
    let rows = size_prediction(&data, &[Method { name: "FScaleCP".into(), model: &model }], &ecfg).unwrap();
    let get = |m: &str| rows.iter().find(|r| r.method == m).and_then(|r| r.value).unwrap_or(f64::NAN);
    let (ours, cg) = (get("FScaleCP"), get(CG_CPRED));
    outcome(
        ours >= cg,
        format!("0.2-precision at 5%: FScaleCP {ours:.4}, CG-CPred {cg:.4}; {}", secs(start.elapsed())),
    )
}

fn main() {
    // `cargo test -- --list` and filters are passed through; this target has
    // a single entry point, so it only needs to honor `--list`.
    if std::env::args().any(|a| a == "--list") {
        println!("acceptance: test");
        return;
    }
    let criteria: [(&str, Check); 9] = [
        ("1 dt arithmetic", delta_t_arithmetic),
        ("2 closure oracle", closure_oracle),
        ("3 sfbs recovery", sfbs_recovery),
        ("4 learner numerics", learner_numerics),
        ("5 mechanism measure", mechanism_proportions),
        ("6 comparative shape", comparative_shape),
        ("7 determinism", determinism),
        ("8 invariant suites", invariant_suites),
        ("9 size precision", size_precision),
    ];
    let total = criteria.len();
    let mut failed = 0;
    for (name, check) in criteria {
        let o = check();
        failed += usize::from(!o.pass);
        println!("{} {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    println!("acceptance: {} passed, {failed} failed", total - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
