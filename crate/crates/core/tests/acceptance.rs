//! Acceptance suite. Each test prints one `PASS`/`FAIL` line and then
//! asserts, so `cargo test --test acceptance -- --nocapture` shows a
//! per-criterion summary.

use std::collections::BTreeMap;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use behavesim::baselines::text_sim;
use behavesim::behave::{behave_sim, behave_sim_traj, FingerprintSet, TrajComparator};
use behavesim::cluster::{rank_correlation, RankMethod};
use behavesim::expr::Expr;
use behavesim::search::eoh::{dominance_values, selection_probs, softmax};
use behavesim::search::{
    eoh_manage_population, eoh_parent_select, run_search, DatabaseParams, Evaluator, GeneratorConfig,
    IslandDatabase, Registration, SearchConfig, SearchMode, SearchReport,
};
use behavesim::soldist::{edit_distance, SolutionMetric};
use behavesim::trajsim::{dtw_distance, Measure, TrajSimConfig};
use behavesim::types::{AlgorithmSpec, PsTraj, ScoredAlgorithm, Solution, TrajMeta};
use behavesim::zoo::{self, fixtures, PairType};

fn report(id: u32, name: &str, ok: bool, detail: &str, start: Instant, limit: Duration) {
    let took = start.elapsed();
    let in_time = took <= limit;
    let status = if ok && in_time { "PASS" } else { "FAIL" };
    println!("{status} criterion {id:>2} {name}: {detail} ({:.2}s, limit {}s)", took.as_secs_f64(), limit.as_secs());
    assert!(ok, "criterion {id} ({name}) failed: {detail}");
    assert!(in_time, "criterion {id} ({name}) exceeded {}s", limit.as_secs());
}

fn zoo_spec(id: &str) -> AlgorithmSpec {
    AlgorithmSpec::zoo(id).unwrap()
}

fn pair_sim(left: &str, right: &str, cfg: &TrajSimConfig) -> f64 {
    let fp = FingerprintSet::for_task(zoo::lookup(left).unwrap().task, cfg.clone());
    behave_sim(&zoo_spec(left), &zoo_spec(right), &fp, fixtures::registry()).unwrap()
}

/// BehaveSim of every dataset pair, grouped by type.
fn dataset_sims(cfg: &TrajSimConfig) -> BTreeMap<PairType, Vec<f64>> {
    let mut out: BTreeMap<PairType, Vec<f64>> = BTreeMap::new();
    for p in zoo::dataset_pairs() {
        out.entry(p.type_tag).or_default().push(pair_sim(&p.left, &p.right, cfg));
    }
    out
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

#[test]
fn c01_self_similarity() {
    let t = Instant::now();
    let mut worst = 1.0f64;
    let mut count = 0;
    for a in zoo::registry() {
        let fp = FingerprintSet::for_task(a.task, TrajSimConfig::default());
        let s = behave_sim(&zoo_spec(a.id), &zoo_spec(a.id), &fp, fixtures::registry()).unwrap();
        worst = if s != 1.0 { s } else { worst };
        count += 1;
    }
    let fp = FingerprintSet::over_instances(fixtures::registry(), &fixtures::tsp12_ids(), TrajSimConfig::default()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..50 {
        let spec = AlgorithmSpec::dsl(Expr::random(&mut rng, 5));
        let s = behave_sim(&spec, &spec, &fp, fixtures::registry()).unwrap();
        worst = if s != 1.0 { s } else { worst };
        count += 1;
    }
    report(
        1,
        "self-similarity",
        worst == 1.0,
        &format!("{count} algorithms, off value {worst}"),
        t,
        Duration::from_secs(30),
    );
}

#[test]
fn c02_type3_pairs_identical() {
    let t = Instant::now();
    let sims: Vec<f64> = zoo::dataset_pairs()
        .iter()
        .filter(|p| p.type_tag == PairType::T3)
        .map(|p| pair_sim(&p.left, &p.right, &TrajSimConfig::default()))
        .collect();
    report(
        2,
        "type-3 pairs",
        sims.len() == 6 && sims.iter().all(|&s| s == 1.0),
        &format!("{sims:?}"),
        t,
        Duration::from_secs(30),
    );
}

#[test]
fn c03_type_ordering_and_ngram_inversion() {
    let t = Instant::now();
    let sims = dataset_sims(&TrajSimConfig::default());
    let mut ngram: BTreeMap<PairType, Vec<f64>> = BTreeMap::new();
    for p in zoo::dataset_pairs() {
        let a = zoo::lookup(&p.left).unwrap().pseudocode;
        let b = zoo::lookup(&p.right).unwrap().pseudocode;
        ngram.entry(p.type_tag).or_default().push(text_sim(a, b).unwrap());
    }
    let bm = |t: PairType| mean(&sims[&t]);
    let nm = |t: PairType| mean(&ngram[&t]);
    let margin = 0.05;
    let ok = bm(PairType::T3) == 1.0
        && [PairType::T1, PairType::T2, PairType::T4].iter().all(|&t| bm(t) <= 1.0 - margin)
        && nm(PairType::T1) >= nm(PairType::T3) + margin
        && nm(PairType::T2) >= nm(PairType::T4) + margin;
    let detail = PairType::ALL
        .iter()
        .map(|&t| format!("{t} behave {:.3} ngram {:.3}", bm(t), nm(t)))
        .collect::<Vec<_>>()
        .join("; ");
    report(3, "type ordering", ok, &detail, t, Duration::from_secs(120));
}

/// Cheapest cost over every monotone alignment path, by explicit recursion.
fn dtw_paths(c: &[Vec<f64>], i: usize, j: usize) -> f64 {
    let here = c[i][j];
    if i == 0 && j == 0 {
        return here;
    }
    let mut best = f64::INFINITY;
    if i > 0 {
        best = best.min(dtw_paths(c, i - 1, j));
    }
    if j > 0 {
        best = best.min(dtw_paths(c, i, j - 1));
    }
    if i > 0 && j > 0 {
        best = best.min(dtw_paths(c, i - 1, j - 1));
    }
    here + best
}

#[test]
fn c04_dtw_oracle() {
    let t = Instant::now();
    let metric = SolutionMetric::default();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let traj = |rng: &mut ChaCha8Rng| -> Vec<Solution> {
            let n = rng.random_range(1..=6);
            (0..n)
                .map(|_| Solution::real(vec![rng.random::<f64>(), rng.random::<f64>()]).unwrap())
                .collect()
        };
        let x = traj(&mut rng);
        let y = traj(&mut rng);
        let c: Vec<Vec<f64>> = x.iter().map(|a| y.iter().map(|b| metric.dist(a, b).unwrap()).collect()).collect();
        let oracle = dtw_paths(&c, x.len() - 1, y.len() - 1);
        let got = dtw_distance(&x, &y, &metric).unwrap();
        worst = worst.max((got - oracle).abs());
    }
    report(4, "DTW oracle", worst <= 1e-12, &format!("200 pairs, max error {worst:e}"), t, Duration::from_secs(10));
}

fn edit_brute(a: &[u8], b: &[u8]) -> usize {
    match (a.split_first(), b.split_first()) {
        (None, _) => b.len(),
        (_, None) => a.len(),
        (Some((x, ra)), Some((y, rb))) => {
            let sub = edit_brute(ra, rb) + usize::from(x != y);
            sub.min(edit_brute(ra, b) + 1).min(edit_brute(a, rb) + 1)
        }
    }
}

#[test]
fn c05_edit_distance_oracle() {
    let t = Instant::now();
    let mut seqs: Vec<Vec<u8>> = vec![vec![]];
    let mut frontier = seqs.clone();
    for _ in 0..5 {
        frontier = frontier
            .iter()
            .flat_map(|s| (0..3u8).map(move |c| [s.as_slice(), &[c]].concat()))
            .collect();
        seqs.extend(frontier.iter().cloned());
    }
    let mut mismatches = 0usize;
    for a in &seqs {
        for b in &seqs {
            mismatches += usize::from(edit_distance(a, b) != edit_brute(a, b));
        }
    }
    report(
        5,
        "edit-distance oracle",
        seqs.len() == 364 && mismatches == 0,
        &format!("{} pairs, {mismatches} mismatches", seqs.len() * seqs.len()),
        t,
        Duration::from_secs(10),
    );
}

#[test]
fn c06_optimizer_similarity() {
    let t = Instant::now();
    let mut ok = true;
    let mut detail = vec![];
    for m in [Measure::Dtw, Measure::MeanPairwise] {
        let cfg = TrajSimConfig::with_measure(m.clone());
        let cg = pair_sim("cg", "quasi_newton", &cfg);
        let sgd = pair_sim("sgd", "quasi_newton", &cfg);
        ok &= cg > sgd;
        detail.push(format!("{m:?}: cg-qn {cg:.4} sgd-qn {sgd:.4}"));
    }
    report(6, "optimizer similarity", ok, &detail.join("; "), t, Duration::from_secs(30));
}

#[test]
fn c07_tsp_behavior_vs_text() {
    let t = Instant::now();
    let b = pair_sim("tsp_nearest_neighbor", "tsp_farthest_neighbor", &TrajSimConfig::default());
    let n = text_sim(
        zoo::lookup("tsp_nearest_neighbor").unwrap().pseudocode,
        zoo::lookup("tsp_farthest_neighbor").unwrap().pseudocode,
    )
    .unwrap();
    report(
        7,
        "nearest vs farthest",
        b < 0.8 && n > 0.9,
        &format!("behave {b:.4}, ngram {n:.4}"),
        t,
        Duration::from_secs(10),
    );
}

#[test]
fn c08_truncation_sampling_robustness() {
    let t = Instant::now();
    let cfg = |k: f64, n: usize| TrajSimConfig {
        truncate_k: k,
        sample_n: n,
        ..TrajSimConfig::default()
    };
    let all = |m: &BTreeMap<PairType, Vec<f64>>| mean(&m.values().flatten().copied().collect::<Vec<_>>());
    let full = dataset_sims(&cfg(0.0, 0));
    let trunc = dataset_sims(&cfg(0.1, 0));
    let diff = (all(&trunc) - all(&full)).abs();
    let mut grid: Vec<(f64, usize)> = [0.0, 0.1, 0.2, 0.3, 0.4, 0.5].iter().map(|&k| (k, 0)).collect();
    grid.extend((1..=5).map(|n| (0.0, n)));
    let mut t3_ok = true;
    for (k, n) in grid {
        let c = cfg(k, n);
        for p in zoo::dataset_pairs().iter().filter(|p| p.type_tag == PairType::T3) {
            t3_ok &= pair_sim(&p.left, &p.right, &c) == 1.0;
        }
    }
    report(
        8,
        "truncation robustness",
        diff <= 0.05 && t3_ok,
        &format!("mean shift {diff:.4}, type-3 exact over grid: {t3_ok}"),
        t,
        Duration::from_secs(180),
    );
}

#[test]
fn c09_measure_rank_correlation() {
    let t = Instant::now();
    let ids = zoo::OPTIMIZER_IDS;
    let column = |m: Measure| {
        let cfg = TrajSimConfig::with_measure(m);
        let mut v = vec![];
        for i in 0..ids.len() {
            for j in i + 1..ids.len() {
                v.push(pair_sim(ids[i], ids[j], &cfg));
            }
        }
        v
    };
    let dtw = column(Measure::Dtw);
    let mp = column(Measure::MeanPairwise);
    let cos = column(Measure::SegmentCosine);
    let tau_mp = rank_correlation(&dtw, &mp, RankMethod::KendallTau).unwrap();
    let tau_cos = rank_correlation(&dtw, &cos, RankMethod::KendallTau).unwrap();
    report(
        9,
        "measure rank correlation",
        dtw.len() == 28 && tau_mp >= 0.5 && tau_cos < tau_mp,
        &format!("tau(dtw, mean pairwise) {tau_mp:.4}, tau(dtw, segment cosine) {tau_cos:.4}"),
        t,
        Duration::from_secs(60),
    );
}

/// One-step trajectory at a 1-D point, so that under the default
/// comparator `sim(a, b) = 1 - |x_a - x_b|` exactly for dyadic points.
fn point_algo(x: f64, fitness: f64, birth: u64) -> ScoredAlgorithm {
    ScoredAlgorithm {
        spec: AlgorithmSpec::dsl(Expr::constant(birth as f64)),
        fitness,
        trajs: vec![PsTraj::new(vec![Solution::real(vec![x]).unwrap()], TrajMeta::default()).unwrap()],
        eval_count_at_birth: birth,
    }
}

fn population(points: &[(f64, f64)]) -> Vec<ScoredAlgorithm> {
    points.iter().enumerate().map(|(i, &(x, f))| point_algo(x, f, i as u64)).collect()
}

fn softmax_oracle(v: &[f64]) -> Vec<f64> {
    let z: f64 = v.iter().map(|x| x.exp()).sum();
    v.iter().map(|x| x.exp() / z).collect()
}

#[test]
fn c10_dominance_dissimilarity_traces() {
    let t = Instant::now();
    let cmp = TrajComparator::uniform(TrajSimConfig::default());
    // The incumbent sits at 0, so the second objective is 1 - x.
    let best = point_algo(0.0, 0.0, 99);
    // (points as (x, fitness), hand-computed values, survivors for each n)
    let cases: Vec<(Vec<(f64, f64)>, Vec<f64>, Vec<(usize, Vec<usize>)>)> = vec![
        // A = (0.1, 0.5) dominates B = (0.3, 0.75); sim(A, B) = 0.75.
        (vec![(0.5, 0.1), (0.25, 0.3)], vec![0.0, -0.75], vec![(1, vec![0]), (2, vec![0, 1])]),
        // A dominates B and C; B and C are incomparable.
        (
            vec![(0.75, 0.1), (0.25, 0.2), (0.5, 0.3)],
            vec![0.0, -0.5, -0.75],
            vec![(1, vec![0]), (2, vec![0, 1])],
        ),
        // 2 is dominated by 1; 4 by 1, 2 and 3.
        (
            vec![(0.125, 0.1), (0.5, 0.2), (0.375, 0.3), (0.75, 0.5), (0.25, 0.6), (1.0, 0.9)],
            vec![0.0, 0.0, -0.875, 0.0, -2.125, 0.0],
            vec![(4, vec![0, 1, 3, 5]), (5, vec![0, 1, 3, 5, 2]), (6, vec![0, 1, 3, 5, 2, 4])],
        ),
    ];
    let mut ok = true;
    let mut worst = 0.0f64;
    for (points, expect_v, survivors) in &cases {
        let pop = population(points);
        let (obj, sim) = behavesim::search::eoh::objectives(&pop, &best, &cmp).unwrap();
        let v = dominance_values(&obj, &sim);
        ok &= &v == expect_v;
        let probs = selection_probs(&pop, &best, &cmp).unwrap();
        for (p, q) in probs.iter().zip(softmax_oracle(expect_v)) {
            worst = worst.max((p - q).abs());
        }
        ok &= softmax(&v) == probs;
        for (n, keep) in survivors {
            ok &= &eoh_manage_population(&pop, &best, *n, &cmp).unwrap() == keep;
        }
        // Parent draws follow the probabilities: same stream, same draws.
        let mut r1 = ChaCha8Rng::seed_from_u64(10);
        let mut r2 = ChaCha8Rng::seed_from_u64(10);
        let drawn = eoh_parent_select(&pop, &best, 2, &cmp, &mut r1).unwrap();
        ok &= drawn == behavesim::search::eoh::sample_parents(&probs, 2, &mut r2);
    }
    report(
        10,
        "selection traces",
        ok && worst <= 1e-12,
        &format!("3 populations, max softmax error {worst:e}"),
        t,
        Duration::from_secs(1),
    );
}

#[test]
fn c11_register_oracle() {
    let t = Instant::now();
    let cmp = TrajComparator::uniform(TrajSimConfig::default());
    let params = DatabaseParams {
        p_s1: 0.5,
        cluster_temp: 0.1,
        length_temp: 1.0,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let rand_algo = |rng: &mut ChaCha8Rng, birth: u64| {
        let trajs = (0..3)
            .map(|_| {
                let len = rng.random_range(1..=5);
                let steps = (0..len)
                    .map(|_| Solution::real(vec![rng.random::<f64>() * 0.8, rng.random::<f64>() * 0.8]).unwrap())
                    .collect();
                PsTraj::new(steps, TrajMeta::default()).unwrap()
            })
            .collect();
        ScoredAlgorithm {
            spec: AlgorithmSpec::dsl(Expr::constant(birth as f64)),
            fitness: rng.random_range(0..4) as f64 / 4.0,
            trajs,
            eval_count_at_birth: birth,
        }
    };
    let mut mismatches = 0;
    for _ in 0..100 {
        let n_isl = rng.random_range(1..=6);
        let mut db = IslandDatabase::empty(n_isl, params);
        let mut birth = 0;
        for i in 0..n_isl {
            // Leave some islands empty.
            let k = if rng.random_bool(0.2) { 0 } else { rng.random_range(1..=4) };
            for _ in 0..k {
                db.insert_into(i, rand_algo(&mut rng, birth));
                birth += 1;
            }
        }
        let cand = rand_algo(&mut rng, birth);
        let mut expect = 0;
        let mut best = f64::NEG_INFINITY;
        for (i, isl) in db.islands.iter().enumerate() {
            let members: Vec<&ScoredAlgorithm> = isl.members().collect();
            if members.is_empty() {
                continue;
            }
            let m = members
                .iter()
                .map(|a| behave_sim_traj(&cand.trajs, &a.trajs, &TrajSimConfig::default()).unwrap())
                .sum::<f64>()
                / members.len() as f64;
            if m > best {
                best = m;
                expect = i;
            }
        }
        let got = db.register(cand, &cmp).unwrap();
        mismatches += usize::from(got != expect);
    }
    report(
        11,
        "register oracle",
        mismatches == 0,
        &format!("100 databases, {mismatches} mismatches"),
        t,
        Duration::from_secs(60),
    );
}

fn search_cfg(seed: u64, registration: Registration) -> SearchConfig {
    SearchConfig {
        seed,
        generator: GeneratorConfig::Mutator { seed },
        registration,
        eval_budget: 300,
        ..SearchConfig::default()
    }
}

/// Behavioral-registration runs for seeds 0..3, shared by criteria 12 and 13.
fn behavioral_runs() -> &'static Vec<SearchReport> {
    static RUNS: OnceLock<Vec<SearchReport>> = OnceLock::new();
    RUNS.get_or_init(|| {
        (0..3)
            .map(|s| run_search(&search_cfg(s, Registration::Behavioral), SearchMode::Funsearch, 4).unwrap())
            .collect()
    })
}

/// Island distances averaged over every checkpoint of a run.
fn mean_diversity(r: &SearchReport) -> (f64, f64) {
    let intra: Vec<f64> = r.checkpoints.iter().filter_map(|c| c.intra).collect();
    let inter: Vec<f64> = r.checkpoints.iter().filter_map(|c| c.inter).collect();
    (mean(&intra), mean(&inter))
}

#[test]
fn c12_island_diversity() {
    let t = Instant::now();
    let mut wins = 0;
    let mut detail = vec![];
    for (seed, b) in behavioral_runs().iter().enumerate() {
        let p = run_search(&search_cfg(seed as u64, Registration::ParentIsland), SearchMode::Funsearch, 4).unwrap();
        let (bi, be) = mean_diversity(b);
        let (pi, pe) = mean_diversity(&p);
        wins += usize::from(bi < pi && be > pe);
        detail.push(format!("seed {seed}: intra {bi:.3} vs {pi:.3}, inter {be:.3} vs {pe:.3}"));
    }
    report(12, "island diversity", wins >= 2, &format!("{wins}/3 seeds; {}", detail.join("; ")), t, Duration::from_secs(600));
}

#[test]
fn c13_search_beats_nearest_neighbor() {
    let t = Instant::now();
    let cfg = SearchConfig::default();
    let ev = Evaluator::new(cfg.fingerprint.clone(), &cfg.registry(), Duration::from_secs(60)).unwrap();
    let nn = ev.evaluate(&zoo_spec("tsp_nearest_neighbor"), 0).unwrap().fitness;
    let tops: Vec<f64> = behavioral_runs().iter().map(|r| r.top1).collect();
    report(
        13,
        "search sanity",
        tops.iter().all(|&g| g <= nn),
        &format!("nearest-neighbor gap {nn:.4}, top-1 gaps {tops:.4?}"),
        t,
        Duration::from_secs(600),
    );
}

#[test]
fn c14_determinism() {
    let t = Instant::now();
    let cfg = search_cfg(7, Registration::Behavioral);
    let run = |w| serde_json::to_string(&run_search(&cfg, SearchMode::Funsearch, w).unwrap()).unwrap();
    let (a1, b1) = (run(1), run(1));
    let (a4, b4) = (run(4), run(4));
    report(
        14,
        "determinism",
        a1 == b1 && a4 == b4 && a1 == a4,
        &format!("report of {} bytes, workers 1 == 1: {}, 4 == 4: {}, 1 == 4: {}", a1.len(), a1 == b1, a4 == b4, a1 == a4),
        t,
        Duration::from_secs(600),
    );
}
