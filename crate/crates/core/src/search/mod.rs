//! Behavior-aware heuristic search over the TSP scoring-expression space:
//! an island database that registers candidates by behavioral similarity,
//! and a dominance-dissimilarity evolutionary loop.
//!
//! Evaluation runs on a rayon pool; a single coordinator owns the database,
//! the RNG and the generator, and consumes results in submission order, so
//! Mutator-mode runs do not depend on the worker count.

pub mod database;
pub mod eoh;
pub mod evaluate;
pub mod heldkarp;
pub mod llm;
pub mod mutate;

use std::collections::HashMap;
use std::time::Duration;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::behave::{BehaveError, FingerprintSet, TrajComparator};
use crate::cluster::ClusterError;
use crate::expr::Expr;
use crate::trajsim::TrajSimConfig;
use crate::types::{AlgorithmSpec, InstanceRegistry, ProblemInstance, ScoredAlgorithm};
use crate::zoo::fixtures;

pub use database::{DatabaseParams, Island, IslandDatabase, Selection, SelectionKind};
pub use eoh::{eoh_manage_population, eoh_parent_select};
pub use evaluate::{EvalError, Evaluator};
pub use heldkarp::held_karp;
pub use llm::{LlmClient, LlmConfig};
pub use mutate::{MutationKind, Mutator};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GenError {
    #[error("generator unavailable: {0}")]
    Unavailable(String),
    #[error("parent `{0}` is not a DSL expression")]
    NotDsl(String),
    #[error("generation takes 1 to 5 parents, got {0}")]
    BadParents(usize),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SearchError {
    #[error("invalid search config: {0}")]
    Config(String),
    #[error("evaluating candidate {index}: {source}")]
    Evaluation {
        index: u64,
        #[source]
        source: EvalError,
    },
    #[error(transparent)]
    Generator(#[from] GenError),
    #[error(transparent)]
    Behave(#[from] BehaveError),
    #[error(transparent)]
    Cluster(#[from] ClusterError),
    #[error("population is empty")]
    EmptyPopulation,
    #[error("no island has two members to select from")]
    InsufficientMembers,
    #[error("population of {have} cannot keep {need}")]
    PopTooSmall { have: usize, need: usize },
    #[error("fingerprint has {0} trajectories, database members have {1}")]
    FingerprintMismatch(usize, usize),
    #[error("worker pool: {0}")]
    Pool(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchMode {
    #[default]
    Funsearch,
    Eoh,
}

/// Where a new candidate goes in the island database.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Registration {
    /// Island of highest mean behavioral similarity.
    #[default]
    Behavioral,
    /// Island of the first parent.
    ParentIsland,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GeneratorConfig {
    Mutator { seed: u64 },
    LlmHttp(LlmConfig),
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        GeneratorConfig::Mutator { seed: 0 }
    }
}

fn default_fingerprint() -> FingerprintSet {
    FingerprintSet::over_instances(fixtures::registry(), &fixtures::tsp12_ids(), TrajSimConfig::default())
        .expect("shipped 12-city fixtures")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SearchConfig {
    pub seed: u64,
    pub n_isl: usize,
    pub n_init: usize,
    pub p_s1: f64,
    pub restart_period_evals: usize,
    pub eval_budget: usize,
    pub cluster_temp: f64,
    pub length_temp: f64,
    pub generator: GeneratorConfig,
    pub fingerprint: FingerprintSet,
    /// Instances beyond the shipped fixtures that the fingerprint may name.
    pub instances: Vec<ProblemInstance>,
    pub population_size: usize,
    pub parent_count: usize,
    pub registration: Registration,
    /// Prompts per evaluation batch; each prompt yields `offspring_per_prompt` candidates.
    pub batch_prompts: usize,
    pub offspring_per_prompt: usize,
    pub init_depth: usize,
    pub checkpoint_every: usize,
    pub timeout_secs: f64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            seed: 0,
            n_isl: 10,
            n_init: 100,
            p_s1: 0.5,
            restart_period_evals: 500,
            eval_budget: 300,
            cluster_temp: 0.1,
            length_temp: 1.0,
            generator: GeneratorConfig::default(),
            fingerprint: default_fingerprint(),
            instances: vec![],
            population_size: 20,
            parent_count: 2,
            registration: Registration::default(),
            batch_prompts: 4,
            offspring_per_prompt: 2,
            init_depth: 4,
            checkpoint_every: 50,
            timeout_secs: 50.0,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<(), SearchError> {
        let bad = |m: &str| Err(SearchError::Config(m.to_string()));
        if !(0.0..=1.0).contains(&self.p_s1) {
            return bad("p_s1 must lie in [0, 1]");
        }
        if !(self.cluster_temp > 0.0 && self.cluster_temp.is_finite()) {
            return bad("cluster_temp must be positive");
        }
        if !(self.length_temp > 0.0 && self.length_temp.is_finite()) {
            return bad("length_temp must be positive");
        }
        if !(self.timeout_secs > 0.0 && self.timeout_secs.is_finite()) {
            return bad("timeout_secs must be positive");
        }
        for (v, name) in [
            (self.n_isl, "n_isl"),
            (self.n_init, "n_init"),
            (self.population_size, "population_size"),
            (self.parent_count, "parent_count"),
            (self.batch_prompts, "batch_prompts"),
            (self.offspring_per_prompt, "offspring_per_prompt"),
            (self.init_depth, "init_depth"),
            (self.restart_period_evals, "restart_period_evals"),
            (self.checkpoint_every, "checkpoint_every"),
        ] {
            if v == 0 {
                return Err(SearchError::Config(format!("{name} must be positive")));
            }
        }
        if self.parent_count > 5 {
            return bad("parent_count must be at most 5");
        }
        self.fingerprint.validate()?;
        Ok(())
    }

    pub fn registry(&self) -> InstanceRegistry {
        let mut reg = fixtures::registry().clone();
        for inst in &self.instances {
            reg.insert(inst.clone());
        }
        reg
    }
}

/// Candidate generator behind a search run.
#[derive(Debug)]
pub enum Generator {
    Mutator(Mutator),
    Llm(LlmClient),
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Generated {
    pub specs: Vec<AlgorithmSpec>,
    pub parse_failures: usize,
}

impl Generator {
    pub fn from_config(cfg: &GeneratorConfig) -> Result<Self, GenError> {
        Ok(match cfg {
            GeneratorConfig::Mutator { seed } => Generator::Mutator(Mutator::new(*seed)),
            GeneratorConfig::LlmHttp(c) => Generator::Llm(LlmClient::new(c.clone())?),
        })
    }

    /// `count` offspring of the parents. Unparseable LLM replies are
    /// counted and dropped.
    pub fn generate(&mut self, parents: &[&ScoredAlgorithm], count: usize) -> Result<Generated, GenError> {
        if parents.is_empty() || parents.len() > 5 {
            return Err(GenError::BadParents(parents.len()));
        }
        let mut out = Generated::default();
        match self {
            Generator::Mutator(m) => {
                let exprs: Vec<&Expr> = parents
                    .iter()
                    .map(|p| p.spec.expr().ok_or_else(|| GenError::NotDsl(p.spec.id())))
                    .collect::<Result<_, _>>()?;
                for _ in 0..count {
                    out.specs.push(AlgorithmSpec::dsl(m.offspring(&exprs).1));
                }
            }
            Generator::Llm(client) => {
                let prompt = llm::render_prompt(parents);
                for _ in 0..count {
                    let reply = client.query(&prompt)?;
                    out.parse_failures += reply.parse_failures;
                    out.specs.extend(reply.spec);
                }
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MemberSummary {
    pub expr: String,
    pub fitness: f64,
    pub birth: u64,
}

impl MemberSummary {
    fn of(a: &ScoredAlgorithm) -> Self {
        MemberSummary {
            expr: a.spec.display_text.clone(),
            fitness: a.fitness,
            birth: a.eval_count_at_birth,
        }
    }
}

/// Island diversity after a given number of evaluations. `None` when no
/// island (pair) qualifies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub evaluations: usize,
    pub intra: Option<f64>,
    pub inter: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchReport {
    pub mode: SearchMode,
    pub seed: u64,
    pub eval_budget: usize,
    /// Budgeted evaluations performed (initialization excluded).
    pub evaluations: usize,
    pub init_evaluations: usize,
    pub init_best: f64,
    /// Best fitness so far after each budgeted evaluation.
    pub best_curve: Vec<f64>,
    pub top1: f64,
    pub top1_expr: String,
    /// Ten best distinct final fitness values, ascending.
    pub top10: Vec<f64>,
    pub top10_mean: f64,
    pub checkpoints: Vec<Checkpoint>,
    /// Evaluation counts at which a restart happened.
    pub restarts: Vec<usize>,
    pub parse_failures: usize,
    pub failed_evaluations: usize,
    pub s1_fallbacks: usize,
    pub islands: Vec<Vec<MemberSummary>>,
    pub population: Vec<MemberSummary>,
}

impl SearchReport {
    pub fn curve_csv(&self) -> String {
        let mut s = String::from("evaluation,best_fitness\n");
        for (i, v) in self.best_curve.iter().enumerate() {
            s.push_str(&format!("{},{}\n", i + 1, v));
        }
        s
    }

    pub fn checkpoints_csv(&self) -> String {
        let opt = |v: Option<f64>| v.map_or(String::new(), |v| v.to_string());
        let mut s = String::from("evaluations,intra,inter\n");
        for c in &self.checkpoints {
            s.push_str(&format!("{},{},{}\n", c.evaluations, opt(c.intra), opt(c.inter)));
        }
        s
    }
}

/// Similarities between members keyed by birth index; restart copies share
/// the key of their original.
#[derive(Debug, Default)]
struct SimCache {
    map: HashMap<(u64, u64), f64>,
}

impl SimCache {
    fn key(a: &ScoredAlgorithm, b: &ScoredAlgorithm) -> (u64, u64) {
        let (x, y) = (a.eval_count_at_birth, b.eval_count_at_birth);
        (x.min(y), x.max(y))
    }

    /// Fills missing entries for the given pairs in parallel.
    fn fill(&mut self, pairs: &[(&ScoredAlgorithm, &ScoredAlgorithm)], cmp: &TrajComparator) -> Result<(), SearchError> {
        let mut todo: Vec<(u64, u64, &ScoredAlgorithm, &ScoredAlgorithm)> = Vec::new();
        for &(a, b) in pairs {
            let k = Self::key(a, b);
            if k.0 != k.1 && !self.map.contains_key(&k) && !todo.iter().any(|t| (t.0, t.1) == k) {
                todo.push((k.0, k.1, a, b));
            }
        }
        let vals: Vec<f64> = todo
            .par_iter()
            .map(|(_, _, a, b)| cmp.behave_sim_traj(&a.trajs, &b.trajs))
            .collect::<Result<_, _>>()?;
        for (t, v) in todo.iter().zip(vals) {
            self.map.insert((t.0, t.1), v);
        }
        Ok(())
    }

    fn get(&self, a: &ScoredAlgorithm, b: &ScoredAlgorithm) -> f64 {
        let k = Self::key(a, b);
        if k.0 == k.1 {
            1.0
        } else {
            self.map[&k]
        }
    }
}

/// Mean intra-island distance over islands with two or more members, and
/// mean inter-island distance over pairs of populated islands.
fn island_diversity(db: &IslandDatabase, cache: &mut SimCache, cmp: &TrajComparator) -> Result<(Option<f64>, Option<f64>), SearchError> {
    let members: Vec<Vec<&ScoredAlgorithm>> = db.islands.iter().map(|i| i.members().collect()).collect();
    let mut pairs = Vec::new();
    for (i, a) in members.iter().enumerate() {
        for (x, &m) in a.iter().enumerate() {
            for &n in &a[x + 1..] {
                pairs.push((m, n));
            }
            for b in &members[i + 1..] {
                for &n in b {
                    pairs.push((m, n));
                }
            }
        }
    }
    cache.fill(&pairs, cmp)?;
    let mean = |v: &[f64]| (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64);
    let mut intra = Vec::new();
    let mut inter = Vec::new();
    for (i, a) in members.iter().enumerate() {
        if a.len() >= 2 {
            let mut d = Vec::new();
            for (x, &m) in a.iter().enumerate() {
                d.extend(a[x + 1..].iter().map(|&n| 1.0 - cache.get(m, n)));
            }
            intra.push(mean(&d).expect("two members"));
        }
        for b in &members[i + 1..] {
            if a.is_empty() || b.is_empty() {
                continue;
            }
            let d: Vec<f64> = a.iter().flat_map(|&m| b.iter().map(move |&n| (m, n))).map(|(m, n)| 1.0 - cache.get(m, n)).collect();
            inter.push(mean(&d).expect("non-empty"));
        }
    }
    Ok((mean(&intra), mean(&inter)))
}

fn evaluate_batch(ev: &Evaluator, specs: &[AlgorithmSpec], first_birth: u64) -> Vec<Result<ScoredAlgorithm, EvalError>> {
    specs
        .par_iter()
        .enumerate()
        .map(|(i, s)| ev.evaluate(s, first_birth + i as u64))
        .collect()
}

fn random_specs(rng: &mut ChaCha8Rng, n: usize, depth: usize) -> Vec<AlgorithmSpec> {
    (0..n).map(|_| AlgorithmSpec::dsl(Expr::random(rng, depth))).collect()
}

fn top_distinct(all: &[&ScoredAlgorithm], k: usize) -> Vec<f64> {
    let mut seen = std::collections::BTreeSet::new();
    let mut v: Vec<&ScoredAlgorithm> = all.iter().copied().filter(|a| seen.insert(a.eval_count_at_birth)).collect();
    v.sort_by(|a, b| a.fitness.total_cmp(&b.fitness).then(a.eval_count_at_birth.cmp(&b.eval_count_at_birth)));
    v.iter().take(k).map(|a| a.fitness).collect()
}

struct Run<'a> {
    cfg: &'a SearchConfig,
    ev: Evaluator,
    cmp: TrajComparator,
    rng: ChaCha8Rng,
    generator: Generator,
    next_birth: u64,
    evaluations: usize,
    curve: Vec<f64>,
    best: f64,
    parse_failures: usize,
    failed: usize,
}

impl Run<'_> {
    fn init(&mut self, n: usize) -> Result<Vec<ScoredAlgorithm>, SearchError> {
        let specs = random_specs(&mut self.rng, n, self.cfg.init_depth);
        let first = self.next_birth;
        self.next_birth += n as u64;
        let out: Vec<ScoredAlgorithm> = evaluate_batch(&self.ev, &specs, first)
            .into_iter()
            .enumerate()
            .map(|(i, r)| r.map_err(|source| SearchError::Evaluation { index: first + i as u64, source }))
            .collect::<Result<_, _>>()?;
        self.best = out.iter().map(|a| a.fitness).fold(f64::INFINITY, f64::min);
        Ok(out)
    }

    /// Offspring for one batch, cut at the remaining budget. Each spec
    /// carries the island of its first parent.
    fn generate(&mut self, parents: &[&ScoredAlgorithm], origin: usize, batch: &mut Vec<(AlgorithmSpec, usize)>) -> Result<(), SearchError> {
        let g = self.generator.generate(parents, self.cfg.offspring_per_prompt)?;
        self.parse_failures += g.parse_failures;
        batch.extend(g.specs.into_iter().map(|s| (s, origin)));
        Ok(())
    }

    /// Evaluates a batch and yields results in submission order, keeping
    /// the best-so-far curve.
    fn evaluate(&mut self, batch: &[(AlgorithmSpec, usize)]) -> Vec<Option<ScoredAlgorithm>> {
        let specs: Vec<AlgorithmSpec> = batch.iter().map(|(s, _)| s.clone()).collect();
        let first = self.next_birth;
        self.next_birth += specs.len() as u64;
        evaluate_batch(&self.ev, &specs, first)
            .into_iter()
            .map(|r| {
                self.evaluations += 1;
                match r {
                    Ok(a) => {
                        self.best = self.best.min(a.fitness);
                        self.curve.push(self.best);
                        Some(a)
                    }
                    Err(e) => {
                        log::warn!("evaluation failed: {e}");
                        self.failed += 1;
                        self.curve.push(self.best);
                        None
                    }
                }
            })
            .collect()
    }

    fn remaining(&self) -> usize {
        self.cfg.eval_budget - self.evaluations
    }
}

/// Batches in a row that produced no candidate before the run gives up.
const MAX_EMPTY_BATCHES: usize = 20;

fn funsearch(run: &mut Run) -> Result<SearchReport, SearchError> {
    let cfg = run.cfg;
    let init = run.init(cfg.n_init)?;
    let params = DatabaseParams {
        p_s1: cfg.p_s1,
        cluster_temp: cfg.cluster_temp,
        length_temp: cfg.length_temp,
    };
    let mut db = IslandDatabase::from_initial(init, cfg.n_isl, params, &run.cmp)?;
    let init_best = run.best;
    let mut cache = SimCache::default();
    let mut checkpoints = Vec::new();
    let mut restarts = Vec::new();
    let mut fallbacks = 0;
    let mut empty = 0;
    while run.remaining() > 0 && empty < MAX_EMPTY_BATCHES {
        let mut batch = Vec::new();
        for _ in 0..cfg.batch_prompts {
            if batch.len() >= run.remaining() {
                break;
            }
            match db.select_parents(&mut run.rng) {
                Ok(sel) => {
                    fallbacks += sel.fell_back as usize;
                    let parents: Vec<&ScoredAlgorithm> = sel.parents.iter().collect();
                    run.generate(&parents, sel.islands[0], &mut batch)?;
                }
                Err(SearchError::InsufficientMembers) => {
                    let best = db.best().expect("populated").clone();
                    let island = db.islands.iter().position(|i| i.members().any(|m| m == &best)).expect("member of an island");
                    run.generate(&[&best], island, &mut batch)?;
                }
                Err(e) => return Err(e),
            }
        }
        batch.truncate(run.remaining());
        if batch.is_empty() {
            empty += 1;
            continue;
        }
        empty = 0;
        let start = run.evaluations;
        let results = run.evaluate(&batch);
        for (k, (res, (_, origin))) in results.into_iter().zip(&batch).enumerate() {
            let done = start + k + 1;
            if let Some(a) = res {
                match cfg.registration {
                    Registration::Behavioral => {
                        db.register(a, &run.cmp)?;
                    }
                    Registration::ParentIsland => db.insert_into(*origin, a),
                }
            }
            if done.is_multiple_of(cfg.restart_period_evals) {
                db.restart_islands(&mut run.rng);
                restarts.push(done);
            }
            if done.is_multiple_of(cfg.checkpoint_every) {
                let (intra, inter) = island_diversity(&db, &mut cache, &run.cmp)?;
                checkpoints.push(Checkpoint { evaluations: done, intra, inter });
            }
        }
    }
    if checkpoints.last().is_none_or(|c| c.evaluations != run.evaluations) {
        let (intra, inter) = island_diversity(&db, &mut cache, &run.cmp)?;
        checkpoints.push(Checkpoint {
            evaluations: run.evaluations,
            intra,
            inter,
        });
    }
    let all: Vec<&ScoredAlgorithm> = db.islands.iter().flat_map(|i| i.members()).collect();
    let best = db.best().expect("populated");
    let top10 = top_distinct(&all, 10);
    Ok(SearchReport {
        mode: SearchMode::Funsearch,
        seed: cfg.seed,
        eval_budget: cfg.eval_budget,
        evaluations: run.evaluations,
        init_evaluations: cfg.n_init,
        init_best,
        best_curve: run.curve.clone(),
        top1: best.fitness,
        top1_expr: best.spec.display_text.clone(),
        top10_mean: top10.iter().sum::<f64>() / top10.len() as f64,
        top10,
        checkpoints,
        restarts,
        parse_failures: run.parse_failures,
        failed_evaluations: run.failed,
        s1_fallbacks: fallbacks,
        islands: db.islands.iter().map(|i| i.members().map(MemberSummary::of).collect()).collect(),
        population: vec![],
    })
}

fn best_of(pop: &[ScoredAlgorithm]) -> &ScoredAlgorithm {
    pop.iter().fold(&pop[0], |b, a| if a.fitness < b.fitness { a } else { b })
}

fn eoh(run: &mut Run) -> Result<SearchReport, SearchError> {
    let cfg = run.cfg;
    let mut pop = run.init(cfg.population_size)?;
    let init_best = run.best;
    let mut incumbent = best_of(&pop).clone();
    let mut empty = 0;
    while run.remaining() > 0 && empty < MAX_EMPTY_BATCHES {
        let probs = eoh::selection_probs(&pop, &incumbent, &run.cmp)?;
        let mut batch = Vec::new();
        for _ in 0..cfg.batch_prompts {
            if batch.len() >= run.remaining() {
                break;
            }
            let idx = eoh::sample_parents(&probs, cfg.parent_count, &mut run.rng);
            let parents: Vec<&ScoredAlgorithm> = idx.iter().map(|&i| &pop[i]).collect();
            let parents: Vec<ScoredAlgorithm> = parents.into_iter().cloned().collect();
            let refs: Vec<&ScoredAlgorithm> = parents.iter().collect();
            run.generate(&refs, 0, &mut batch)?;
        }
        batch.truncate(run.remaining());
        if batch.is_empty() {
            empty += 1;
            continue;
        }
        empty = 0;
        let results = run.evaluate(&batch);
        pop.extend(results.into_iter().flatten());
        incumbent = best_of(&pop).clone();
        let keep = eoh_manage_population(&pop, &incumbent, cfg.population_size.min(pop.len()), &run.cmp)?;
        pop = keep.into_iter().map(|i| pop[i].clone()).collect();
    }
    let all: Vec<&ScoredAlgorithm> = pop.iter().collect();
    let best = best_of(&pop);
    let top10 = top_distinct(&all, 10);
    Ok(SearchReport {
        mode: SearchMode::Eoh,
        seed: cfg.seed,
        eval_budget: cfg.eval_budget,
        evaluations: run.evaluations,
        init_evaluations: cfg.population_size,
        init_best,
        best_curve: run.curve.clone(),
        top1: best.fitness,
        top1_expr: best.spec.display_text.clone(),
        top10_mean: top10.iter().sum::<f64>() / top10.len() as f64,
        top10,
        checkpoints: vec![],
        restarts: vec![],
        parse_failures: run.parse_failures,
        failed_evaluations: run.failed,
        s1_fallbacks: 0,
        islands: vec![],
        population: pop.iter().map(MemberSummary::of).collect(),
    })
}

/// Runs a full search on a pool of `workers` threads (at least one).
pub fn run_search(cfg: &SearchConfig, mode: SearchMode, workers: usize) -> Result<SearchReport, SearchError> {
    cfg.validate()?;
    let generator = Generator::from_config(&cfg.generator)?;
    let reg = cfg.registry();
    let ev = Evaluator::new(cfg.fingerprint.clone(), &reg, Duration::from_secs_f64(cfg.timeout_secs))
        .map_err(|e| SearchError::Config(e.to_string()))?;
    let cmp = TrajComparator::for_fingerprint(&cfg.fingerprint, &reg)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| SearchError::Pool(e.to_string()))?;
    let mut run = Run {
        cfg,
        ev,
        cmp,
        rng: ChaCha8Rng::seed_from_u64(cfg.seed),
        generator,
        next_birth: 0,
        evaluations: 0,
        curve: Vec::new(),
        best: f64::INFINITY,
        parse_failures: 0,
        failed: 0,
    };
    pool.install(|| match mode {
        SearchMode::Funsearch => funsearch(&mut run),
        SearchMode::Eoh => eoh(&mut run),
    })
}
