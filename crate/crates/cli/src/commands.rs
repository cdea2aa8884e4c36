use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{anyhow, bail, Context};
use serde::{de::DeserializeOwned, Serialize};

use behavesim::baselines::{text_sim, tree_edit_sim};
use behavesim::behave::{breakdown, matrix_to_csv, record_fingerprint, sim_matrix_trajs, FingerprintSet, TrajComparator};
use behavesim::cluster::agglomerate;
use behavesim::expr::parse_sexpr;
use behavesim::search::{run_search, GenError, SearchConfig, SearchError, SearchReport};
use behavesim::trajsim::TrajSimConfig;
use behavesim::types::{AlgorithmSpec, PsTraj, ProblemInstance, Task};
use behavesim::zoo::{self, fixtures};

use crate::{Cli, ClusterMeasure, Command, PairMeasure, TrajMeasure};

const DEFAULT_OUT: &str = "behavesim-out";

/// A failed command and the process exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub error: anyhow::Error,
}

trait ExitExt<T> {
    fn user(self) -> Result<T, Failure>;
}

impl<T, E: Into<anyhow::Error>> ExitExt<T> for Result<T, E> {
    fn user(self) -> Result<T, Failure> {
        self.map_err(|e| Failure { code: 2, error: e.into() })
    }
}

/// Provenance of a run, written before anything is computed.
#[derive(Debug, Serialize)]
struct RunManifest {
    command: String,
    config_path: Option<PathBuf>,
    seed: u64,
    output_dir: PathBuf,
    tool_version: &'static str,
    workers: usize,
    started_unix_secs: u64,
}

fn out_dir(cli: &Cli) -> PathBuf {
    cli.out.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_OUT))
}

fn write_manifest(cli: &Cli, command: &str) -> anyhow::Result<PathBuf> {
    let dir = out_dir(cli);
    fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    let m = RunManifest {
        command: command.to_string(),
        config_path: cli.config.clone(),
        seed: cli.seed.unwrap_or(0),
        output_dir: dir.clone(),
        tool_version: env!("CARGO_PKG_VERSION"),
        workers: cli.workers,
        started_unix_secs: SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs()),
    };
    write_file(&dir.join("manifest.json"), &json(&m))?;
    Ok(dir)
}

fn json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn write_file(path: &Path, text: &str) -> anyhow::Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn read_json<T: DeserializeOwned>(path: &Path) -> anyhow::Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

/// A zoo id, or an S-expression when the text starts with `(`.
fn resolve_algo(text: &str) -> anyhow::Result<AlgorithmSpec> {
    if text.trim_start().starts_with('(') {
        Ok(AlgorithmSpec::dsl(parse_sexpr(text)?))
    } else {
        Ok(AlgorithmSpec::zoo(text)?)
    }
}

fn task_of(spec: &AlgorithmSpec) -> Task {
    match spec.expr() {
        Some(_) => Task::Tsp,
        None => zoo::lookup(&spec.id()).expect("resolved zoo id").task,
    }
}

/// Fingerprint from `--config`, or the default for the task, with the
/// measure override applied.
fn fingerprint(cli: &Cli, spec: &AlgorithmSpec, measure: Option<TrajMeasure>) -> anyhow::Result<FingerprintSet> {
    let mut fp = match &cli.config {
        Some(path) => read_json::<FingerprintSet>(path)?,
        None if spec.expr().is_some() => {
            FingerprintSet::over_instances(fixtures::registry(), &fixtures::tsp12_ids(), TrajSimConfig::default())?
        }
        None => FingerprintSet::for_task(task_of(spec), TrajSimConfig::default()),
    };
    if let Some(m) = measure {
        fp.traj_cfg.measure = m.measure();
    }
    fp.validate()?;
    Ok(fp)
}

pub fn run(cli: &Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::DatasetEval { measures, measure } => dataset_eval(cli, measures, *measure),
        Command::Compare { a, b, measure } => compare(cli, a, b, *measure).user(),
        Command::Cluster {
            algos,
            snapshot,
            measure,
            linkage,
        } => cluster(cli, algos, snapshot.as_deref(), *measure, (*linkage).into()).user(),
        Command::Search { mode } => search(cli, (*mode).into()),
        Command::Traj {
            algo,
            instance,
            instance_file,
            start,
        } => traj(cli, algo, instance.as_deref(), instance_file.as_deref(), start).user(),
        Command::Zoo => {
            print!("{}", json(&zoo::manifest()));
            Ok(())
        }
    }
}

fn fmt_value(v: Option<f64>) -> String {
    v.map_or_else(|| "NA".to_string(), |v| v.to_string())
}

fn dataset_eval(cli: &Cli, measures: &[PairMeasure], traj: TrajMeasure) -> Result<(), Failure> {
    let dir = write_manifest(cli, "dataset-eval").user()?;
    let mut measures = measures.to_vec();
    measures.dedup();
    let cfg = TrajSimConfig::with_measure(traj.measure());
    let mut rows = String::from("type,case,measure,value\n");
    let mut sums: BTreeMap<(String, &str), Vec<f64>> = BTreeMap::new();
    let mut failure = None;
    'pairs: for p in zoo::dataset_pairs() {
        let (a, b) = (AlgorithmSpec::zoo(&p.left).user()?, AlgorithmSpec::zoo(&p.right).user()?);
        for &m in &measures {
            let value = match m {
                PairMeasure::Behave => {
                    let fp = FingerprintSet::for_task(task_of(&a), cfg.clone());
                    match behavesim::behave::behave_sim(&a, &b, &fp, fixtures::registry()) {
                        Ok(v) => Some(v),
                        Err(e) => {
                            failure = Some(anyhow!("{} vs {}: {e}", p.left, p.right));
                            break 'pairs;
                        }
                    }
                }
                PairMeasure::Ngram => Some(text_sim(&a.display_text, &b.display_text).user()?),
                // Only defined between expression trees.
                PairMeasure::TreeEdit => tree_edit_sim(&a, &b).ok(),
            };
            rows.push_str(&format!("{},{},{},{}\n", p.type_tag, p.case_label, m.name(), fmt_value(value)));
            let entry = sums.entry((p.type_tag.to_string(), m.name())).or_default();
            entry.extend(value);
        }
    }
    if let Some(e) = &failure {
        rows.push_str(&format!("# partial: {e}\n"));
    }
    write_file(&dir.join("dataset_pairs.csv"), &rows).user()?;
    let mut means = String::from("type,measure,mean,count\n");
    for t in zoo::PairType::ALL {
        for &m in &measures {
            let v = sums.get(&(t.to_string(), m.name())).cloned().unwrap_or_default();
            let mean = (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64);
            means.push_str(&format!("{t},{},{},{}\n", m.name(), fmt_value(mean), v.len()));
        }
    }
    write_file(&dir.join("dataset_means.csv"), &means).user()?;
    match failure {
        Some(e) => Err(Failure { code: 2, error: e }),
        None => Ok(()),
    }
}

fn compare(cli: &Cli, a: &str, b: &str, measure: Option<TrajMeasure>) -> anyhow::Result<()> {
    if cli.out.is_some() {
        write_manifest(cli, "compare")?;
    }
    let (sa, sb) = (resolve_algo(a)?, resolve_algo(b)?);
    if task_of(&sa) != task_of(&sb) {
        bail!("{a} solves {} but {b} solves {}", task_of(&sa), task_of(&sb));
    }
    let fp = fingerprint(cli, &sa, measure)?;
    let br = breakdown(&sa, &sb, &fp, fixtures::registry())?;
    let out = serde_json::json!({
        "a": sa.id(),
        "b": sb.id(),
        "behave_sim": br.mean,
        "pairs": br.pairs,
    });
    print!("{}", json(&out));
    Ok(())
}

/// Members of a search report, one per birth index.
fn snapshot_members(path: &Path) -> anyhow::Result<(Vec<String>, Vec<AlgorithmSpec>)> {
    let report: SearchReport = read_json(path)?;
    let mut seen = BTreeMap::new();
    for m in report.islands.iter().flatten().chain(&report.population) {
        seen.entry(m.birth).or_insert_with(|| m.expr.clone());
    }
    let mut labels = Vec::new();
    let mut specs = Vec::new();
    for (birth, expr) in seen {
        labels.push(format!("b{birth}"));
        specs.push(AlgorithmSpec::dsl(parse_sexpr(&expr).with_context(|| format!("member b{birth}"))?));
    }
    Ok((labels, specs))
}

fn cluster(
    cli: &Cli,
    algos: &[String],
    snapshot: Option<&Path>,
    measure: ClusterMeasure,
    linkage: behavesim::cluster::Linkage,
) -> anyhow::Result<()> {
    let dir = write_manifest(cli, "cluster")?;
    let (labels, specs) = match snapshot {
        Some(p) => snapshot_members(p)?,
        None => {
            let specs = algos.iter().map(|a| resolve_algo(a)).collect::<anyhow::Result<Vec<_>>>()?;
            (specs.iter().map(AlgorithmSpec::id).collect(), specs)
        }
    };
    if specs.len() < 2 {
        bail!("clustering needs at least 2 algorithms, got {}", specs.len());
    }
    let task = task_of(&specs[0]);
    if let Some(s) = specs.iter().find(|s| task_of(s) != task) {
        bail!("{} does not solve {task}", s.id());
    }
    let matrix = match measure {
        ClusterMeasure::Ngram => {
            let n = specs.len();
            let mut m = vec![vec![1.0; n]; n];
            for i in 0..n {
                for j in i + 1..n {
                    let v = text_sim(&specs[i].display_text, &specs[j].display_text)?;
                    m[i][j] = v;
                    m[j][i] = v;
                }
            }
            m
        }
        other => {
            let traj = match other {
                ClusterMeasure::Dtw => TrajMeasure::Dtw,
                ClusterMeasure::Mean => TrajMeasure::Mean,
                ClusterMeasure::Erp => TrajMeasure::Erp,
                _ => TrajMeasure::Cosine,
            };
            let fp = fingerprint(cli, &specs[0], Some(traj))?;
            let reg = fixtures::registry();
            let cmp = TrajComparator::for_fingerprint(&fp, reg)?;
            let trajs: Vec<Vec<PsTraj>> = specs
                .iter()
                .map(|s| record_fingerprint(s, &fp, reg))
                .collect::<Result<_, _>>()?;
            let views: Vec<&[PsTraj]> = trajs.iter().map(Vec::as_slice).collect();
            sim_matrix_trajs(&views, &cmp)?
        }
    };
    let dendro = agglomerate(&matrix, linkage, &labels)?;
    write_file(&dir.join("similarity.csv"), &matrix_to_csv(&labels, &matrix))?;
    write_file(&dir.join("dendrogram.json"), &json(&dendro))?;
    write_file(&dir.join("tree.nwk"), &format!("{}\n", dendro.to_newick()))?;
    Ok(())
}

fn search(cli: &Cli, mode: behavesim::search::SearchMode) -> Result<(), Failure> {
    let dir = write_manifest(cli, "search").user()?;
    let mut cfg: SearchConfig = match &cli.config {
        Some(p) => read_json(p).user()?,
        None => SearchConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    let report = run_search(&cfg, mode, cli.workers).map_err(|e| Failure {
        code: match e {
            SearchError::Generator(GenError::Unavailable(_)) => 3,
            _ => 2,
        },
        error: e.into(),
    })?;
    write_file(&dir.join("report.json"), &json(&report)).user()?;
    write_file(&dir.join("curve.csv"), &report.curve_csv()).user()?;
    write_file(&dir.join("checkpoints.csv"), &report.checkpoints_csv()).user()?;
    Ok(())
}

fn traj(cli: &Cli, algo: &str, instance: Option<&str>, file: Option<&Path>, start: &str) -> anyhow::Result<()> {
    let dir = write_manifest(cli, "traj")?;
    let spec = resolve_algo(algo)?;
    let inst: ProblemInstance = match (instance, file) {
        (_, Some(p)) => read_json(p)?,
        (Some(id), None) => fixtures::registry()
            .get(id)
            .cloned()
            .ok_or_else(|| anyhow!("unknown instance `{id}`"))?,
        (None, None) => bail!("an instance id or file is required"),
    };
    let sp = inst.start(start).ok_or_else(|| anyhow!("instance {} has no start `{start}`", inst.id))?;
    let t = zoo::run_algorithm(&spec, &inst, sp, cli.seed.unwrap_or(0))?;
    let path = dir.join("traj.jsonl");
    let mut f = std::io::BufWriter::new(fs::File::create(&path).with_context(|| format!("creating {}", path.display()))?);
    writeln!(f, "{}", serde_json::json!({ "meta": t.meta }))?;
    for s in &t.steps {
        writeln!(f, "{}", serde_json::to_string(s)?)?;
    }
    f.flush()?;
    Ok(())
}
