use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Duration;

use askless_core::dataset::Dataset;
use askless_core::inference::query;
use askless_core::learning::{fit_mle, hill_climb, HillClimbConfig};
use askless_core::reduction::{find_k, FindKConfig, KEvaluator, NetworkEvaluator};
use askless_core::survey::{
    default_generator_config, default_network, default_schema, generate_synthetic, load_schema,
    read_csv, write_csv, GeneratorConfig,
};
use askless_core::{rng, BayesianNetwork, Engine, Evidence, SurveySchema};
use askless_service::{ServiceConfig, SurveyService};
use log::info;
use rand::seq::SliceRandom;
use serde::Serialize;

use crate::args::{
    Cli, Command, EvaluateArgs, FindKArgs, GenerateArgs, LearnArgs, PredictArgs, ServeArgs,
};

#[derive(Debug)]
pub enum CliError {
    /// Bad flag values; exit code 1.
    Usage(String),
    /// Unreadable or invalid inputs, failed model operations; exit code 2.
    Data(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Data(m) => f.write_str(m),
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Wraps a data error with the file it came from.
fn data<E: fmt::Display>(path: &Path) -> impl FnOnce(E) -> CliError + '_ {
    move |e| CliError::Data(format!("{}: {e}", path.display()))
}

pub fn run(cli: Cli) -> Result<()> {
    let seed = cli.seed;
    match cli.command {
        Command::Generate(a) => generate(a, seed),
        Command::Learn(a) => learn(a, seed.unwrap_or(0)),
        Command::FindK(a) => find_k_cmd(a, seed.unwrap_or(0)),
        Command::Evaluate(a) => evaluate(a, seed.unwrap_or(0)),
        Command::Predict(a) => predict(a, seed.unwrap_or(0)),
        Command::Serve(a) => serve(a, seed),
    }
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(data(path))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(data(path))
}

fn schema_arg(spec: &str) -> Result<SurveySchema> {
    if spec == "default" {
        return Ok(default_schema());
    }
    let path = Path::new(spec);
    load_schema(&read_text(path)?).map_err(data(path))
}

/// `default` loads the bundled network.
fn load_network(path: &Path) -> Result<BayesianNetwork> {
    if path == Path::new("default") {
        return Ok(default_network());
    }
    BayesianNetwork::from_json(&read_text(path)?).map_err(data(path))
}

fn check_samples(samples: usize) -> Result<()> {
    if samples == 0 {
        return Err(usage("--samples must be at least 1"));
    }
    Ok(())
}

fn generate(a: GenerateArgs, seed: Option<u64>) -> Result<()> {
    let schema = schema_arg(&a.schema)?;
    let mut config = match &a.config {
        Some(path) => GeneratorConfig::from_json(&read_text(path)?).map_err(data(path))?,
        None => default_generator_config(),
    };
    if let Some(rows) = a.rows {
        config.rows = rows;
    }
    if let Some(s) = seed {
        config.seed = s;
    }
    let dataset =
        generate_synthetic(&schema, &config).map_err(|e| CliError::Data(e.to_string()))?;
    write_csv(&a.out, &dataset).map_err(data(&a.out))?;
    info!("wrote {} respondents to {}", dataset.len(), a.out.display());
    Ok(())
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct Partition {
    data: String,
    seed: u64,
    split: f64,
    rows: usize,
    train: Vec<usize>,
    holdout: Vec<usize>,
}

/// `net.json` -> `net.split.json`
fn partition_path(out: &Path) -> PathBuf {
    let stem = out
        .file_stem()
        .map_or("network".into(), |s| s.to_string_lossy().into_owned());
    out.with_file_name(format!("{stem}.split.json"))
}

/// Shuffles row indices with the seed and cuts at `split`. Both halves are
/// returned in ascending order.
fn split_rows(n: usize, split: f64, seed: u64) -> (Vec<usize>, Vec<usize>) {
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut rng::seeded(seed));
    let cut = ((n as f64) * split).round() as usize;
    let (mut train, mut holdout) = (idx[..cut].to_vec(), idx[cut..].to_vec());
    train.sort_unstable();
    holdout.sort_unstable();
    (train, holdout)
}

fn learn(a: LearnArgs, seed: u64) -> Result<()> {
    if !(a.split > 0.0 && a.split <= 1.0) {
        return Err(usage(format!("--split {} must be in (0, 1]", a.split)));
    }
    if !(a.alpha >= 0.0 && a.alpha.is_finite()) {
        return Err(usage(format!(
            "--alpha {} must be a non-negative number",
            a.alpha
        )));
    }
    if a.max_parents == 0 {
        return Err(usage("--max-parents must be at least 1"));
    }
    let schema = schema_arg(&a.schema)?;
    let dataset = read_csv(&a.data, &schema, true).map_err(data(&a.data))?;
    let (train_rows, holdout_rows) = split_rows(dataset.len(), a.split, seed);
    if train_rows.is_empty() {
        return Err(CliError::Data(format!(
            "{}: no rows to learn from",
            a.data.display()
        )));
    }
    let train = dataset.subset(&train_rows);
    let config = HillClimbConfig {
        criterion: a.score,
        max_parents: a.max_parents,
        restarts: a.restarts,
        seed,
        ..Default::default()
    };
    let dag = hill_climb(&train, &config).map_err(|e| CliError::Data(e.to_string()))?;
    let bn = fit_mle(&dag, &train, a.alpha).map_err(|e| CliError::Data(e.to_string()))?;
    info!(
        "learned {} edges, {} free parameters from {} rows",
        dag.edge_count(),
        bn.free_parameters(),
        train.len()
    );
    write_text(&a.out, &bn.to_json())?;

    let partition = Partition {
        data: a.data.display().to_string(),
        seed,
        split: a.split,
        rows: dataset.len(),
        train: train_rows,
        holdout: holdout_rows.clone(),
    };
    let partition_file = partition_path(&a.out);
    write_text(
        &partition_file,
        &(serde_json::to_string(&partition).expect("partition serializes") + "\n"),
    )?;
    if let Some(path) = &a.holdout {
        write_csv(path, &dataset.subset(&holdout_rows)).map_err(data(path))?;
    }
    info!("wrote {} and {}", a.out.display(), partition_file.display());
    Ok(())
}

fn test_set(path: &Path, bn: &BayesianNetwork) -> Result<Dataset> {
    read_csv(path, bn.schema(), true).map_err(data(path))
}

fn find_k_cmd(a: FindKArgs, seed: u64) -> Result<()> {
    check_samples(a.inference.samples)?;
    let bn = load_network(&a.net)?;
    let test = test_set(&a.test, &bn)?;
    let mut config = FindKConfig::for_schema(bn.schema());
    config.grid = a.grid;
    config.threshold = a.threshold;
    config.mode = a.mode;
    config.engine = a.inference.engine.unwrap_or(Engine::LikelihoodWeighting);
    config.n_samples = a.inference.samples;
    config.seed = seed;
    if let Some(pool) = a.pool {
        config.question_pool = pool;
    }
    config
        .validate(bn.schema())
        .map_err(|e| usage(e.to_string()))?;
    let report = find_k(&bn, &test, &config).map_err(|e| CliError::Data(e.to_string()))?;
    print!("{}", report.render_table());
    if let Some(out) = &a.out {
        write_text(out, &(report.to_json() + "\n"))?;
    }
    Ok(())
}

fn evaluate(a: EvaluateArgs, seed: u64) -> Result<()> {
    check_samples(a.inference.samples)?;
    let bn = load_network(&a.net)?;
    let test = test_set(&a.test, &bn)?;
    let mut config = FindKConfig::for_schema(bn.schema());
    let k = a.k.unwrap_or(config.question_pool.len());
    config.grid = vec![k];
    config.engine = a.inference.engine.unwrap_or(Engine::Exact);
    config.n_samples = a.inference.samples;
    config.seed = seed;
    config
        .validate(bn.schema())
        .map_err(|e| usage(e.to_string()))?;
    let evaluator =
        NetworkEvaluator::new(&bn, &test, &config).map_err(|e| CliError::Data(e.to_string()))?;
    let report = evaluator
        .evaluate_k(k)
        .map_err(|e| CliError::Data(e.to_string()))?;
    print!(
        "{}",
        report.render_table(&format!("Accuracy metrics for k={k}"))
    );
    if let Some(out) = &a.out {
        let json = serde_json::to_string_pretty(&report).expect("report serializes");
        write_text(out, &(json + "\n"))?;
    }
    Ok(())
}

fn parse_evidence(arg: &str, bn: &BayesianNetwork) -> Result<Evidence> {
    let (text, origin) = if arg.trim_start().starts_with('{') {
        (arg.to_string(), "--evidence".to_string())
    } else {
        let path = Path::new(arg);
        (read_text(path)?, path.display().to_string())
    };
    let answers: BTreeMap<String, String> =
        serde_json::from_str(&text).map_err(|e| CliError::Data(format!("{origin}: {e}")))?;
    Evidence::from_labels(
        bn.schema(),
        answers.iter().map(|(q, l)| (q.as_str(), l.as_str())),
    )
    .map_err(|e| CliError::Data(format!("{origin}: {e}")))
}

fn predict(a: PredictArgs, seed: u64) -> Result<()> {
    check_samples(a.inference.samples)?;
    let bn = load_network(&a.net)?;
    let evidence = parse_evidence(&a.evidence, &bn)?;
    let engine = a.inference.engine.unwrap_or(Engine::Exact);
    let target = bn.schema().label_index();
    let posterior = query(&bn, target, &evidence, engine, a.inference.samples, seed)
        .map_err(|e| CliError::Data(e.to_string()))?;
    if a.json {
        println!(
            "{}",
            serde_json::to_string_pretty(&posterior).expect("posterior serializes")
        );
    } else {
        println!("{}", posterior.argmax_label());
    }
    Ok(())
}

fn serve(a: ServeArgs, seed: Option<u64>) -> Result<()> {
    check_samples(a.inference.samples)?;
    if !(a.ttl_hours > 0.0 && a.ttl_hours.is_finite()) {
        return Err(usage(format!(
            "--ttl-hours {} must be positive",
            a.ttl_hours
        )));
    }
    let addr: SocketAddr = format!("{}:{}", a.host, a.port)
        .parse()
        .map_err(|e| usage(format!("--host {}: {e}", a.host)))?;
    let bn = load_network(&a.net)?;
    let config = ServiceConfig {
        engine: a.inference.engine.unwrap_or(Engine::Exact),
        n_samples: a.inference.samples,
        ttl: Duration::from_secs_f64(a.ttl_hours * 3600.0),
        default_k: a.k,
        seed,
    };
    let service = SurveyService::new(bn, config).map_err(|e| usage(e.to_string()))?;
    let runtime = tokio::runtime::Runtime::new().map_err(|e| CliError::Data(e.to_string()))?;
    runtime
        .block_on(askless_service::serve(Arc::new(service), addr))
        .map_err(|e| CliError::Data(format!("{addr}: {e}")))
}
