//! Command-line surface: dataset generation, model training, explanation,
//! stability runs, and the full benchmark grid.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use dlime::clustering::{agglomerate, cut_largest_gap, Dendrogram, FlatClustering};
use dlime::data::{load_csv, train_test_split, CsvSchema, Dataset, SplitSpec, SPEC_VERSION};
use dlime::error::{DlimeError, Result};
use dlime::explainers::{dlime_explain, lime_explain, DlimeConfig, Explanation, LimeConfig};
use dlime::models::{
    majority_class_baseline, train_mlp, train_random_forest, ExternalModel, MlpConfig, ModelFile,
    ModelMetrics, OpaqueModel, RandomForestConfig,
};
use dlime::rng::CounterRng;
use dlime::stability::run_stability;
use dlime::{datagen, report};

const TRAIN_FRACTION: f64 = 0.8;
const DEFAULT_ITERATIONS: usize = 10;

#[derive(Parser)]
#[command(name = "dlime", version, about = "Deterministic local explanations for tabular binary classifiers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the three bundled example datasets as CSV files.
    Datasets {
        #[arg(long, default_value = "data")]
        out: PathBuf,
    },
    /// Train an opaque model on an 80/20 split and write model.json.
    Train(TrainArgs),
    /// Explain one test instance; writes explanation.json and explanation.svg.
    Explain(ExplainArgs),
    /// Repeat one explanation and report pairwise Jaccard distances.
    Stability(StabilityArgs),
    /// Run the full dataset x model x method grid.
    Benchmark(BenchmarkArgs),
    /// Cluster the training rows; writes dendrogram.json and dendrogram.svg.
    Cluster(ClusterArgs),
}

#[derive(Args, Clone)]
struct DataArgs {
    /// Input CSV (header row required).
    #[arg(long)]
    data: PathBuf,
    /// Header name of the label column.
    #[arg(long, default_value = "class")]
    label_col: String,
    /// Comma-separated header names excluded from the feature matrix.
    #[arg(long, value_delimiter = ',')]
    id_cols: Vec<String>,
    /// Comma-separated cell values treated as missing.
    #[arg(long, value_delimiter = ',', default_values_t = ["?".to_string(), String::new(), "NA".to_string()])]
    missing: Vec<String>,
}

impl DataArgs {
    fn schema(&self) -> CsvSchema {
        CsvSchema {
            label_col: self.label_col.clone(),
            id_cols: self.id_cols.clone(),
            missing_tokens: self.missing.clone(),
        }
    }

    fn load(&self) -> Result<Dataset> {
        // Known bundled datasets get their id columns filled in automatically.
        let mut schema = self.schema();
        if self.id_cols.is_empty() {
            if let Some(stem) = self.data.file_stem().and_then(|s| s.to_str()) {
                if let Some(known) = datagen::schema_for(stem) {
                    if self.label_col == "class" {
                        schema = known;
                    }
                }
            }
        }
        load_csv(&self.data, &schema)
    }
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum ModelKind {
    Rf,
    Mlp,
    External,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Method {
    Dlime,
    Lime,
}

#[derive(Args)]
struct TrainArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long, value_enum)]
    model: ModelKind,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Args)]
struct ExplainArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long, value_enum)]
    model: ModelKind,
    /// Command line for an external model process.
    #[arg(long)]
    model_cmd: Option<String>,
    #[arg(long, value_enum)]
    method: Method,
    #[arg(long, default_value_t = 5)]
    k_features: usize,
    #[arg(long, default_value_t = 1)]
    k_neighbors: usize,
    /// Test-row index, or 'random' for a seeded pick.
    #[arg(long, default_value = "random")]
    instance: String,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Args)]
struct StabilityArgs {
    #[command(flatten)]
    explain: ExplainArgs,
    #[arg(long, default_value_t = DEFAULT_ITERATIONS)]
    iterations: usize,
}

#[derive(Args)]
struct BenchmarkArgs {
    /// Directory holding the dataset CSVs; generated there when absent.
    #[arg(long, default_value = "data")]
    data_dir: PathBuf,
    /// Comma-separated subset of {breast_cancer, liver, hepatitis}.
    #[arg(long, value_delimiter = ',')]
    datasets: Vec<String>,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_ITERATIONS)]
    iterations: usize,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Args)]
struct ClusterArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Datasets { out } => {
            for path in datagen::write_all(&out)? {
                println!("wrote {}", path.display());
            }
            Ok(())
        }
        Command::Train(args) => cmd_train(&args),
        Command::Explain(args) => cmd_explain(&args).map(|_| ()),
        Command::Stability(args) => cmd_stability(&args),
        Command::Benchmark(args) => cmd_benchmark(&args),
        Command::Cluster(args) => cmd_cluster(&args),
    }
}

fn write_json(path: &Path, value: &serde_json::Value) -> Result<()> {
    std::fs::create_dir_all(path.parent().unwrap_or(Path::new(".")))?;
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text)?;
    println!("wrote {}", path.display());
    Ok(())
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::create_dir_all(path.parent().unwrap_or(Path::new(".")))?;
    std::fs::write(path, text)?;
    println!("wrote {}", path.display());
    Ok(())
}

fn split(dataset: &Dataset, seed: u64) -> Result<(Dataset, Dataset)> {
    train_test_split(
        dataset,
        &SplitSpec {
            train_fraction: TRAIN_FRACTION,
            seed,
        },
    )
}

fn train_builtin(kind: ModelKind, train: &Dataset, seed: u64) -> Result<OpaqueModel> {
    match kind {
        ModelKind::Rf => Ok(OpaqueModel::Forest(train_random_forest(
            train,
            &RandomForestConfig {
                seed,
                ..Default::default()
            },
        )?)),
        ModelKind::Mlp => Ok(OpaqueModel::Mlp(train_mlp(
            train,
            &MlpConfig {
                seed,
                ..Default::default()
            },
        )?)),
        ModelKind::External => Err(DlimeError::Usage(
            "external models are not trained here; pass --model-cmd to explain/stability".into(),
        )),
    }
}

fn cmd_train(args: &TrainArgs) -> Result<()> {
    let dataset = args.data.load()?;
    let (train, test) = split(&dataset, args.seed)?;
    let model = train_builtin(args.model, &train, args.seed)?;
    let metrics = ModelMetrics {
        train_accuracy: model.accuracy(&train)?,
        test_accuracy: model.accuracy(&test)?,
        majority_class_baseline: majority_class_baseline(&test),
    };
    println!(
        "{}: train accuracy {:.4}, test accuracy {:.4} (majority baseline {:.4})",
        model.kind(),
        metrics.train_accuracy,
        metrics.test_accuracy,
        metrics.majority_class_baseline
    );
    let file = ModelFile::from_model(&model, &train, metrics)?;
    write_json(&args.out.join("model.json"), &serde_json::to_value(&file)?)
}

struct ExplainSetup {
    dataset_name: String,
    train: Dataset,
    model: OpaqueModel,
    clustering: Option<FlatClustering>,
    dendrogram: Option<Dendrogram>,
    instance: Vec<f64>,
    instance_id: String,
}

fn setup_explain(args: &ExplainArgs) -> Result<ExplainSetup> {
    let dataset = args.data.load()?;
    let (train, test) = split(&dataset, args.seed)?;
    let model = match args.model {
        ModelKind::External => {
            let cmd = args.model_cmd.as_deref().ok_or_else(|| {
                DlimeError::Usage("--model external requires --model-cmd".into())
            })?;
            OpaqueModel::External(ExternalModel::spawn(cmd, train.n_features())?)
        }
        kind => train_builtin(kind, &train, args.seed)?,
    };

    let (instance_index, instance_id) = match args.instance.as_str() {
        "random" => {
            // Instance picks draw from a stream separate from the split's.
            let mut rng = CounterRng::new(args.seed).stream(0x1257);
            let i = rng.range_usize(test.n_rows());
            (i, format!("test:{i}"))
        }
        s => {
            let i: usize = s.parse().map_err(|_| {
                DlimeError::Usage(format!("--instance must be an index or 'random', got '{s}'"))
            })?;
            if i >= test.n_rows() {
                return Err(DlimeError::Data(format!(
                    "instance index {i} out of range; test split has {} rows",
                    test.n_rows()
                )));
            }
            (i, format!("test:{i}"))
        }
    };
    let instance = test.rows[instance_index].clone();

    let (clustering, dendrogram) = if args.method == Method::Dlime {
        let dend = agglomerate(&train.rows)?;
        let flat = cut_largest_gap(&dend, DlimeConfig::default().max_clusters)?;
        (Some(flat), Some(dend))
    } else {
        (None, None)
    };

    Ok(ExplainSetup {
        dataset_name: dataset.name,
        train,
        model,
        clustering,
        dendrogram,
        instance,
        instance_id,
    })
}

fn explain_once(setup: &ExplainSetup, args: &ExplainArgs, seed: u64) -> Result<Explanation> {
    match args.method {
        Method::Dlime => dlime_explain(
            &setup.train,
            &setup.model,
            &setup.instance,
            &DlimeConfig {
                k_neighbors: args.k_neighbors,
                k_features: args.k_features,
                ..Default::default()
            },
            setup.clustering.as_ref().expect("clustering built for dlime"),
            &setup.instance_id,
        ),
        Method::Lime => lime_explain(
            &setup.train,
            &setup.model,
            &setup.instance,
            &LimeConfig {
                k_features: args.k_features,
                seed,
                ..Default::default()
            },
            &setup.instance_id,
        ),
    }
}

fn cmd_explain(args: &ExplainArgs) -> Result<Explanation> {
    let setup = setup_explain(args)?;
    let explanation = explain_once(&setup, args, args.seed)?;
    write_json(&args.out.join("explanation.json"), &explanation.to_json())?;
    write_text(
        &args.out.join("explanation.svg"),
        &report::explanation_bar_chart(&explanation),
    )?;
    if let Some(dend) = &setup.dendrogram {
        write_json(&args.out.join("dendrogram.json"), &dend.to_json())?;
        write_text(&args.out.join("dendrogram.svg"), &report::dendrogram_svg(dend))?;
    }
    Ok(explanation)
}

fn cmd_stability(args: &StabilityArgs) -> Result<()> {
    if args.iterations < 2 {
        return Err(DlimeError::Usage("--iterations must be at least 2".into()));
    }
    let setup = setup_explain(&args.explain)?;
    let method = match args.explain.method {
        Method::Dlime => "dlime",
        Method::Lime => "lime",
    };
    let base_seed = args.explain.seed;
    let report_data = run_stability(
        |iteration| explain_once(&setup, &args.explain, base_seed + iteration as u64),
        method,
        &setup.dataset_name,
        setup.model.kind(),
        args.iterations,
    )?;
    println!(
        "average J_distance = {}%",
        format_percent(report_data.average_distance)
    );
    write_json(&args.explain.out.join("stability.json"), &report_data.to_json())?;
    write_text(
        &args.explain.out.join("stability.svg"),
        &report::stability_heatmap(&report_data),
    )
}

fn format_percent(v: f64) -> String {
    if v == 0.0 {
        "0".to_string()
    } else {
        format!("{:.2}", v * 100.0)
    }
}

fn cmd_benchmark(args: &BenchmarkArgs) -> Result<()> {
    let all = ["breast_cancer", "liver", "hepatitis"];
    let wanted: Vec<&str> = if args.datasets.is_empty() {
        all.to_vec()
    } else {
        let unknown: Vec<&String> = args
            .datasets
            .iter()
            .filter(|d| !all.contains(&d.as_str()))
            .collect();
        if !unknown.is_empty() {
            return Err(DlimeError::Usage(format!(
                "unknown datasets {unknown:?}; choose from {all:?}"
            )));
        }
        all.iter().copied().filter(|d| args.datasets.iter().any(|w| w == d)).collect()
    };

    if !args.data_dir.join("breast_cancer.csv").exists() {
        datagen::write_all(&args.data_dir)?;
    }

    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for dataset_name in &wanted {
        let data_args = DataArgs {
            data: args.data_dir.join(format!("{dataset_name}.csv")),
            label_col: "class".into(),
            id_cols: Vec::new(),
            missing: vec!["?".into(), String::new(), "NA".into()],
        };
        for model in [ModelKind::Rf, ModelKind::Mlp] {
            let model_name = match model {
                ModelKind::Rf => "rf",
                ModelKind::Mlp => "mlp",
                ModelKind::External => unreachable!(),
            };
            let mut cell = serde_json::Map::new();
            cell.insert("dataset".into(), (*dataset_name).into());
            cell.insert("model".into(), model_name.into());
            for method in [Method::Dlime, Method::Lime] {
                let method_name = match method {
                    Method::Dlime => "dlime",
                    Method::Lime => "lime",
                };
                let explain_args = ExplainArgs {
                    data: data_args.clone(),
                    model,
                    model_cmd: None,
                    method,
                    k_features: 5,
                    k_neighbors: 1,
                    instance: "random".into(),
                    seed: args.seed,
                    out: args.out.clone(),
                };
                let result = setup_explain(&explain_args).and_then(|setup| {
                    run_stability(
                        |iteration| {
                            explain_once(&setup, &explain_args, args.seed + iteration as u64)
                        },
                        method_name,
                        dataset_name,
                        model_name,
                        args.iterations,
                    )
                });
                match result {
                    Ok(rep) => {
                        cell.insert(
                            format!("{method_name}_avg_j_distance"),
                            rep.average_distance.into(),
                        );
                    }
                    Err(e) => {
                        let msg = format!("{dataset_name}/{model_name}/{method_name}: {e}");
                        eprintln!("cell failed: {msg}");
                        failures.push(msg);
                        cell.insert(format!("{method_name}_avg_j_distance"), serde_json::Value::Null);
                    }
                }
            }
            rows.push(serde_json::Value::Object(cell));
        }
    }

    let json = serde_json::json!({
        "spec_version": SPEC_VERSION,
        "seed": args.seed,
        "iterations": args.iterations,
        "rows": rows,
        "failures": failures,
    });
    write_json(&args.out.join("benchmark.json"), &json)?;

    let mut md = String::from(
        "| Dataset | Opaque Model | DLIME avg J_distance | LIME avg J_distance |\n|---|---|---|---|\n",
    );
    for row in &rows {
        let get = |key: &str| {
            row.get(key)
                .and_then(|v| v.as_f64())
                .map(|v| format!("{}%", format_percent(v)))
                .unwrap_or_else(|| "failed".to_string())
        };
        md.push_str(&format!(
            "| {} | {} | {} | {} |\n",
            row["dataset"].as_str().unwrap(),
            row["model"].as_str().unwrap().to_uppercase(),
            get("dlime_avg_j_distance"),
            get("lime_avg_j_distance"),
        ));
    }
    write_text(&args.out.join("benchmark.md"), &md)?;
    for row in &rows {
        println!(
            "{} / {}: dlime {} lime {}",
            row["dataset"].as_str().unwrap(),
            row["model"].as_str().unwrap(),
            row["dlime_avg_j_distance"],
            row["lime_avg_j_distance"],
        );
    }
    Ok(())
}

fn cmd_cluster(args: &ClusterArgs) -> Result<()> {
    let dataset = args.data.load()?;
    let (train, _) = split(&dataset, args.seed)?;
    let dend = agglomerate(&train.rows)?;
    let flat = cut_largest_gap(&dend, 10)?;
    println!(
        "largest-gap cut: C = {} (cluster sizes {:?})",
        flat.n_clusters,
        flat.cluster_sizes()
    );
    write_json(&args.out.join("dendrogram.json"), &dend.to_json())?;
    write_text(&args.out.join("dendrogram.svg"), &report::dendrogram_svg(&dend))
}
