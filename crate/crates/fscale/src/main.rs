use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use fscale::experiments::{self, ExperimentConfig, Method, ResultRow};
use fscale::io::{self, ModelFile};
use fscale::par::Rayon;
use fscale::report::{ModelSummary, Report};
use fscale::synth::{generate, PlantedRule, SynthConfig};
use fscale_core::baselines::{LrcqModel, LrcqParams, LrcqVariant};
use fscale_core::engine::{run, SimMode};
use fscale_core::pipeline::{learn, LearnConfig};
use fscale_core::{CascadeState, SimConfig};

#[derive(Parser)]
#[command(name = "fscale", version, about = "Local-behavior cascade prediction")]
struct Cli {
    /// Worker threads for parallel stages (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic data directory.
    Synth(SynthArgs),
    /// Learn a model from a data directory.
    Train(TrainArgs),
    /// Predict the continuation of one cascade.
    Simulate(SimulateArgs),
    /// Run an experiment over a data directory.
    Evaluate(EvaluateArgs),
    /// Pivot a results file into tables.
    Report(ReportArgs),
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long, default_value_t = 1000)]
    nodes: usize,
    #[arg(long, default_value_t = 200)]
    messages: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Use the threshold rule "activate once THETA followees are active".
    #[arg(long)]
    theta: Option<usize>,
    /// Accounts active at each message's origin.
    #[arg(long, default_value_t = 1)]
    roots: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum TrainMethod {
    Fscalecp,
    Lrcq1,
    Lrcq2,
}

#[derive(Args)]
struct TrainArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long, value_enum, default_value = "fscalecp")]
    method: TrainMethod,
    #[arg(long, default_value_t = 10)]
    folds: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Cap on training instances per class after balancing; 0 for none.
    #[arg(long, default_value_t = 2000)]
    max_per_class: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Deterministic,
    Bernoulli,
}

#[derive(Args)]
struct SimArgs {
    /// Seconds advanced by a step that updates the whole frontier.
    #[arg(long, default_value_t = 300.0)]
    delta_t: f64,
    /// Prediction window after the newest observed event, seconds.
    #[arg(long, default_value_t = 432_000.0)]
    horizon: f64,
    #[arg(long, value_enum, default_value = "deterministic")]
    mode: Mode,
    /// Quiet steps before the run may stop early.
    #[arg(long, default_value_t = 3)]
    patience: usize,
}

impl SimArgs {
    fn config(&self, seed: u64) -> SimConfig {
        SimConfig {
            delta_t: self.delta_t,
            horizon: self.horizon,
            seed,
            mode: match self.mode {
                Mode::Deterministic => SimMode::Deterministic,
                Mode::Bernoulli => SimMode::Bernoulli,
            },
            patience: self.patience,
        }
    }
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    model: PathBuf,
    /// Message id of the cascade to continue.
    #[arg(long)]
    cascade: String,
    #[arg(long, default_value_t = 0.1)]
    observe_frac: f64,
    #[command(flatten)]
    sim: SimArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Predicted activations, in the cascade file format.
    #[arg(long)]
    out: PathBuf,
    /// Optional per-step CSV trace.
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Experiment {
    States,
    Process,
    Size,
    Estimation,
}

#[derive(Args)]
struct EvaluateArgs {
    #[arg(long)]
    data: PathBuf,
    /// Comma-separated model files.
    #[arg(long, value_delimiter = ',', required = true)]
    models: Vec<PathBuf>,
    #[arg(long, value_enum)]
    experiment: Experiment,
    #[arg(long, value_delimiter = ',', default_value = "0.05,0.1,0.15,0.2")]
    fractions: Vec<f64>,
    /// Minimum final sizes of the cascade groups.
    #[arg(long, value_delimiter = ',', default_value = "50,100,200")]
    groups: Vec<usize>,
    #[arg(long, default_value_t = 30)]
    per_group: usize,
    #[command(flatten)]
    sim: SimArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Folds for the estimation experiment.
    #[arg(long, default_value_t = 10)]
    folds: usize,
    /// Instance cap per class for the estimation experiment; 0 for none.
    #[arg(long, default_value_t = 2000)]
    max_per_class: usize,
    #[arg(long)]
    out: PathBuf,
    /// JSON summary; defaults to the results path with a `.json` extension.
    #[arg(long)]
    summary: Option<PathBuf>,
}

#[derive(Args)]
struct ReportArgs {
    #[arg(long)]
    results: PathBuf,
    /// A trained model whose feature weights and mechanism measure to add.
    #[arg(long)]
    model: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run_cli(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &anyhow::Error) -> u8 {
    for cause in e.chain() {
        if let Some(err) = cause.downcast_ref::<fscale::Error>() {
            if err.is_dimension_mismatch() {
                return 4;
            }
            if let fscale::Error::Core(fscale_core::Error::InvalidParameter(_)) = err {
                return 2;
            }
            if err.is_data_error() {
                return 3;
            }
            return 1;
        }
        if let Some(err) = cause.downcast_ref::<fscale_core::Error>() {
            return match err {
                fscale_core::Error::DimensionMismatch { .. } => 4,
                fscale_core::Error::InvalidParameter(_) => 2,
                _ => 3,
            };
        }
    }
    1
}

fn run_cli(cli: Cli) -> anyhow::Result<()> {
    if let Some(k) = cli.threads {
        if k == 0 {
            return Err(fscale_core::Error::InvalidParameter("--threads must be positive".into()).into());
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build_global()
            .context("starting worker pool")?;
    }
    match cli.command {
        Command::Synth(a) => synth(a),
        Command::Train(a) => train(a),
        Command::Simulate(a) => simulate(a),
        Command::Evaluate(a) => evaluate(a),
        Command::Report(a) => report(a),
    }
}

fn cap(n: usize) -> Option<usize> {
    (n > 0).then_some(n)
}

fn synth(a: SynthArgs) -> anyhow::Result<()> {
    let mut cfg = SynthConfig {
        nodes: a.nodes,
        messages: a.messages,
        seed: a.seed,
        roots: a.roots,
        ..SynthConfig::default()
    };
    if let Some(theta) = a.theta {
        cfg.rule = PlantedRule::Threshold { theta };
    }
    let data = generate(&cfg)?;
    io::write_dataset(&a.out, &data)?;
    let m = &data.manifest;
    println!(
        "wrote {}: {} nodes, {} edges, {} messages, {} activations",
        a.out.display(),
        m.nodes,
        m.edges,
        m.messages,
        m.events
    );
    Ok(())
}

fn train(a: TrainArgs) -> anyhow::Result<()> {
    let data = io::read_dataset(&a.data)?;
    let model = match a.method {
        TrainMethod::Fscalecp => {
            let cfg = LearnConfig {
                seed: a.seed,
                folds: a.folds,
                max_per_class: cap(a.max_per_class),
                ..LearnConfig::default()
            };
            let m = learn(data.env(), &cfg, &Rayon)?;
            print_model(&m);
            ModelFile::Fscalecp(m)
        }
        TrainMethod::Lrcq1 | TrainMethod::Lrcq2 => {
            let variant = match a.method {
                TrainMethod::Lrcq1 => LrcqVariant::Q1,
                _ => LrcqVariant::Q2,
            };
            let m = LrcqModel::train(
                data.env(),
                variant,
                LrcqParams::default(),
                a.seed,
                a.folds,
                cap(a.max_per_class),
                &Rayon,
            )?;
            println!("{} instances, cv accuracy {:.4}", m.instances, m.cv_accuracy);
            match variant {
                LrcqVariant::Q1 => ModelFile::Lrcq1(m),
                LrcqVariant::Q2 => ModelFile::Lrcq2(m),
            }
        }
    };
    io::ensure_parent(&a.out)?;
    io::write_json(&a.out, &model)?;
    println!("wrote {} model to {}", model.name(), a.out.display());
    Ok(())
}

fn print_model(m: &fscale_core::pipeline::TrainedModel) {
    let s = ModelSummary::new(m);
    println!("{:<10} {:>11}", "classifier", "cv-accuracy");
    for (k, acc) in &s.candidates {
        let mark = if *k == s.classifier { "*" } else { "" };
        println!("{:<10} {:>11.4}{mark}", k, acc);
    }
    println!();
    println!("{} features selected, cv accuracy {:.4}", s.features.len(), s.cv_accuracy);
    println!("{:<12} {:<9} {:>8}", "feature", "mechanism", "weight");
    for f in &s.features {
        println!("{:<12} {:<9} {:>8.4}", f.feature, f.mechanism, f.weight);
    }
    println!();
    let w: Vec<String> = s.mechanisms.iter().map(|(k, v)| format!("{k} {v:.5}")).collect();
    println!("mechanism measure: {}", w.join("  "));
}

fn simulate(a: SimulateArgs) -> anyhow::Result<()> {
    let data = io::read_dataset(&a.data)?;
    let model = ModelFile::load(&a.model)?;
    let i = data.cascade_index(&a.cascade)?;
    let observed = CascadeState::observe_fraction(&data.graph, &data.corpus.cascades[i], a.observe_frac)?;
    let out = run(
        data.env(),
        &observed,
        &data.corpus.messages[i],
        &model,
        &a.sim.config(a.seed),
        &Rayon,
    )?;
    io::ensure_parent(&a.out)?;
    io::write_cascades(&a.out, &data.graph, [&out.state.cascade])?;
    if let Some(t) = &a.trace {
        io::ensure_parent(t)?;
        io::write_trace(t, &out.trace)?;
    }
    println!(
        "{}: {} observed, {} predicted after {} steps ({:?})",
        a.cascade,
        observed.activated_count(),
        out.state.activated_count(),
        out.trace.len(),
        out.stop
    );
    Ok(())
}

fn method_names(models: &[ModelFile]) -> Vec<String> {
    let mut names: Vec<String> = Vec::new();
    for m in models {
        let base = m.name().to_string();
        let n = names.iter().filter(|x| x.split('#').next() == Some(&base)).count();
        names.push(if n == 0 { base } else { format!("{base}#{}", n + 1) });
    }
    names
}

fn evaluate(a: EvaluateArgs) -> anyhow::Result<()> {
    let data = io::read_dataset(&a.data)?;
    let models = a
        .models
        .iter()
        .map(|p| ModelFile::load(p).with_context(|| format!("loading {}", p.display())))
        .collect::<anyhow::Result<Vec<_>>>()?;
    let names = method_names(&models);
    let cfg = ExperimentConfig {
        fractions: a.fractions.clone(),
        groups: a.groups.clone(),
        per_group: a.per_group,
        sim: a.sim.config(a.seed),
        seed: a.seed,
        ..ExperimentConfig::default()
    };
    let methods: Vec<Method<'_>> = models
        .iter()
        .zip(&names)
        .map(|(m, n)| Method {
            name: n.clone(),
            model: m,
        })
        .collect();
    let rows = match a.experiment {
        Experiment::States => experiments::contagion_states(&data, &methods, &cfg)?,
        Experiment::Process => experiments::cascade_process(&data, &methods, &cfg)?,
        Experiment::Size => experiments::size_prediction(&data, &methods, &cfg)?,
        Experiment::Estimation => {
            let Some(main) = models.iter().find_map(|m| match m {
                ModelFile::Fscalecp(t) => Some(t),
                _ => None,
            }) else {
                bail!("the estimation experiment needs an FScaleCP model");
            };
            let baselines: Vec<(&str, &LrcqModel)> = models
                .iter()
                .zip(&names)
                .filter_map(|(m, n)| match m {
                    ModelFile::Lrcq1(b) | ModelFile::Lrcq2(b) => Some((n.as_str(), b)),
                    ModelFile::Fscalecp(_) => None,
                })
                .collect();
            experiments::estimation(&data, main, &baselines, a.folds, cap(a.max_per_class))?
        }
    };
    io::ensure_parent(&a.out)?;
    experiments::write_results(&a.out, &rows)?;
    let summary = a.summary.unwrap_or_else(|| a.out.with_extension("json"));
    io::ensure_parent(&summary)?;
    io::write_json(&summary, &Report::from_rows(&rows, None))?;
    print_rows(&rows);
    println!("wrote {} and {}", a.out.display(), summary.display());
    Ok(())
}

fn print_rows(rows: &[ResultRow]) {
    for r in rows {
        let v = r.value.map_or("-".to_string(), |v| format!("{v:.4}"));
        let cp = r.checkpoint.map_or(String::new(), |c| format!(" t+{:.0}h", c / 3600.0));
        println!(
            "{:<10} group>={:<5} frac={:<5} {:<10} {:<14} {:>7}{cp}  (n={})",
            r.experiment, r.group, r.fraction, r.method, r.metric, v, r.cascades
        );
    }
}

fn report(a: ReportArgs) -> anyhow::Result<()> {
    let rows = experiments::read_results(&a.results)?;
    let model = match &a.model {
        Some(p) => match ModelFile::load(p)? {
            ModelFile::Fscalecp(m) => Some(m),
            other => bail!("{} holds an {} model; the report needs FScaleCP", p.display(), other.name()),
        },
        None => None,
    };
    let rep = Report::from_rows(&rows, model.as_ref());
    io::ensure_parent(&a.out)?;
    io::write_json(&a.out, &rep)?;
    println!("wrote {} tables to {}", rep.tables.len(), a.out.display());
    Ok(())
}
