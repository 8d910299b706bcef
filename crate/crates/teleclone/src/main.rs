use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use teleclone::experiment::{
    emit_bloch, emit_heatmap, emit_metrics_csv, run_experiment_on, write_run, ExperimentConfig, ExperimentRecord, Mode,
    Pipeline,
};
use teleclone::formats::{
    circuit_from_json, circuit_to_json, coupling_graph_from_json, durations_from_json, DurationTableJson,
    HEAVY_HEX_27_JSON,
};
use teleclone::qasm::export_qasm;
use teleclone::Error;
use teleclone_core::circuit::listing;
use teleclone_core::dicke::{Basis, MessageState, Variant};
use teleclone_core::hardware::CouplingGraph;

/// Thread count for the experiment worker pool.
const THREADS_ENV: &str = "TELECLONE_THREADS";

#[derive(Parser)]
#[command(name = "teleclone", version, about = "Optimal 1 -> M quantum telecloning circuits and experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a telecloning circuit and write it as JSON or OpenQASM.
    Build(BuildArgs),
    /// Run a grid experiment described by a JSON config.
    Run(RunArgs),
    /// Summarize a record.json.
    Analyze(AnalyzeArgs),
    /// Convert a circuit to OpenQASM, or pull heatmap/Bloch/CSV data from a record.
    Export(ExportArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Switch {
    On,
    Off,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Qasm,
    Text,
}

#[derive(Args)]
struct DeviceArgs {
    /// Canonical heavy-hex layout (0..6) to transpile onto.
    #[arg(long)]
    layout_index: Option<usize>,
    /// X-X dynamical decoupling (needs a layout).
    #[arg(long, value_enum)]
    dd: Option<Switch>,
    /// Duration table JSON file.
    #[arg(long)]
    durations: Option<PathBuf>,
    /// Coupling graph JSON file (defaults to the bundled 27-qubit heavy-hex).
    #[arg(long)]
    coupling: Option<PathBuf>,
}

#[derive(Args)]
struct BuildArgs {
    /// Number of clones.
    #[arg(long = "m")]
    clones: usize,
    #[arg(long, default_value = "with-ancilla-optimized")]
    variant: Variant,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    psi: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    phi: f64,
    /// Measure the clones in this basis (x, y or z).
    #[arg(long)]
    basis: Option<Basis>,
    /// Only the resource-state preparation.
    #[arg(long)]
    state_only: bool,
    #[command(flatten)]
    device: DeviceArgs,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    /// Parent directory of the run directory.
    #[arg(long, default_value = "runs")]
    out_dir: PathBuf,
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    #[arg(long)]
    seed: Option<u64>,
    #[command(flatten)]
    device: DeviceArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Exact,
    Shots,
}

#[derive(Args)]
struct AnalyzeArgs {
    record: PathBuf,
    /// Print the aggregate as JSON.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct ExportArgs {
    /// Circuit JSON to render as OpenQASM.
    #[arg(long, conflicts_with = "record")]
    circuit: Option<PathBuf>,
    /// Experiment record to pull data from.
    #[arg(long)]
    record: Option<PathBuf>,
    /// Fidelity heatmap CSV of this clone.
    #[arg(long, requires = "record")]
    heatmap: Option<usize>,
    /// Bloch vectors as JSON.
    #[arg(long, requires = "record")]
    bloch: bool,
    /// Flat per-clone metrics CSV.
    #[arg(long, requires = "record")]
    metrics: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Exit status: 0 success, 1 configuration or input error, 2 partial failure.
enum Failure {
    Config(String),
    Partial(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Config(e.to_string())
    }
}

impl From<teleclone_core::Error> for Failure {
    fn from(e: teleclone_core::Error) -> Self {
        Failure::Config(e.to_string())
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::Config(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_graph(device: &DeviceArgs) -> Result<CouplingGraph, Failure> {
    let text = match &device.coupling {
        Some(p) => read(p)?,
        None => HEAVY_HEX_27_JSON.to_string(),
    };
    Ok(coupling_graph_from_json(&text)?)
}

/// Command-line device flags override the config file.
fn apply_device(config: &mut ExperimentConfig, device: &DeviceArgs) -> Result<(), Failure> {
    if let Some(i) = device.layout_index {
        config.layout_index = Some(i);
    }
    if let Some(dd) = device.dd {
        config.dd = dd == Switch::On;
    }
    if let Some(p) = &device.durations {
        let table = durations_from_json(&read(p)?)?;
        config.durations = Some(DurationTableJson::from(&table));
    }
    Ok(())
}

fn build(args: BuildArgs) -> Result<(), Failure> {
    let mut config = ExperimentConfig::new(args.clones, args.variant);
    apply_device(&mut config, &args.device)?;
    let pipeline = Pipeline::new(&config, load_graph(&args.device)?)?;
    let circuit = if args.state_only {
        pipeline.prepare(pipeline.protocol.state_circuit())?
    } else {
        pipeline.protocol_circuit(MessageState::new(args.psi, args.phi)?, args.basis)?
    };
    let text = match args.format {
        Format::Json => circuit_to_json(&circuit)? + "\n",
        Format::Qasm => export_qasm(&circuit)?,
        Format::Text => {
            let s = circuit.stats()?;
            format!(
                "{}two-qubit gates: {}\ntotal gates: {}\ndepth: {}\n",
                listing(&circuit),
                s.two_qubit_gate_count,
                s.total_gate_count,
                s.depth
            )
        }
    };
    emit(args.out.as_deref(), &text)
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(value) = std::env::var(THREADS_ENV) else { return Ok(()) };
    let n: usize = value
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::Config(format!("{THREADS_ENV} must be a positive integer, got {value:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::Config(format!("thread pool: {e}")))
}

fn run(args: RunArgs) -> Result<(), Failure> {
    configure_threads()?;
    let mut config = ExperimentConfig::from_json(&read(&args.config)?)?;
    apply_device(&mut config, &args.device)?;
    if let Some(m) = args.mode {
        config.mode = match m {
            ModeArg::Exact => Mode::Exact,
            ModeArg::Shots => Mode::Shots,
        };
    }
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    let graph = load_graph(&args.device)?;
    let record = run_experiment_on(&config, graph.clone())?;
    let dir = write_run(&args.out_dir, &record, graph)?;
    println!("{}", dir.display());
    print_summary(&record);
    if record.has_failures() {
        return Err(Failure::Partial(format!(
            "{} of {} points failed; see {}",
            record.aggregate.failed_points,
            record.points.len(),
            dir.join("record.json").display()
        )));
    }
    Ok(())
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "n/a".to_string(), |v| format!("{v:.6}"))
}

fn print_summary(record: &ExperimentRecord) {
    let c = &record.config;
    println!("M = {}, variant {}, mode {:?}, {} points", c.clones, c.variant, c.mode, record.points.len());
    println!("theoretical fidelity {:.6}", record.theoretical_fidelity);
    for (k, s) in record.aggregate.per_clone.iter().enumerate() {
        println!("clone {k}: mean {} std {} (n = {})", fmt_opt(s.mean), fmt_opt(s.std), s.count);
    }
    let o = &record.aggregate.overall;
    println!("overall: mean {} std {}", fmt_opt(o.mean), fmt_opt(o.std));
    if record.has_failures() {
        println!("failed points: {}", record.aggregate.failed_points);
    }
}

fn analyze(args: AnalyzeArgs) -> Result<(), Failure> {
    let record = ExperimentRecord::from_json(&read(&args.record)?)?;
    if args.json {
        let text = serde_json::to_string_pretty(&record.aggregate).map_err(Error::from)?;
        println!("{text}");
    } else {
        print_summary(&record);
    }
    if record.has_failures() {
        return Err(Failure::Partial(format!("{} points failed", record.aggregate.failed_points)));
    }
    Ok(())
}

fn export(args: ExportArgs) -> Result<(), Failure> {
    if let Some(path) = &args.circuit {
        let circuit = circuit_from_json(&read(path)?)?;
        return emit(args.out.as_deref(), &export_qasm(&circuit)?);
    }
    let Some(path) = &args.record else {
        return Err(Failure::Config("export needs --circuit or --record".into()));
    };
    let record = ExperimentRecord::from_json(&read(path)?)?;
    let text = match (args.heatmap, args.bloch, args.metrics) {
        (Some(k), false, false) => emit_heatmap(&record, k)?,
        (None, true, false) => emit_bloch(&record)? + "\n",
        (None, false, true) => emit_metrics_csv(&record),
        _ => return Err(Failure::Config("choose exactly one of --heatmap, --bloch, --metrics".into())),
    };
    emit(args.out.as_deref(), &text)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Build(a) => build(a),
        Command::Run(a) => run(a),
        Command::Analyze(a) => analyze(a),
        Command::Export(a) => export(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Partial(msg)) => {
            eprintln!("warning: {msg}");
            ExitCode::from(2)
        }
    }
}
