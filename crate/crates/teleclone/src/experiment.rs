//! Grid sweeps over message states, result records and their on-disk layout.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use teleclone_core::analysis::{clone_metrics, mean_std, theoretical_fidelity, CloneMetrics};
use teleclone_core::circuit::Circuit;
use teleclone_core::dicke::{Basis, MessageState, Telecloning, Variant};
use teleclone_core::hardware::{
    enumerate_layouts, heavy_hex_27, insert_dd_with, transpile_to_native, CouplingGraph, DurationTable, Layout,
};
use teleclone_core::sim::{mix_seed, NoiseModel, Simulator};
use teleclone_core::tomography::tomography_run;

use crate::formats::{as_str, DurationTableJson, NoiseModelJson, TomographyRecordJson};
use crate::qasm::export_qasm;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Branch-enumerated reduced states.
    Exact,
    /// Sampled Pauli tomography with a maximum-likelihood fit.
    Shots,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub n_psi: usize,
    pub n_phi: usize,
}

impl Default for Grid {
    fn default() -> Self {
        Grid { n_psi: 20, n_phi: 20 }
    }
}

fn default_variant() -> Variant {
    Variant::WithAncillaOptimized
}

fn default_shots() -> u64 {
    10_000
}

fn default_mode() -> Mode {
    Mode::Exact
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Number of clones M.
    pub clones: usize,
    #[serde(with = "as_str", default = "default_variant")]
    pub variant: Variant,
    #[serde(default)]
    pub grid: Grid,
    #[serde(default = "default_shots")]
    pub shots_per_basis: u64,
    #[serde(default)]
    pub seed: u64,
    /// Place and lower the circuits onto this canonical heavy-hex layout.
    #[serde(default)]
    pub layout_index: Option<usize>,
    /// X-X dynamical decoupling; needs a layout.
    #[serde(default)]
    pub dd: bool,
    #[serde(default = "one")]
    pub dd_repetitions: usize,
    #[serde(default)]
    pub noise: Option<NoiseModelJson>,
    #[serde(default = "default_mode")]
    pub mode: Mode,
    /// Gate durations for scheduling and idle noise; the defaults when absent.
    #[serde(default)]
    pub durations: Option<DurationTableJson>,
}

impl ExperimentConfig {
    pub fn new(clones: usize, variant: Variant) -> Self {
        ExperimentConfig {
            clones,
            variant,
            grid: Grid::default(),
            shots_per_basis: default_shots(),
            seed: 0,
            layout_index: None,
            dd: false,
            dd_repetitions: 1,
            noise: None,
            mode: Mode::Exact,
            durations: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        Telecloning::new(self.clones, self.variant).map_err(|e| Error::Config(e.to_string()))?;
        if self.grid.n_psi == 0 || self.grid.n_phi == 0 {
            return bad("grid counts must be at least 1".into());
        }
        if self.mode == Mode::Shots && self.shots_per_basis == 0 {
            return bad("shots_per_basis must be at least 1".into());
        }
        if let Some(i) = self.layout_index {
            if i >= teleclone_core::hardware::LAYOUT_COUNT {
                return bad(format!("layout_index {i} out of range 0..{}", teleclone_core::hardware::LAYOUT_COUNT));
            }
            enumerate_layouts(self.clones, self.variant).map_err(|e| Error::Config(e.to_string()))?;
        }
        if self.dd && self.layout_index.is_none() {
            return bad("dd needs a layout_index".into());
        }
        if self.dd_repetitions == 0 {
            return bad("dd_repetitions must be at least 1".into());
        }
        if let Some(n) = self.noise {
            NoiseModel::from(n).validate().map_err(|e| Error::Config(e.to_string()))?;
        }
        self.duration_table()?;
        Ok(())
    }

    pub fn duration_table(&self) -> Result<DurationTable> {
        match &self.durations {
            Some(j) => DurationTable::try_from(j).map_err(|e| Error::Config(e.to_string())),
            None => Ok(DurationTable::default()),
        }
    }

    pub fn noise_model(&self) -> Option<NoiseModel> {
        self.noise.map(NoiseModel::from)
    }

    /// Short content hash used in run directory names.
    pub fn hash(&self) -> Result<String> {
        let digest = Sha256::digest(serde_json::to_string(self)?.as_bytes());
        Ok(digest.iter().take(6).map(|b| format!("{b:02x}")).collect())
    }
}

/// `n_psi x n_phi` message states with both endpoints included: psi over
/// `[0, pi]`, phi over `[0, 2 pi]` (so phi = 0 and 2 pi give the same state).
/// Row-major in psi.
pub fn angle_grid(n_psi: usize, n_phi: usize) -> Result<Vec<MessageState>> {
    if n_psi == 0 || n_phi == 0 {
        return Err(Error::Config("grid counts must be at least 1".into()));
    }
    let axis = |n: usize, top: f64, i: usize| if n == 1 { 0.0 } else { top * i as f64 / (n - 1) as f64 };
    let mut out = Vec::with_capacity(n_psi * n_phi);
    for i in 0..n_psi {
        for j in 0..n_phi {
            let psi = axis(n_psi, std::f64::consts::PI, i);
            let phi = axis(n_phi, std::f64::consts::TAU, j);
            out.push(MessageState::new(psi, phi)?);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CloneRecord {
    pub clone_index: usize,
    pub fidelity: f64,
    pub bloch: [f64; 3],
    pub bloch_angle_error: Option<f64>,
    pub bloch_magnitude: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tomography: Option<TomographyRecordJson>,
}

impl CloneRecord {
    fn new(clone_index: usize, m: CloneMetrics, tomography: Option<TomographyRecordJson>) -> Self {
        CloneRecord {
            clone_index,
            fidelity: m.fidelity_to_message,
            bloch: m.bloch,
            bloch_angle_error: m.bloch_angle_error,
            bloch_magnitude: m.bloch_magnitude,
            tomography,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointRecord {
    pub psi_index: usize,
    pub phi_index: usize,
    pub psi: f64,
    pub phi: f64,
    pub message_bloch: [f64; 3],
    /// Set when this point failed; `clones` is then empty.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub clones: Vec<CloneRecord>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Summary {
    /// `None` when there is no data.
    pub mean: Option<f64>,
    pub std: Option<f64>,
    pub count: usize,
}

impl Summary {
    pub fn of(values: &[f64]) -> Self {
        let (mean, std) = mean_std(values);
        let finite = |v: f64| v.is_finite().then_some(v);
        Summary { mean: finite(mean), std: finite(std), count: values.len() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Aggregate {
    pub per_clone: Vec<Summary>,
    pub overall: Summary,
    pub failed_points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentRecord {
    pub config: ExperimentConfig,
    pub theoretical_fidelity: f64,
    pub points: Vec<PointRecord>,
    pub aggregate: Aggregate,
}

impl ExperimentRecord {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn has_failures(&self) -> bool {
        self.aggregate.failed_points > 0
    }

    fn aggregate(clones: usize, points: &[PointRecord]) -> Aggregate {
        let per_clone = (0..clones)
            .map(|k| {
                let v: Vec<f64> = points.iter().filter_map(|p| p.clones.get(k).map(|c| c.fidelity)).collect();
                Summary::of(&v)
            })
            .collect();
        let all: Vec<f64> = points.iter().flat_map(|p| p.clones.iter().map(|c| c.fidelity)).collect();
        Aggregate {
            per_clone,
            overall: Summary::of(&all),
            failed_points: points.iter().filter(|p| p.error.is_some()).count(),
        }
    }
}

/// Layout, device and durations shared by every point of a run.
pub struct Pipeline {
    pub protocol: Telecloning,
    pub layout: Option<Layout>,
    pub graph: CouplingGraph,
    pub durations: DurationTable,
    pub dd: Option<usize>,
}

impl Pipeline {
    pub fn new(config: &ExperimentConfig, graph: CouplingGraph) -> Result<Self> {
        config.validate()?;
        let protocol = Telecloning::new(config.clones, config.variant)?;
        let layout = match config.layout_index {
            Some(i) => {
                let layout = enumerate_layouts(config.clones, config.variant)?.swap_remove(i);
                layout
                    .validate(&graph)
                    .map_err(|e| Error::Config(format!("layout {i} does not fit the device: {e}")))?;
                Some(layout)
            }
            None => None,
        };
        Ok(Pipeline {
            protocol,
            layout,
            graph,
            durations: config.duration_table()?,
            dd: config.dd.then_some(config.dd_repetitions),
        })
    }

    /// Transpiles and decouples a logical circuit as configured.
    pub fn prepare(&self, circuit: Circuit) -> teleclone_core::Result<Circuit> {
        let Some(layout) = &self.layout else { return Ok(circuit) };
        let native = transpile_to_native(&circuit, layout, &self.graph)?;
        match self.dd {
            Some(reps) => Ok(insert_dd_with(&native, &self.durations, reps)?.0),
            None => Ok(native),
        }
    }

    pub fn protocol_circuit(&self, message: MessageState, basis: Option<Basis>) -> teleclone_core::Result<Circuit> {
        self.prepare(self.protocol.protocol_circuit(message, basis))
    }
}

fn run_point(
    pipeline: &Pipeline,
    sim: &Simulator,
    config: &ExperimentConfig,
    message: MessageState,
    seed: u64,
) -> teleclone_core::Result<Vec<CloneRecord>> {
    let noise = config.noise_model();
    match config.mode {
        Mode::Exact => {
            let circuit = pipeline.protocol_circuit(message, None)?;
            let states = sim.exact_clone_states_with_noise(&circuit, noise.as_ref())?;
            states
                .iter()
                .enumerate()
                .map(|(k, rho)| Ok(CloneRecord::new(k, clone_metrics(rho, &message)?, None)))
                .collect()
        }
        Mode::Shots => {
            let prepare = |c: Circuit| pipeline.prepare(c);
            let records = tomography_run(
                sim,
                &pipeline.protocol,
                message,
                config.shots_per_basis,
                seed,
                noise.as_ref(),
                &prepare,
            )?;
            records
                .iter()
                .map(|r| {
                    let m = clone_metrics(&r.reconstructed, &message)?;
                    Ok(CloneRecord::new(r.clone_index, m, Some(TomographyRecordJson::from(r))))
                })
                .collect()
        }
    }
}

/// Runs every grid point (in parallel on the current rayon pool) on the
/// bundled heavy-hex device. Point `i` draws its shots from
/// `mix_seed(seed, i)`, so results do not depend on scheduling. A failing
/// point is recorded with its error instead of aborting the run.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentRecord> {
    run_experiment_on(config, heavy_hex_27())
}

pub fn run_experiment_on(config: &ExperimentConfig, graph: CouplingGraph) -> Result<ExperimentRecord> {
    let pipeline = Pipeline::new(config, graph)?;
    let sim = Simulator { durations: pipeline.durations.clone(), ..Simulator::default() };
    let grid = angle_grid(config.grid.n_psi, config.grid.n_phi)?;
    preflight(&pipeline, &sim, config, grid[0])?;

    let points: Vec<PointRecord> = grid
        .par_iter()
        .enumerate()
        .map(|(i, &message)| {
            let result = run_point(&pipeline, &sim, config, message, mix_seed(config.seed, i as u64));
            let (clones, error) = match result {
                Ok(c) => (c, None),
                Err(e) => (Vec::new(), Some(e.to_string())),
            };
            PointRecord {
                psi_index: i / config.grid.n_phi,
                phi_index: i % config.grid.n_phi,
                psi: message.psi,
                phi: message.phi,
                message_bloch: message.bloch(),
                error,
                clones,
            }
        })
        .collect();

    Ok(ExperimentRecord {
        theoretical_fidelity: theoretical_fidelity(1, config.clones)?,
        aggregate: ExperimentRecord::aggregate(config.clones, &points),
        config: config.clone(),
        points,
    })
}

/// Rejects configurations the simulator cannot handle at all, so they surface
/// as one configuration error rather than a failure on every point.
fn preflight(pipeline: &Pipeline, sim: &Simulator, config: &ExperimentConfig, message: MessageState) -> Result<()> {
    let circuit = pipeline.protocol_circuit(message, None)?;
    let noise = config.noise_model();
    let program = sim.compile(&circuit, noise.as_ref(), &[]).map_err(|e| Error::Config(e.to_string()))?;
    let noisy = noise.is_some_and(|n| !n.is_noiseless());
    if config.mode == Mode::Exact && noisy && program.num_qubits() > sim.max_density_qubits {
        return Err(Error::Config(format!(
            "exact mode with noise simulates density matrices of at most {} qubits, this circuit needs {}; use shots mode",
            sim.max_density_qubits,
            program.num_qubits()
        )));
    }
    Ok(())
}

/// Fidelity grid for one clone: one row per psi index, one column per phi
/// index. Failed points are empty cells.
pub fn emit_heatmap(record: &ExperimentRecord, clone_index: usize) -> Result<String> {
    if clone_index >= record.config.clones {
        return Err(Error::Core(teleclone_core::Error::IndexOutOfRange {
            index: clone_index,
            len: record.config.clones,
        }));
    }
    let Grid { n_psi, n_phi } = record.config.grid;
    let mut cells = vec![vec![String::new(); n_phi]; n_psi];
    for p in &record.points {
        if let Some(c) = p.clones.get(clone_index) {
            cells[p.psi_index][p.phi_index] = c.fidelity.to_string();
        }
    }
    let mut out = String::from("psi_index");
    for j in 0..n_phi {
        let _ = write!(out, ",phi_{j}");
    }
    out.push('\n');
    for (i, row) in cells.iter().enumerate() {
        let _ = writeln!(out, "{i},{}", row.join(","));
    }
    Ok(out)
}

/// Long-format metrics: `psi_index,phi_index,clone_index,fidelity,bx,by,bz`.
pub fn emit_metrics_csv(record: &ExperimentRecord) -> String {
    let mut out = String::from("psi_index,phi_index,clone_index,fidelity,bx,by,bz\n");
    for p in &record.points {
        for c in &p.clones {
            let [bx, by, bz] = c.bloch;
            let _ = writeln!(out, "{},{},{},{},{bx},{by},{bz}", p.psi_index, p.phi_index, c.clone_index, c.fidelity);
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlochPoint {
    pub psi_index: usize,
    pub phi_index: usize,
    pub message: [f64; 3],
    /// Indexed by clone; empty for failed points.
    pub clones: Vec<[f64; 3]>,
}

pub fn bloch_points(record: &ExperimentRecord) -> Vec<BlochPoint> {
    record
        .points
        .iter()
        .map(|p| BlochPoint {
            psi_index: p.psi_index,
            phi_index: p.phi_index,
            message: p.message_bloch,
            clones: p.clones.iter().map(|c| c.bloch).collect(),
        })
        .collect()
}

/// Clone and message Bloch vectors for external plotting.
pub fn emit_bloch(record: &ExperimentRecord) -> Result<String> {
    Ok(serde_json::to_string_pretty(&bloch_points(record))?)
}

fn write(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

/// Writes `<root>/<timestamp>-<hash>/` with the config, record, heatmaps,
/// Bloch data and QASM of the circuits for the first grid state.
pub fn write_run(root: &Path, record: &ExperimentRecord, graph: CouplingGraph) -> Result<PathBuf> {
    let stamp = chrono::Utc::now().format("%Y%m%dT%H%M%SZ");
    let base = format!("{stamp}-{}", record.config.hash()?);
    fs::create_dir_all(root).map_err(|e| Error::io(root, e))?;
    let mut dir = root.join(&base);
    let mut n = 1;
    loop {
        match fs::create_dir(&dir) {
            Ok(()) => break,
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => {
                dir = root.join(format!("{base}-{n}"));
                n += 1;
            }
            Err(e) => return Err(Error::io(&dir, e)),
        }
    }
    write(&dir.join("config.json"), &record.config.to_json()?)?;
    write(&dir.join("record.json"), &record.to_json()?)?;
    for k in 0..record.config.clones {
        write(&dir.join(format!("heatmap-clone{k}.csv")), &emit_heatmap(record, k)?)?;
    }
    write(&dir.join("metrics.csv"), &emit_metrics_csv(record))?;
    write(&dir.join("bloch.json"), &emit_bloch(record)?)?;

    let circuits = dir.join("circuits");
    fs::create_dir(&circuits).map_err(|e| Error::io(&circuits, e))?;
    let pipeline = Pipeline::new(&record.config, graph)?;
    let first = angle_grid(1, 1)?[0];
    write(&circuits.join("state.qasm"), &export_qasm(&pipeline.protocol.state_circuit())?)?;
    for basis in Basis::ALL {
        let c = pipeline.protocol_circuit(first, Some(basis))?;
        write(&circuits.join(format!("protocol-{basis}.qasm")), &export_qasm(&c)?)?;
    }
    Ok(dir)
}
