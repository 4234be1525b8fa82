//! Sweep runners: sample circuits, compile them onto each device, simulate,
//! and put the measured metrics next to the analytic predictions.

use std::path::{Path, PathBuf};
use std::time::Instant;

use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::{
    approx_agf, calibration_fit, effective_error, entanglement_crossover, hop_from_agf, placement_table,
    predict_with_allocation, HOP_LIMIT,
};
use crate::circuits::{compile, sample_qv_circuit, Circuit};
use crate::noisemodel::{allocation_matrix, AllocationMatrix, NoiseSpec};
use crate::seed;
use crate::sim::{
    ideal_distribution, ideal_run, lower, lower_working, run_shots, CircuitMetrics, MetricsResult, NoiseAttachment,
    NoiseMode,
};
use crate::topology::{standard_topology, ExtendedGraph, MemoryPlacement, TopologyKind};
use crate::{Error, Result};

/// Version tag written as the first line of every CSV.
pub const CSV_VERSION: &str = "qvdqc-csv v1";

pub const DESK_CIRCUITS: usize = 200;
pub const DESK_SHOTS: usize = 2000;
pub const PAPER_CIRCUITS: usize = 1000;
pub const PAPER_SHOTS: usize = 10_000;

/// One benchmarked device.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DeviceSpec {
    pub kind: TopologyKind,
    pub n: usize,
    pub dqc: bool,
    pub placement: MemoryPlacement,
}

impl DeviceSpec {
    pub fn single(kind: TopologyKind, n: usize) -> Self {
        Self {
            kind,
            n,
            dqc: false,
            placement: MemoryPlacement::Hub,
        }
    }

    pub fn dqc(kind: TopologyKind, n: usize, placement: MemoryPlacement) -> Self {
        Self {
            kind,
            n,
            dqc: true,
            placement,
        }
    }

    pub fn build(&self) -> Result<ExtendedGraph> {
        standard_topology(self.kind, self.n, self.dqc, &self.placement)
    }

    pub fn placement_label(&self) -> String {
        if !self.dqc {
            return "none".into();
        }
        match &self.placement {
            MemoryPlacement::Hub => "hub".into(),
            MemoryPlacement::Edge => "edge".into(),
            MemoryPlacement::Explicit(s) => {
                let parts: Vec<String> = s.iter().map(|x| x.to_string()).collect();
                format!("sites-{}", parts.join("-"))
            }
        }
    }

    pub fn label(&self) -> String {
        if self.dqc {
            format!("{}-{}-dqc-{}", self.kind, self.n, self.placement_label())
        } else {
            format!("{}-{}-single", self.kind, self.n)
        }
    }
}

/// A device ready to benchmark: either a standard construction or a graph
/// loaded from a spec file.
#[derive(Clone, Debug)]
pub struct Device {
    pub label: String,
    pub topology: String,
    pub n: usize,
    pub dqc: bool,
    pub placement: String,
    pub spec: Option<DeviceSpec>,
    pub graph: ExtendedGraph,
}

impl Device {
    pub fn from_spec(spec: &DeviceSpec) -> Result<Self> {
        Ok(Self {
            label: spec.label(),
            topology: spec.kind.to_string(),
            n: spec.n,
            dqc: spec.dqc,
            placement: spec.placement_label(),
            spec: Some(spec.clone()),
            graph: spec.build()?,
        })
    }

    /// Loads a graph spec file. The label is the file stem.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let graph = ExtendedGraph::from_spec_str(&text)?;
        let stem = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "custom".into());
        Ok(Self {
            label: stem,
            topology: "custom".into(),
            n: graph.n_working(),
            dqc: graph.is_dqc(),
            placement: if graph.is_dqc() { "file".into() } else { "none".into() },
            spec: None,
            graph,
        })
    }
}

fn default_seed() -> u64 {
    2024
}
fn default_circuits() -> usize {
    DESK_CIRCUITS
}
fn default_shots() -> usize {
    DESK_SHOTS
}
fn default_mode() -> NoiseMode {
    NoiseMode::TwoQubitGate
}
fn default_one() -> f64 {
    1.0
}
fn default_placements() -> Vec<MemoryPlacement> {
    vec![MemoryPlacement::Hub]
}
fn default_dqc() -> Vec<bool> {
    vec![false, true]
}
fn default_ent_grid() -> Vec<f64> {
    vec![0.0]
}

/// Experiment description, read from a TOML file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub topologies: Vec<TopologyKind>,
    #[serde(default)]
    pub sizes: Vec<usize>,
    /// Extra devices loaded from graph spec files.
    #[serde(default)]
    pub graph_files: Vec<PathBuf>,
    #[serde(default = "default_dqc")]
    pub dqc: Vec<bool>,
    #[serde(default = "default_placements")]
    pub placements: Vec<MemoryPlacement>,
    pub error_rates: Vec<f64>,
    #[serde(default = "default_ent_grid")]
    pub entanglement_errors: Vec<f64>,
    #[serde(default = "default_circuits")]
    pub circuits: usize,
    #[serde(default = "default_shots")]
    pub shots: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default = "default_mode")]
    pub noise_mode: NoiseMode,
    /// Memory-qubit error rate as a multiple of the working rate.
    #[serde(default = "default_one")]
    pub memory_error_factor: f64,
    /// Single-qubit gate rate as a fraction of the CNOT rate, used by the
    /// gate-level noise mode only.
    #[serde(default)]
    pub single_qubit_fraction: f64,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configs always serialize")
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        let standard = !self.topologies.is_empty() || !self.sizes.is_empty();
        if standard && (self.topologies.is_empty() || self.sizes.is_empty() || self.dqc.is_empty()) {
            return bad("topologies, sizes and dqc must be nonempty".into());
        }
        if !standard && self.graph_files.is_empty() {
            return bad("no devices: give topologies and sizes or graph_files".into());
        }
        if self.placements.is_empty() || self.error_rates.is_empty() || self.entanglement_errors.is_empty() {
            return bad("placements, error_rates and entanglement_errors must be nonempty".into());
        }
        if self.circuits == 0 || self.shots == 0 {
            return bad("circuits and shots must be positive".into());
        }
        if let Some(&n) = self.sizes.iter().find(|&&n| n < 2) {
            return bad(format!("size {n} is below 2"));
        }
        for &e in self.error_rates.iter().chain(&self.entanglement_errors) {
            if !(0.0..=1.0).contains(&e) {
                return bad(format!("rate {e} outside [0, 1]"));
            }
        }
        let worst = self.error_rates.iter().copied().fold(0.0, f64::max) * self.memory_error_factor;
        if self.memory_error_factor.is_nan() || self.memory_error_factor < 0.0 || worst > 1.0 {
            return bad(format!(
                "memory_error_factor {} gives rates above 1",
                self.memory_error_factor
            ));
        }
        if !(0.0..=1.0).contains(&self.single_qubit_fraction) {
            return bad("single_qubit_fraction outside [0, 1]".into());
        }
        if standard && self.device_specs().is_empty() {
            return bad("no valid device in the topology/size/dqc/placement grid".into());
        }
        Ok(())
    }

    /// Cartesian product of the device axes, dropping combinations that do
    /// not form a valid device (odd sizes for two QPUs, edge placement off a
    /// line).
    pub fn device_specs(&self) -> Vec<DeviceSpec> {
        let mut out = Vec::new();
        for &kind in &self.topologies {
            for &n in &self.sizes {
                for &dqc in &self.dqc {
                    if !dqc {
                        out.push(DeviceSpec::single(kind, n));
                        continue;
                    }
                    for p in &self.placements {
                        let d = DeviceSpec::dqc(kind, n, p.clone());
                        if d.build().is_ok() && !out.contains(&d) {
                            out.push(d);
                        }
                    }
                }
            }
        }
        out
    }

    /// Standard devices followed by the ones loaded from graph files.
    pub fn devices(&self) -> Result<Vec<Device>> {
        let mut out: Vec<Device> = self
            .device_specs()
            .iter()
            .map(Device::from_spec)
            .collect::<Result<_>>()?;
        for path in &self.graph_files {
            out.push(Device::from_file(path)?);
        }
        Ok(out)
    }

    /// Makes relative graph file paths relative to `base`, normally the
    /// directory holding the config file.
    pub fn resolve_paths(&mut self, base: &Path) {
        for p in &mut self.graph_files {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
    }

    pub fn paper_scale(&mut self) {
        self.circuits = PAPER_CIRCUITS;
        self.shots = PAPER_SHOTS;
    }
}

/// Circuits shared by every device of the same size, with their ideal
/// output distributions.
pub struct CircuitSet {
    pub n: usize,
    pub circuits: Vec<Circuit>,
    pub ideal: Vec<Vec<f64>>,
}

impl CircuitSet {
    pub fn sample(n: usize, count: usize, master_seed: u64) -> Result<Self> {
        let pairs: Result<Vec<(Circuit, Vec<f64>)>> = (0..count)
            .into_par_iter()
            .map(|i| {
                let mut rng = seed::rng(master_seed, &[seed::stream::CIRCUIT, n as u64, i as u64]);
                let c = sample_qv_circuit(n, &mut rng)?;
                let q = ideal_distribution(&c)?;
                Ok((c, q))
            })
            .collect();
        let (circuits, ideal) = pairs?.into_iter().unzip();
        Ok(Self { n, circuits, ideal })
    }
}

/// Noise settings of one grid point.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct NoisePoint {
    pub eps: f64,
    pub eps_e: f64,
}

#[derive(Copy, Clone, Debug, PartialEq)]
pub struct SimSettings {
    pub mode: NoiseMode,
    pub shots: usize,
    pub seed: u64,
    pub memory_error_factor: f64,
    pub single_qubit_fraction: f64,
}

impl SimSettings {
    pub fn from_config(cfg: &ExperimentConfig) -> Self {
        Self {
            mode: cfg.noise_mode,
            shots: cfg.shots,
            seed: cfg.seed,
            memory_error_factor: cfg.memory_error_factor,
            single_qubit_fraction: cfg.single_qubit_fraction,
        }
    }

    pub fn noise_spec(&self, graph: &ExtendedGraph, point: NoisePoint, r: f64) -> Result<NoiseSpec> {
        NoiseSpec::uniform(graph, point.eps, point.eps * self.memory_error_factor, point.eps_e, r)
    }
}

/// Simulation outcome of one device at one noise point.
#[derive(Clone, Debug)]
pub struct PointResult {
    pub point: NoisePoint,
    pub metrics: MetricsResult,
    pub per_circuit: Vec<CircuitMetrics>,
}

/// Simulates every circuit of `set` on `graph` at each noise point. Shot
/// seeds depend only on (seed, circuit index, shot index), so devices and
/// points sharing a circuit set use common random numbers.
pub fn simulate(
    graph: &ExtendedGraph,
    set: &CircuitSet,
    points: &[NoisePoint],
    settings: &SimSettings,
) -> Result<Vec<PointResult>> {
    if graph.n_working() != set.n {
        return Err(Error::InvalidArgument(
            "circuit set size does not match the device".into(),
        ));
    }
    let per_circuit: Result<Vec<Vec<CircuitMetrics>>> = set
        .circuits
        .par_iter()
        .enumerate()
        .map(|(i, circuit)| {
            let pc = compile(circuit, graph)?;
            let mut ideal = None;
            let mut out = Vec::with_capacity(points.len());
            for &point in points {
                let spec = settings.noise_spec(graph, point, 1.0)?;
                let mut noise = NoiseAttachment::from_spec(settings.mode, &spec)?;
                noise.single_qubit_fraction = settings.single_qubit_fraction;
                // the working-register form is exact for the coarse modes and
                // drops the two memory qubits from the state
                let program = match settings.mode {
                    NoiseMode::PerBasisGate => lower(&pc, &noise)?,
                    _ => lower_working(&pc, &noise)?,
                };
                if ideal.is_none() {
                    let mut rng = seed::rng(settings.seed, &[seed::stream::MISC, set.n as u64, i as u64]);
                    ideal = Some(ideal_run(&program, &mut rng)?);
                }
                let run = ideal.as_ref().expect("set above");
                let samples = run_shots(&program, run, settings.shots, settings.seed, i as u64);
                out.push(CircuitMetrics::from_samples(&samples, &set.ideal[i]));
            }
            Ok(out)
        })
        .collect();
    let per_circuit = per_circuit?;
    points
        .iter()
        .enumerate()
        .map(|(k, &point)| {
            let metrics: Vec<CircuitMetrics> = per_circuit.iter().map(|c| c[k]).collect();
            Ok(PointResult {
                point,
                metrics: MetricsResult::aggregate(&metrics, set.n, settings.shots, settings.seed)?,
                per_circuit: metrics,
            })
        })
        .collect()
}

/// Mean and standard error of the per-circuit AGF difference `a − b`
/// between two devices run on the same circuit set.
pub fn paired_agf_difference(a: &PointResult, b: &PointResult) -> (f64, f64) {
    let n = a.metrics.n_qubits;
    let k = a.per_circuit.len() as f64;
    let d = (n as f64).exp2();
    let ideal = 0.5 * (a.metrics.lxe_ideal + b.metrics.lxe_ideal);
    let diffs: Vec<f64> = a
        .per_circuit
        .iter()
        .zip(&b.per_circuit)
        .map(|(x, y)| (x.lxe - y.lxe) / ideal * (d - 1.0) / d)
        .collect();
    let mean = diffs.iter().sum::<f64>() / k;
    let var = diffs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (k - 1.0).max(1.0);
    (a.metrics.agf_via_lxe - b.metrics.agf_via_lxe, (var / k).sqrt())
}

/// One CSV row of a simulated sweep.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchmarkRecord {
    pub sweep: String,
    pub device: String,
    pub topology: String,
    pub n: usize,
    pub dqc: bool,
    pub placement: String,
    pub noise_mode: String,
    pub eps_in: f64,
    pub eps_e: f64,
    pub circuits: usize,
    pub shots: usize,
    pub seed: u64,
    pub hop: f64,
    pub lxe: f64,
    pub hop_ideal: f64,
    pub lxe_ideal: f64,
    pub f_sim: f64,
    pub f_sim_stderr: f64,
    pub eps_eff: f64,
    pub r_fit: Option<f64>,
    pub f_pred: f64,
    pub f_pred_cal: f64,
    pub f_approx: f64,
    pub h_pred: f64,
    pub characteristic_cost: f64,
    pub runtime_s: f64,
}

struct DevicePrediction {
    graph: ExtendedGraph,
    alloc: AllocationMatrix,
    cost: f64,
}

impl DevicePrediction {
    fn new(device: &Device) -> Result<Self> {
        let graph = device.graph.clone();
        let alloc = allocation_matrix(&graph)?;
        let cost = alloc.characteristic_cost().to_f64().unwrap_or(f64::NAN);
        Ok(Self { graph, alloc, cost })
    }

    fn agf(&self, settings: &SimSettings, point: NoisePoint, r: f64) -> Result<f64> {
        let spec = settings.noise_spec(&self.graph, point, r)?;
        Ok(predict_with_allocation(&self.alloc, &spec)?.agf)
    }
}

/// Simulates every device of the config over `points` and fits the
/// calibration ratio per device.
fn run_grid(
    cfg: &ExperimentConfig,
    sweep: &str,
    devices: &[Device],
    points: &[NoisePoint],
) -> Result<Vec<BenchmarkRecord>> {
    let settings = SimSettings::from_config(cfg);
    let mut sets: Vec<CircuitSet> = Vec::new();
    let mut records = Vec::new();
    for dev in devices {
        if !sets.iter().any(|s| s.n == dev.n) {
            sets.push(CircuitSet::sample(dev.n, cfg.circuits, cfg.seed)?);
        }
        let set = sets.iter().find(|s| s.n == dev.n).expect("inserted above");
        let pred = DevicePrediction::new(dev)?;
        let start = Instant::now();
        let results = simulate(&pred.graph, set, points, &settings)?;
        let runtime = start.elapsed().as_secs_f64();

        let mut eff = Vec::with_capacity(results.len());
        for res in &results {
            eff.push(effective_error(
                &pred.alloc,
                &pred.graph,
                res.metrics.agf_via_lxe,
                res.point.eps_e,
            )?);
        }
        let fit_points: Vec<(f64, f64)> = results.iter().zip(&eff).map(|(r, &e)| (r.point.eps, e)).collect();
        let r_fit = calibration_fit(&fit_points).ok().filter(|r| *r > 0.0);
        for (res, &eps_eff) in results.iter().zip(&eff) {
            let p = res.point;
            let f_pred = pred.agf(&settings, p, 1.0)?;
            let f_pred_cal = match r_fit {
                Some(r) => pred.agf(&settings, p, r)?,
                None => f_pred,
            };
            let m = &res.metrics;
            records.push(BenchmarkRecord {
                sweep: sweep.into(),
                device: dev.label.clone(),
                topology: dev.topology.clone(),
                n: dev.n,
                dqc: dev.dqc,
                placement: dev.placement.clone(),
                noise_mode: cfg.noise_mode.to_string(),
                eps_in: p.eps,
                eps_e: p.eps_e,
                circuits: cfg.circuits,
                shots: cfg.shots,
                seed: cfg.seed,
                hop: m.hop,
                lxe: m.lxe,
                hop_ideal: m.hop_ideal,
                lxe_ideal: m.lxe_ideal,
                f_sim: m.agf_via_lxe,
                f_sim_stderr: m.agf_stderr,
                eps_eff,
                r_fit,
                f_pred,
                f_pred_cal,
                f_approx: approx_agf(pred.cost, dev.n, p.eps),
                h_pred: hop_from_agf(f_pred_cal, m.hop_ideal, dev.n),
                characteristic_cost: pred.cost,
                runtime_s: runtime / points.len() as f64,
            });
        }
    }
    Ok(records)
}

/// Error-rate sweep at each configured entanglement error.
pub fn run_error_sweep(cfg: &ExperimentConfig) -> Result<Vec<BenchmarkRecord>> {
    cfg.validate()?;
    let points: Vec<NoisePoint> = cfg
        .entanglement_errors
        .iter()
        .flat_map(|&eps_e| cfg.error_rates.iter().map(move |&eps| NoisePoint { eps, eps_e }))
        .collect();
    run_grid(cfg, "error", &cfg.devices()?, &points)
}

/// Size sweep: identical machinery, one record per device size and error
/// rate. Sizes come from the config.
pub fn run_size_sweep(cfg: &ExperimentConfig) -> Result<Vec<BenchmarkRecord>> {
    cfg.validate()?;
    let points: Vec<NoisePoint> = cfg
        .error_rates
        .iter()
        .map(|&eps| NoisePoint { eps, eps_e: 0.0 })
        .collect();
    run_grid(cfg, "size", &cfg.devices()?, &points)
}

/// Where the two-QPU device stops beating its single-QPU counterpart.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CrossoverSummary {
    pub dqc_device: String,
    pub single_device: String,
    pub eps_in: f64,
    pub crossover_theory: Option<f64>,
    pub crossover_theory_cal: Option<f64>,
    pub crossover_sim: Option<f64>,
}

/// First zero crossing of `y` over the grid `x`, linearly interpolated.
pub fn interpolate_crossing(x: &[f64], y: &[f64]) -> Option<f64> {
    if y.first().is_some_and(|&v| v <= 0.0) {
        return None;
    }
    for i in 1..x.len() {
        if y[i] <= 0.0 {
            let t = y[i - 1] / (y[i - 1] - y[i]);
            return Some(x[i - 1] + t * (x[i] - x[i - 1]));
        }
    }
    None
}

/// Entanglement-error sweep of each two-QPU device against the single-QPU
/// device of the same topology and size, at every configured error rate.
/// Devices loaded from graph files have no standard counterpart and are not
/// part of this sweep.
pub fn run_entanglement_sweep(cfg: &ExperimentConfig) -> Result<(Vec<BenchmarkRecord>, Vec<CrossoverSummary>)> {
    cfg.validate()?;
    let pairs: Vec<(Device, Device)> = cfg
        .device_specs()
        .iter()
        .filter(|d| d.dqc)
        .map(|d| {
            Ok((
                Device::from_spec(d)?,
                Device::from_spec(&DeviceSpec::single(d.kind, d.n))?,
            ))
        })
        .collect::<Result<_>>()?;
    if pairs.is_empty() {
        return Err(Error::Config(
            "the entanglement sweep needs at least one standard two-QPU device".into(),
        ));
    }
    let dqc: Vec<Device> = pairs.iter().map(|p| p.0.clone()).collect();
    let mut singles: Vec<Device> = Vec::new();
    for (_, s) in &pairs {
        if !singles.iter().any(|x| x.label == s.label) {
            singles.push(s.clone());
        }
    }
    let mut records = Vec::new();
    let mut summaries = Vec::new();
    for &eps in &cfg.error_rates {
        let single_recs = run_grid(cfg, "ent", &singles, &[NoisePoint { eps, eps_e: 0.0 }])?;
        let dqc_points: Vec<NoisePoint> = cfg
            .entanglement_errors
            .iter()
            .map(|&eps_e| NoisePoint { eps, eps_e })
            .collect();
        let dqc_recs = run_grid(cfg, "ent", &dqc, &dqc_points)?;
        for (d, single) in &pairs {
            let s_rec = single_recs
                .iter()
                .find(|r| r.device == single.label)
                .expect("simulated above");
            let rows: Vec<&BenchmarkRecord> = dqc_recs.iter().filter(|r| r.device == d.label).collect();
            let x: Vec<f64> = rows.iter().map(|r| r.eps_e).collect();
            let y: Vec<f64> = rows.iter().map(|r| r.f_sim - s_rec.f_sim).collect();
            let r_cal = s_rec.r_fit.unwrap_or(1.0).min(1.0 / eps.max(f64::MIN_POSITIVE));
            summaries.push(CrossoverSummary {
                dqc_device: d.label.clone(),
                single_device: single.label.clone(),
                eps_in: eps,
                crossover_theory: entanglement_crossover(&single.graph, &d.graph, eps, 1.0)?,
                crossover_theory_cal: entanglement_crossover(&single.graph, &d.graph, eps, r_cal)?,
                crossover_sim: interpolate_crossing(&x, &y),
            });
        }
        records.extend(single_recs);
        records.extend(dqc_recs);
    }
    Ok((records, summaries))
}

/// One scored memory attachment.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PlacementRecord {
    pub topology: String,
    pub n: usize,
    pub site_a: usize,
    pub site_b: usize,
    pub characteristic_cost: f64,
    pub entanglement_cost: f64,
    pub eps_in: f64,
    pub f_pred: f64,
    pub best: bool,
}

/// Exhaustive placement table for each topology and even size of the config.
pub fn run_placement_search(cfg: &ExperimentConfig) -> Result<Vec<PlacementRecord>> {
    cfg.validate()?;
    let settings = SimSettings::from_config(cfg);
    let mut out = Vec::new();
    for &kind in &cfg.topologies {
        for &n in cfg.sizes.iter().filter(|&&n| n % 2 == 0) {
            let local = standard_topology(kind, n / 2, false, &MemoryPlacement::Hub);
            let local = match local {
                Ok(g) => g,
                // a single qubit per QPU admits only one placement
                Err(_) => continue,
            };
            let table = placement_table(&local, &local)?;
            let best = table
                .iter()
                .fold(None::<&crate::analytic::PlacementScore>, |b, s| match b {
                    Some(b) if b.characteristic_cost <= s.characteristic_cost + 1e-12 => Some(b),
                    _ => Some(s),
                })
                .map(|s| s.sites);
            for s in &table {
                let g = crate::analytic::attach_memory(&local, &local, s.sites.0, s.sites.1)?;
                let alloc = allocation_matrix(&g)?;
                for &eps in &cfg.error_rates {
                    let spec = settings.noise_spec(&g, NoisePoint { eps, eps_e: 0.0 }, 1.0)?;
                    out.push(PlacementRecord {
                        topology: kind.to_string(),
                        n,
                        site_a: s.sites.0,
                        site_b: s.sites.1,
                        characteristic_cost: s.characteristic_cost,
                        entanglement_cost: s.entanglement_cost,
                        eps_in: eps,
                        f_pred: predict_with_allocation(&alloc, &spec)?.agf,
                        best: Some(s.sites) == best,
                    });
                }
            }
        }
    }
    Ok(out)
}

/// Analytic-only prediction row.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PredictionRecord {
    pub device: String,
    pub topology: String,
    pub n: usize,
    pub dqc: bool,
    pub placement: String,
    pub eps_in: f64,
    pub eps_e: f64,
    pub f_pred: f64,
    pub f_approx: f64,
    pub h_pred: f64,
    pub chi_pred_ratio: f64,
    pub characteristic_cost: f64,
    pub entanglement_cost: f64,
}

pub fn run_predict(cfg: &ExperimentConfig) -> Result<Vec<PredictionRecord>> {
    cfg.validate()?;
    let settings = SimSettings::from_config(cfg);
    let mut out = Vec::new();
    for dev in cfg.devices()? {
        let pred = DevicePrediction::new(&dev)?;
        let ent_cost = pred.alloc.entanglement_cost().to_f64().unwrap_or(f64::NAN);
        for &eps_e in &cfg.entanglement_errors {
            for &eps in &cfg.error_rates {
                let f = pred.agf(&settings, NoisePoint { eps, eps_e }, 1.0)?;
                out.push(PredictionRecord {
                    device: dev.label.clone(),
                    topology: dev.topology.clone(),
                    n: dev.n,
                    dqc: dev.dqc,
                    placement: dev.placement.clone(),
                    eps_in: eps,
                    eps_e,
                    f_pred: f,
                    f_approx: approx_agf(pred.cost, dev.n, eps),
                    h_pred: hop_from_agf(f, HOP_LIMIT, dev.n),
                    chi_pred_ratio: crate::analytic::preserving_from_agf(f, dev.n),
                    characteristic_cost: pred.cost,
                    entanglement_cost: ent_cost,
                });
            }
        }
    }
    Ok(out)
}

/// Serializes rows as CSV behind a `# qvdqc-csv v1 kind=<kind>` line.
pub fn to_csv<T: Serialize>(kind: &str, rows: &[T]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| Error::Config(e.to_string()))?;
    }
    let body = w.into_inner().map_err(|e| Error::Config(e.to_string()))?;
    let body = String::from_utf8(body).expect("csv output is utf-8");
    Ok(format!("# {CSV_VERSION} kind={kind}\n{body}"))
}

/// Reads the schema tag of a CSV produced by [`to_csv`].
pub fn csv_schema(text: &str) -> Option<(&str, &str)> {
    let first = text.lines().next()?.strip_prefix("# ")?;
    let (version, kind) = first.rsplit_once(" kind=")?;
    Some((version, kind))
}
