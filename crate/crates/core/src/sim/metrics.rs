use serde::Serialize;

use super::state::StateVector;
use crate::analytic::agf_from_lxe;
use crate::circuits::Circuit;
use crate::{Error, Result};

/// Largest abstract circuit whose ideal distribution is tabulated.
pub const MAX_IDEAL_QUBITS: usize = 14;

/// Exact output distribution q_U of an abstract circuit started in |0…0⟩.
pub fn ideal_distribution(circuit: &Circuit) -> Result<Vec<f64>> {
    if circuit.n_working > MAX_IDEAL_QUBITS {
        return Err(Error::Capacity {
            qubits: circuit.n_working,
            max: MAX_IDEAL_QUBITS,
        });
    }
    let mut s = StateVector::zero(circuit.n_working);
    for g in circuit.gates() {
        s.apply_2q(g.a, g.b, &g.u);
    }
    Ok(s.probabilities())
}

/// The 2^{N−1} most likely outcomes, ties broken toward smaller bitstrings.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeavySet {
    mask: Vec<bool>,
}

impl HeavySet {
    pub fn contains(&self, x: u32) -> bool {
        self.mask[x as usize]
    }

    pub fn len(&self) -> usize {
        self.mask.iter().filter(|&&m| m).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn members(&self) -> Vec<u32> {
        (0..self.mask.len() as u32).filter(|&x| self.mask[x as usize]).collect()
    }
}

pub fn heavy_set(q: &[f64]) -> HeavySet {
    let mut order: Vec<usize> = (0..q.len()).collect();
    order.sort_by(|&a, &b| q[b].total_cmp(&q[a]).then(a.cmp(&b)));
    let mut mask = vec![false; q.len()];
    for &x in &order[..q.len() / 2] {
        mask[x] = true;
    }
    HeavySet { mask }
}

/// Empirical heavy output frequency.
pub fn hop(samples: &[u32], heavy: &HeavySet) -> f64 {
    samples.iter().filter(|&&x| heavy.contains(x)).count() as f64 / samples.len() as f64
}

/// χ = 2^N · mean q_U(sample) − 1.
pub fn lxe(samples: &[u32], q: &[f64]) -> f64 {
    let mean = samples.iter().map(|&x| q[x as usize]).sum::<f64>() / samples.len() as f64;
    q.len() as f64 * mean - 1.0
}

/// Heavy output probability of the ideal distribution itself.
pub fn ideal_hop(q: &[f64], heavy: &HeavySet) -> f64 {
    q.iter()
        .enumerate()
        .filter(|&(x, _)| heavy.contains(x as u32))
        .map(|(_, p)| p)
        .sum()
}

/// 2^N Σ q² − 1.
pub fn ideal_lxe(q: &[f64]) -> f64 {
    q.len() as f64 * q.iter().map(|p| p * p).sum::<f64>() - 1.0
}

pub fn estimate_agf(lxe: f64, lxe_ideal: f64, n: usize) -> Result<f64> {
    agf_from_lxe(lxe, lxe_ideal, n)
}

/// Metrics of one circuit.
#[derive(Copy, Clone, Debug, PartialEq, Serialize)]
pub struct CircuitMetrics {
    pub hop: f64,
    pub lxe: f64,
    pub hop_ideal: f64,
    pub lxe_ideal: f64,
}

impl CircuitMetrics {
    pub fn from_samples(samples: &[u32], q: &[f64]) -> Self {
        let heavy = heavy_set(q);
        Self {
            hop: hop(samples, &heavy),
            lxe: lxe(samples, q),
            hop_ideal: ideal_hop(q, &heavy),
            lxe_ideal: ideal_lxe(q),
        }
    }
}

/// Circuit-averaged metrics.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MetricsResult {
    pub n_qubits: usize,
    pub hop: f64,
    pub lxe: f64,
    pub hop_ideal: f64,
    pub lxe_ideal: f64,
    pub agf_via_lxe: f64,
    /// Standard error of the circuit-averaged AGF estimate.
    pub agf_stderr: f64,
    pub heavy_set_size: usize,
    pub shots: usize,
    pub n_circuits: usize,
    pub seed: u64,
}

fn mean(xs: impl Iterator<Item = f64>) -> (f64, usize) {
    let (s, n) = xs.fold((0.0, 0), |(s, n), x| (s + x, n + 1));
    (s / n as f64, n)
}

impl MetricsResult {
    pub fn aggregate(per_circuit: &[CircuitMetrics], n_qubits: usize, shots: usize, seed: u64) -> Result<Self> {
        if per_circuit.is_empty() {
            return Err(Error::InvalidArgument("no circuits to aggregate".into()));
        }
        let (hop, k) = mean(per_circuit.iter().map(|m| m.hop));
        let (lxe, _) = mean(per_circuit.iter().map(|m| m.lxe));
        let (hop_ideal, _) = mean(per_circuit.iter().map(|m| m.hop_ideal));
        let (lxe_ideal, _) = mean(per_circuit.iter().map(|m| m.lxe_ideal));
        let agf = estimate_agf(lxe, lxe_ideal, n_qubits)?;
        let var = if k > 1 {
            per_circuit.iter().map(|m| (m.lxe - lxe).powi(2)).sum::<f64>() / (k - 1) as f64
        } else {
            0.0
        };
        let d = (n_qubits as f64).exp2();
        let agf_stderr = (var / k as f64).sqrt() / lxe_ideal * (d - 1.0) / d;
        Ok(Self {
            n_qubits,
            hop,
            lxe,
            hop_ideal,
            lxe_ideal,
            agf_via_lxe: agf,
            agf_stderr,
            heavy_set_size: 1 << (n_qubits - 1),
            shots,
            n_circuits: k,
            seed,
        })
    }
}

/// Packs samples into `ceil(n_bits / 8)` little-endian bytes each.
pub fn pack_samples(samples: &[u32], n_bits: usize) -> Vec<u8> {
    let width = n_bits.div_ceil(8);
    samples
        .iter()
        .flat_map(|s| s.to_le_bytes().into_iter().take(width))
        .collect()
}
