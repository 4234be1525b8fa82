//! Closed-form predictions of average gate fidelity (AGF), heavy output
//! probability (HOP) and linear cross-entropy (LXE), and the maps between
//! them.

use std::collections::BTreeMap;
use std::f64::consts::LN_2;

use nalgebra::DMatrix;
use num_traits::ToPrimitive;
use rand::Rng;

use crate::circuits::sample_su4;
use crate::linalg::{kron, pauli, Mat2, Mat4, C64};

use crate::noisemodel::{allocation_matrix, effective_preserving, AllocationMatrix, NoiseSpec};
use crate::topology::{ExtendedGraph, QubitId, QubitRole};
use crate::{Error, Result};

/// Asymptotic ideal heavy output probability, (1 + ln 2) / 2.
pub const HOP_LIMIT: f64 = 0.5 + LN_2 / 2.0;

/// The QV pass threshold on HOP.
pub const HOP_THRESHOLD: f64 = 2.0 / 3.0;

fn dim(n: usize) -> f64 {
    (n as f64).exp2()
}

/// Global depolarizing channel with preserving factor ℘ on `n` qubits.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct GlobalPreserving {
    pub value: f64,
    pub n_qubits: usize,
}

impl GlobalPreserving {
    pub fn new(value: f64, n_qubits: usize) -> Result<Self> {
        if !(0.0..=1.0).contains(&value) {
            return Err(Error::InvalidArgument(format!(
                "global preserving factor {value} outside [0, 1]"
            )));
        }
        Ok(Self { value, n_qubits })
    }

    /// ℘ implied by an AGF: (2^N F − 1) / (2^N − 1).
    pub fn from_agf(agf: f64, n_qubits: usize) -> Self {
        Self {
            value: preserving_from_agf(agf, n_qubits),
            n_qubits,
        }
    }

    pub fn agf(&self) -> f64 {
        global_agf(self.value, self.n_qubits)
    }
}

pub fn global_agf(wp: f64, n: usize) -> f64 {
    wp + (1.0 - wp) / dim(n)
}

pub fn global_hop(wp: f64, hop_ideal: f64) -> f64 {
    hop_ideal * wp + (1.0 - wp) / 2.0
}

pub fn global_lxe(wp: f64, lxe_ideal: f64) -> f64 {
    lxe_ideal * wp
}

pub fn preserving_from_agf(agf: f64, n: usize) -> f64 {
    let d = dim(n);
    (d * agf - 1.0) / (d - 1.0)
}

/// H̄ = H_ideal ℘ + (1 − ℘)/2 with ℘ taken from the AGF.
pub fn hop_from_agf(agf: f64, hop_ideal: f64, n: usize) -> f64 {
    global_hop(preserving_from_agf(agf, n), hop_ideal)
}

pub fn lxe_from_agf(agf: f64, lxe_ideal: f64, n: usize) -> f64 {
    global_lxe(preserving_from_agf(agf, n), lxe_ideal)
}

/// Inverse of [`lxe_from_agf`].
pub fn agf_from_lxe(lxe: f64, lxe_ideal: f64, n: usize) -> Result<f64> {
    if lxe_ideal == 0.0 || !lxe_ideal.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "ideal cross-entropy must be nonzero, got {lxe_ideal}"
        )));
    }
    Ok(global_agf(lxe / lxe_ideal, n))
}

/// H̄ = 1/2 + (ln 2 / 2) χ̄ / χ̄_ideal.
pub fn hop_from_lxe(lxe: f64, lxe_ideal: f64) -> Result<f64> {
    if lxe_ideal == 0.0 || !lxe_ideal.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "ideal cross-entropy must be nonzero, got {lxe_ideal}"
        )));
    }
    Ok(0.5 + LN_2 / 2.0 * lxe / lxe_ideal)
}

/// Large-size shortcut H̄ ≈ (1 + F ln 2) / 2.
pub fn hop_from_agf_large_n(agf: f64) -> f64 {
    (1.0 + agf * LN_2) / 2.0
}

/// Large-size shortcut χ̄ ≈ F χ̄_ideal.
pub fn lxe_from_agf_large_n(agf: f64, lxe_ideal: f64) -> f64 {
    agf * lxe_ideal
}

/// Exponent 2⌊N/2⌋ applied to each effective preserving factor.
pub fn layer_exponent(n: usize) -> i32 {
    2 * (n / 2) as i32
}

/// F̄ = Π_q (1 + P̄_q^{2⌊N/2⌋}) / 2.
pub fn agf_from_preserving<I: IntoIterator<Item = f64>>(per_qubit: I, n: usize) -> f64 {
    let k = layer_exponent(n);
    per_qubit.into_iter().map(|p| (1.0 + p.powi(k)) / 2.0).product()
}

#[derive(Clone, Debug, PartialEq)]
pub struct FidelityPrediction {
    pub agf: f64,
    pub per_qubit: BTreeMap<QubitId, f64>,
    pub n_layers_exponent: i32,
}

/// Prediction from a precomputed allocation matrix.
pub fn predict_with_allocation(alloc: &AllocationMatrix, noise: &NoiseSpec) -> Result<FidelityPrediction> {
    let per_qubit = effective_preserving(alloc, noise)?;
    let n = per_qubit.len();
    Ok(FidelityPrediction {
        agf: agf_from_preserving(per_qubit.values().copied(), n),
        per_qubit,
        n_layers_exponent: layer_exponent(n),
    })
}

pub fn predicted_agf(graph: &ExtendedGraph, noise: &NoiseSpec) -> Result<FidelityPrediction> {
    predict_with_allocation(&allocation_matrix(graph)?, noise)
}

/// F̄ ≈ exp(−N 𝒜 ε / 2).
pub fn approx_agf(characteristic_cost: f64, n: usize, eps: f64) -> f64 {
    (-(n as f64) * characteristic_cost * eps / 2.0).exp()
}

/// Outcome-space transfer matrix of a noise model acting on the ideal
/// distribution.
#[derive(Clone, Debug, PartialEq)]
pub enum MarkovTransfer {
    /// Independent single-qubit depolarizing with preserving factors `P⃗`.
    Product(Vec<f64>),
    /// Permutation average: diagonal F̄, off-diagonal (1 − F̄)/(2^N − 1).
    PermutationAveraged { n_qubits: usize, fidelity: f64 },
}

impl MarkovTransfer {
    pub fn n_qubits(&self) -> usize {
        match self {
            MarkovTransfer::Product(p) => p.len(),
            MarkovTransfer::PermutationAveraged { n_qubits, .. } => *n_qubits,
        }
    }

    /// Dense column-stochastic matrix; qubit `i` is bit `i` of the index.
    pub fn dense(&self) -> DMatrix<f64> {
        let n = self.n_qubits();
        let d = 1usize << n;
        match self {
            MarkovTransfer::Product(p) => DMatrix::from_fn(d, d, |x, y| {
                (0..n)
                    .map(|q| {
                        let same = (x >> q) & 1 == (y >> q) & 1;
                        if same {
                            (1.0 + p[q]) / 2.0
                        } else {
                            (1.0 - p[q]) / 2.0
                        }
                    })
                    .product()
            }),
            MarkovTransfer::PermutationAveraged { fidelity, .. } => {
                let off = (1.0 - fidelity) / (d as f64 - 1.0);
                DMatrix::from_fn(d, d, |x, y| if x == y { *fidelity } else { off })
            }
        }
    }

    pub fn is_doubly_stochastic(&self, tol: f64) -> bool {
        let m = self.dense();
        let rows_ok = m.row_iter().all(|r| (r.sum() - 1.0).abs() <= tol);
        let cols_ok = m.column_iter().all(|c| (c.sum() - 1.0).abs() <= tol);
        rows_ok && cols_ok && m.iter().all(|&v| v >= -tol)
    }
}

/// Permutation average of the product transfer matrix, done analytically.
pub fn permutation_averaged_markov(preserving: &[f64]) -> MarkovTransfer {
    MarkovTransfer::PermutationAveraged {
        n_qubits: preserving.len(),
        fidelity: preserving.iter().map(|p| (1.0 + p) / 2.0).product(),
    }
}

/// Joins two single-QPU graphs through a memory pair attached at the local
/// sites `site_a` and `site_b`.
pub fn attach_memory(
    local_a: &ExtendedGraph,
    local_b: &ExtendedGraph,
    site_a: usize,
    site_b: usize,
) -> Result<ExtendedGraph> {
    for g in [local_a, local_b] {
        if g.is_dqc() || !g.memory().is_empty() {
            return Err(Error::InvalidArgument(
                "local graphs must be single-QPU without memory".into(),
            ));
        }
    }
    let (na, nb) = (local_a.n_qubits(), local_b.n_qubits());
    if site_a >= na || site_b >= nb {
        return Err(Error::InvalidArgument(format!(
            "attachment sites ({site_a}, {site_b}) out of range"
        )));
    }
    let mut roles = vec![(QubitRole::Working, 0); na];
    roles.extend(std::iter::repeat_n((QubitRole::Working, 1), nb));
    roles.push((QubitRole::Memory, 0));
    roles.push((QubitRole::Memory, 1));
    let (ma, mb) = (na + nb, na + nb + 1);
    let mut coupling: Vec<(usize, usize)> = local_a.coupling_edges().map(|(a, b)| (a.0, b.0)).collect();
    coupling.extend(local_b.coupling_edges().map(|(a, b)| (a.0 + na, b.0 + na)));
    coupling.push((site_a, ma));
    coupling.push((na + site_b, mb));
    ExtendedGraph::new(&roles, coupling, [(ma, mb)])
}

#[derive(Clone, Debug, PartialEq)]
pub struct PlacementScore {
    pub sites: (usize, usize),
    pub characteristic_cost: f64,
    pub entanglement_cost: f64,
}

/// Scores every memory attachment pair, in lexicographic site order.
pub fn placement_table(local_a: &ExtendedGraph, local_b: &ExtendedGraph) -> Result<Vec<PlacementScore>> {
    let mut out = Vec::with_capacity(local_a.n_qubits() * local_b.n_qubits());
    for sa in 0..local_a.n_qubits() {
        for sb in 0..local_b.n_qubits() {
            let g = attach_memory(local_a, local_b, sa, sb)?;
            let a = allocation_matrix(&g)?;
            out.push(PlacementScore {
                sites: (sa, sb),
                characteristic_cost: a.characteristic_cost().to_f64().unwrap_or(f64::NAN),
                entanglement_cost: a.entanglement_cost().to_f64().unwrap_or(f64::NAN),
            });
        }
    }
    Ok(out)
}

/// Exhaustive minimization of 𝒜 over memory attachment sites; ties go to
/// the lowest site pair.
pub fn optimize_memory_placement(local_a: &ExtendedGraph, local_b: &ExtendedGraph) -> Result<PlacementScore> {
    let table = placement_table(local_a, local_b)?;
    let mut best = table[0].clone();
    for s in &table[1..] {
        if s.characteristic_cost < best.characteristic_cost - 1e-12 {
            best = s.clone();
        }
    }
    Ok(best)
}

/// Least-squares slope through the origin of `(ε_in, ε_eff)` points.
pub fn calibration_fit(points: &[(f64, f64)]) -> Result<f64> {
    let sxx: f64 = points.iter().map(|(x, _)| x * x).sum();
    let sxy: f64 = points.iter().map(|(x, y)| x * y).sum();
    if points.is_empty() || sxx == 0.0 {
        return Err(Error::InvalidArgument(
            "calibration needs at least one nonzero input error rate".into(),
        ));
    }
    Ok(sxy / sxx)
}

fn bisect(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64) -> f64 {
    // f(lo) > 0 >= f(hi)
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Uniform error rate ε at which the uncalibrated prediction equals `agf`.
/// Working and memory qubits share the rate and the entanglement error is
/// held at `entanglement_error`.
pub fn effective_error(
    alloc: &AllocationMatrix,
    graph: &ExtendedGraph,
    agf: f64,
    entanglement_error: f64,
) -> Result<f64> {
    let predict = |eps: f64| -> f64 {
        let noise = NoiseSpec::uniform(graph, eps, eps, entanglement_error, 1.0).expect("rates in range");
        predict_with_allocation(alloc, &noise)
            .map(|p| p.agf)
            .unwrap_or(f64::NAN)
    };
    let top = predict(0.0);
    if agf >= top {
        return Ok(0.0);
    }
    let floor = predict(1.0);
    if agf <= floor {
        return Ok(1.0);
    }
    Ok(bisect(0.0, 1.0, |e| predict(e) - agf))
}

/// Entanglement error at which the two-QPU prediction drops to the
/// single-QPU one. `None` when the two-QPU device is already worse with
/// perfect pairs, `Some(1.0)` when it stays ahead for every ε_E.
pub fn entanglement_crossover(
    single: &ExtendedGraph,
    dqc: &ExtendedGraph,
    eps: f64,
    calibration_ratio: f64,
) -> Result<Option<f64>> {
    let base_noise = NoiseSpec::uniform(single, eps, eps, 0.0, calibration_ratio)?;
    let target = predicted_agf(single, &base_noise)?.agf;
    let alloc = allocation_matrix(dqc)?;
    let f = |ee: f64| -> f64 {
        let noise = NoiseSpec::uniform(dqc, eps, eps, ee, calibration_ratio).expect("rates in range");
        predict_with_allocation(&alloc, &noise)
            .map(|p| p.agf)
            .unwrap_or(f64::NAN)
            - target
    };
    if f(0.0) <= 0.0 {
        return Ok(None);
    }
    if f(1.0) > 0.0 {
        return Ok(Some(1.0));
    }
    Ok(Some(bisect(0.0, 1.0, f)))
}

/// Superoperator of `ρ ↦ UρU†` in row-major vectorization.
fn unitary_superop(u: &Mat4) -> DMatrix<C64> {
    DMatrix::from_fn(16, 16, |r, c| u[(r / 4, c / 4)] * u[(r % 4, c % 4)].conj())
}

/// Superoperator of the identity on the first qubit tensored with the
/// single-qubit depolarizing channel of preserving factor `p` on the second.
fn local_depolarizing_superop(p: f64) -> DMatrix<C64> {
    let id = Mat2::identity();
    let mut out = DMatrix::zeros(16, 16);
    for k in 0..4 {
        let w = if k == 0 { (1.0 + 3.0 * p) / 4.0 } else { (1.0 - p) / 4.0 };
        out += unitary_superop(&kron(&id, &pauli(k))) * C64::new(w, 0.0);
    }
    out
}

/// Spectral norm of the Monte Carlo average, over `samples` Haar-random
/// SU(4) gates, of the commutator `Û∘(I⊗D_p) − (I⊗D_p)∘Û`. The Haar
/// integral vanishes, so the estimate falls off as `samples^{-1/2}`.
pub fn haar_commutator_norm<R: Rng + ?Sized>(p: f64, samples: usize, rng: &mut R) -> Result<f64> {
    if samples == 0 || !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidArgument("need samples > 0 and p in [0, 1]".into()));
    }
    let d = local_depolarizing_superop(p);
    let mut acc = DMatrix::<C64>::zeros(16, 16);
    for _ in 0..samples {
        let u = unitary_superop(&sample_su4(rng));
        acc += &u * &d - &d * &u;
    }
    acc /= C64::new(samples as f64, 0.0);
    Ok(acc.singular_values().max())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::{standard_topology, MemoryPlacement, TopologyKind};
    use approx::assert_abs_diff_eq;

    #[test]
    fn commutator_superops() {
        // full preservation commutes with everything
        let mut rng = crate::seed::rng(1, &[]);
        assert!(haar_commutator_norm(1.0, 10, &mut rng).unwrap() < 1e-12);
        // a single gate generally does not commute with local noise
        assert!(haar_commutator_norm(0.0, 1, &mut rng).unwrap() > 0.1);
        // the superoperator of a unitary is unitary
        let u = unitary_superop(&sample_su4(&mut rng));
        let err = (&u * u.adjoint() - DMatrix::<C64>::identity(16, 16)).norm();
        assert!(err < 1e-12);
        // the depolarizer is trace preserving: ⟨⟨I| D = ⟨⟨I|
        let d = local_depolarizing_superop(0.3);
        for c in 0..16 {
            let s: C64 = (0..4).map(|i| d[(5 * i, c)]).sum();
            let expect = if c % 5 == 0 { 1.0 } else { 0.0 };
            assert!((s - C64::new(expect, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn global_forms() {
        assert_eq!(global_agf(1.0, 5), 1.0);
        assert_abs_diff_eq!(global_agf(0.0, 3), 0.125);
        assert_abs_diff_eq!(global_agf(0.5, 2), 0.625);
        assert_eq!(global_hop(0.0, 0.85), 0.5);
        assert_eq!(global_lxe(0.0, 0.9), 0.0);
        assert_abs_diff_eq!(global_hop(0.5, 0.85), 0.675, epsilon = 1e-15);
        assert_eq!(global_hop(1.0, 0.83), 0.83);
        let g = GlobalPreserving::from_agf(0.625, 2);
        assert_abs_diff_eq!(g.value, 0.5, epsilon = 1e-15);
        assert!(GlobalPreserving::new(1.2, 2).is_err());
    }

    #[test]
    fn agf_correspondences() {
        for n in 1..=10 {
            let d = (n as f64).exp2();
            assert_abs_diff_eq!(hop_from_agf(1.0, 0.84, n), 0.84, epsilon = 1e-12);
            assert_abs_diff_eq!(lxe_from_agf(1.0, 0.97, n), 0.97, epsilon = 1e-12);
            assert_abs_diff_eq!(hop_from_agf(1.0 / d, 0.84, n), 0.5, epsilon = 1e-12);
            assert_abs_diff_eq!(lxe_from_agf(1.0 / d, 0.97, n), 0.0, epsilon = 1e-12);
        }
        assert!(agf_from_lxe(0.3, 0.0, 4).is_err());
        assert!(hop_from_lxe(0.3, 0.0).is_err());
    }

    #[test]
    fn threshold_ratio() {
        let ratio = 1.0 / (3.0 * LN_2);
        assert_abs_diff_eq!(hop_from_lxe(ratio, 1.0).unwrap(), 2.0 / 3.0, epsilon = 1e-14);
        assert_abs_diff_eq!(ratio, 0.4809, epsilon = 1e-4);
        assert_abs_diff_eq!(hop_from_lxe(0.9, 0.9).unwrap(), HOP_LIMIT, epsilon = 1e-15);
    }

    #[test]
    fn large_n_shortcuts_match_at_scale() {
        let f = 0.7;
        assert_abs_diff_eq!(lxe_from_agf(f, 1.0, 40), lxe_from_agf_large_n(f, 1.0), epsilon = 1e-10);
        assert_abs_diff_eq!(hop_from_agf(f, HOP_LIMIT, 40), hop_from_agf_large_n(f), epsilon = 1e-10);
    }

    #[test]
    fn fully_connected_reduces_to_bare_factor() {
        for n in 2..=8 {
            let g = standard_topology(TopologyKind::FullyConnected, n, false, &MemoryPlacement::Hub).unwrap();
            let noise = NoiseSpec::uniform(&g, 0.003, 0.0, 0.0, 1.0).unwrap();
            let pred = predicted_agf(&g, &noise).unwrap();
            let p: f64 = 0.997;
            let k = layer_exponent(n);
            let want = ((1.0 + p.powi(k)) / 2.0).powi(n as i32);
            assert_abs_diff_eq!(pred.agf, want, epsilon = 1e-13);
        }
    }

    #[test]
    fn noiseless_prediction_is_one() {
        let g = standard_topology(TopologyKind::Grid2D, 8, true, &MemoryPlacement::Hub).unwrap();
        let noise = NoiseSpec::uniform(&g, 0.0, 0.0, 0.0, 1.0).unwrap();
        assert_eq!(predicted_agf(&g, &noise).unwrap().agf, 1.0);
        assert_eq!(approx_agf(12.0, 8, 0.0), 1.0);
        assert_abs_diff_eq!(approx_agf(4.0, 4, 0.01), (-0.08f64).exp(), epsilon = 1e-15);
    }

    #[test]
    fn hub_memory_beats_single_line() {
        let hub = MemoryPlacement::Hub;
        let single = standard_topology(TopologyKind::Line1D, 8, false, &hub).unwrap();
        let dqc = standard_topology(TopologyKind::Line1D, 8, true, &hub).unwrap();
        let ns = NoiseSpec::uniform(&single, 0.001, 0.001, 0.0, 1.0).unwrap();
        let nd = NoiseSpec::uniform(&dqc, 0.001, 0.001, 0.0, 1.0).unwrap();
        assert!(predicted_agf(&dqc, &nd).unwrap().agf > predicted_agf(&single, &ns).unwrap().agf);
    }

    fn permutations(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for p in permutations(n - 1) {
            for i in 0..n {
                let mut q = p.clone();
                q.insert(i, n - 1);
                out.push(q);
            }
        }
        out
    }

    #[test]
    fn permutation_average_matches_brute_force() {
        for p in [vec![1.0], vec![0.8], vec![0.9, 0.6], vec![1.0, 0.3]] {
            let d = 1 << p.len();
            let m = MarkovTransfer::Product(p.clone()).dense();
            let perms = permutations(d);
            let mut avg = DMatrix::<f64>::zeros(d, d);
            for perm in &perms {
                let pm = DMatrix::from_fn(d, d, |i, j| if perm[j] == i { 1.0 } else { 0.0 });
                avg += pm.transpose() * &m * &pm;
            }
            avg /= perms.len() as f64;
            let want = permutation_averaged_markov(&p);
            assert!((avg - want.dense()).abs().max() < 1e-12);
            assert!(want.is_doubly_stochastic(1e-12));
        }
        assert_eq!(
            permutation_averaged_markov(&[1.0]).dense(),
            DMatrix::<f64>::identity(2, 2)
        );
    }

    #[test]
    fn placement_prefers_the_inner_line_node() {
        let hub = MemoryPlacement::Hub;
        let line = standard_topology(TopologyKind::Line1D, 4, false, &hub).unwrap();
        let table = placement_table(&line, &line).unwrap();
        assert_eq!(table.len(), 16);
        let best = optimize_memory_placement(&line, &line).unwrap();
        let edge = table.iter().find(|s| s.sites == (3, 0)).unwrap();
        assert!(best.characteristic_cost < edge.characteristic_cost);
        assert!(matches!(best.sites.0, 1 | 2) && matches!(best.sites.1, 1 | 2));

        let fc = standard_topology(TopologyKind::FullyConnected, 4, false, &hub).unwrap();
        let table = placement_table(&fc, &fc).unwrap();
        assert!(table
            .iter()
            .all(|s| (s.characteristic_cost - table[0].characteristic_cost).abs() < 1e-12));
        assert_eq!(optimize_memory_placement(&fc, &fc).unwrap().sites, (0, 0));
    }

    #[test]
    fn attach_memory_matches_standard_builder() {
        let hub = MemoryPlacement::Hub;
        let line = standard_topology(TopologyKind::Line1D, 4, false, &hub).unwrap();
        let built = attach_memory(&line, &line, 1, 1).unwrap();
        let std = standard_topology(TopologyKind::Line1D, 8, true, &hub).unwrap();
        assert_eq!(built, std);
    }

    #[test]
    fn calibration() {
        let pts: Vec<(f64, f64)> = [0.001, 0.002, 0.004].iter().map(|&x| (x, 0.9 * x)).collect();
        assert_abs_diff_eq!(calibration_fit(&pts).unwrap(), 0.9, epsilon = 1e-14);
        assert_abs_diff_eq!(calibration_fit(&[(0.002, 0.0017)]).unwrap(), 0.85, epsilon = 1e-14);
        assert!(calibration_fit(&[(0.0, 0.1)]).is_err());
        assert!(calibration_fit(&[]).is_err());
    }

    #[test]
    fn effective_error_inverts_the_prediction() {
        let g = standard_topology(TopologyKind::Line1D, 6, true, &MemoryPlacement::Hub).unwrap();
        let a = allocation_matrix(&g).unwrap();
        let noise = NoiseSpec::uniform(&g, 0.0023, 0.0023, 0.0, 1.0).unwrap();
        let f = predict_with_allocation(&a, &noise).unwrap().agf;
        assert_abs_diff_eq!(effective_error(&a, &g, f, 0.0).unwrap(), 0.0023, epsilon = 1e-12);
        assert_eq!(effective_error(&a, &g, 1.0, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn crossover_balances_the_two_devices() {
        let hub = MemoryPlacement::Hub;
        let single = standard_topology(TopologyKind::Line1D, 8, false, &hub).unwrap();
        let dqc = standard_topology(TopologyKind::Line1D, 8, true, &hub).unwrap();
        let x = entanglement_crossover(&single, &dqc, 0.0015, 1.0).unwrap().unwrap();
        assert!(x > 0.0 && x < 0.02);
        let ns = NoiseSpec::uniform(&single, 0.0015, 0.0015, 0.0, 1.0).unwrap();
        let nd = NoiseSpec::uniform(&dqc, 0.0015, 0.0015, x, 1.0).unwrap();
        assert_abs_diff_eq!(
            predicted_agf(&single, &ns).unwrap().agf,
            predicted_agf(&dqc, &nd).unwrap().agf,
            epsilon = 1e-10
        );

        let fc = standard_topology(TopologyKind::FullyConnected, 8, false, &hub).unwrap();
        let fcd = standard_topology(TopologyKind::FullyConnected, 8, true, &hub).unwrap();
        assert_eq!(entanglement_crossover(&fc, &fcd, 0.0015, 1.0).unwrap(), None);
    }
}
