//! Monte Carlo Pauli-trajectory execution.
//!
//! The noiseless program is run once and the state at every block boundary
//! is kept. A shot first draws where its first error lands; shots without
//! errors sample the noiseless output directly and the rest resume from the
//! snapshot of the block holding their first error.

use rand::Rng;
use rand_distr::{Distribution, Exp1};

use super::program::{pauli_bits, Op, Program};
use super::state::StateVector;
use crate::circuits::PhysicalCircuit;
use crate::sim::program::{lower, NoiseAttachment};
use crate::{seed, Error, Result};

/// Largest register (working plus memory qubits) the trajectory engine takes.
pub const MAX_SIM_QUBITS: usize = 20;

fn apply_op<R: Rng + ?Sized>(state: &mut StateVector, bits: &mut [bool], op: &Op, rng: &mut R) {
    match op {
        Op::U1 { q, u } => state.apply_1q(*q, u),
        Op::U2 { a, b, u } => state.apply_2q(*a, *b, u),
        Op::Cnot { control, target } => state.cnot(*control, *target),
        Op::Swap { a, b } => state.swap(*a, *b),
        Op::Bell { a, b } => {
            state.reset(*a, rng);
            state.reset(*b, rng);
            state.apply_1q(*a, &crate::linalg::hadamard());
            state.cnot(*a, *b);
        }
        Op::MeasureZ { q, bit } => bits[*bit] = state.measure_z(*q, rng),
        Op::MeasureX { q, bit } => {
            let h = crate::linalg::hadamard();
            state.apply_1q(*q, &h);
            bits[*bit] = state.measure_z(*q, rng);
            state.apply_1q(*q, &h);
        }
        Op::Controlled { q, u, bit } => {
            if bits[*bit] {
                state.apply_1q(*q, u);
            }
        }
        Op::Depol1 { .. } | Op::Depol2 { .. } | Op::Frame { .. } => {}
    }
}

/// Applies a uniformly chosen non-identity Pauli for a channel that fired.
fn apply_error<R: Rng + ?Sized>(state: &mut StateVector, op: &Op, rng: &mut R) {
    match *op {
        Op::Depol1 { q, .. } => state.pauli(q, rng.random_range(1..4)),
        Op::Depol2 { a, b, .. } => {
            let k = rng.random_range(1..16);
            state.pauli(a, k >> 2);
            state.pauli(b, k & 3);
        }
        Op::Frame {
            control, target, pair, ..
        } => {
            let (x, z) = if pair {
                let k = rng.random_range(1..16);
                let ((xa, za), (xb, zb)) = (pauli_bits(k >> 2), pauli_bits(k & 3));
                (xa ^ xb, za ^ zb)
            } else {
                pauli_bits(rng.random_range(1..4))
            };
            if x {
                state.pauli(target, 1);
            }
            if z {
                state.pauli(control, 3);
            }
        }
        _ => unreachable!("only noise ops fire"),
    }
}

fn output_map(program: &Program) -> Vec<u32> {
    (0..1usize << program.n_qubits)
        .map(|i| {
            program
                .working
                .iter()
                .enumerate()
                .map(|(bit, &q)| (((i >> q) & 1) as u32) << bit)
                .sum()
        })
        .collect()
}

fn sample_index<R: Rng + ?Sized>(probs: &[f64], rng: &mut R) -> u32 {
    let total: f64 = probs.iter().sum();
    let mut r = rng.random::<f64>() * total;
    for (i, &p) in probs.iter().enumerate() {
        r -= p;
        if r < 0.0 {
            return i as u32;
        }
    }
    probs.iter().rposition(|&p| p > 0.0).unwrap_or(0) as u32
}

/// Noiseless execution with block-boundary snapshots.
#[derive(Clone, Debug)]
pub struct IdealRun {
    snapshots: Vec<StateVector>,
    out_map: Vec<u32>,
    /// Distribution of the working register at the end of the program.
    pub output: Vec<f64>,
}

impl IdealRun {
    pub fn n_blocks(&self) -> usize {
        self.snapshots.len()
    }
}

pub fn check_capacity(n_qubits: usize) -> Result<()> {
    if n_qubits > MAX_SIM_QUBITS {
        return Err(Error::Capacity {
            qubits: n_qubits,
            max: MAX_SIM_QUBITS,
        });
    }
    Ok(())
}

/// Runs `program` without noise. Measurement outcomes inside telegates are
/// drawn from `rng`; the working-register output does not depend on them.
pub fn ideal_run<R: Rng + ?Sized>(program: &Program, rng: &mut R) -> Result<IdealRun> {
    check_capacity(program.n_qubits)?;
    let mut state = StateVector::zero(program.n_qubits);
    let mut bits = vec![false; program.n_bits];
    let mut snapshots = Vec::with_capacity(program.n_blocks());
    for b in 0..program.n_blocks() {
        snapshots.push(state.clone());
        for op in &program.ops[program.block_starts[b]..program.block_starts[b + 1]] {
            apply_op(&mut state, &mut bits, op, rng);
        }
    }
    let out_map = output_map(program);
    let output = state.marginal(&out_map, 1 << program.working.len());
    Ok(IdealRun {
        snapshots,
        out_map,
        output,
    })
}

/// Applies every noiseless operation of `program` to `state`, drawing
/// measurement outcomes from `rng`.
pub fn evolve<R: Rng + ?Sized>(program: &Program, state: &mut StateVector, rng: &mut R) -> Result<()> {
    if state.n_qubits() != program.n_qubits {
        return Err(Error::InvalidArgument("state and program sizes differ".into()));
    }
    let mut bits = vec![false; program.n_bits];
    for op in &program.ops {
        apply_op(state, &mut bits, op, rng);
    }
    Ok(())
}

/// Cumulative hazard of the program's noise sites: a Poisson clock with
/// these increments fires each site independently with its probability.
struct Hazard {
    sites: Vec<usize>,
    cumulative: Vec<f64>,
}

impl Hazard {
    fn new(program: &Program) -> Self {
        let sites = program.noise_sites();
        let mut acc = 0.0;
        let cumulative = sites
            .iter()
            .map(|&i| {
                let p = program.ops[i].fire_probability();
                acc += -(-p).ln_1p();
                acc
            })
            .collect();
        Self { sites, cumulative }
    }

    /// Position in `sites` of the first site whose cumulative hazard
    /// reaches `t`.
    fn next_after(&self, t: f64) -> Option<usize> {
        let k = self.cumulative.partition_point(|&h| h < t);
        (k < self.sites.len()).then_some(k)
    }
}

fn run_shot<R: Rng + ?Sized>(program: &Program, ideal: &IdealRun, hazard: &Hazard, rng: &mut R) -> u32 {
    let e: f64 = Exp1.sample(rng);
    let Some(mut next) = hazard.next_after(e) else {
        return sample_index(&ideal.output, rng);
    };
    let first_op = hazard.sites[next];
    let block = program.block_of[first_op];
    let mut state = ideal.snapshots[block].clone();
    let mut bits = vec![false; program.n_bits];
    let mut fire_at = Some(first_op);
    for (i, op) in program.ops.iter().enumerate().skip(program.block_starts[block]) {
        if Some(i) == fire_at {
            apply_error(&mut state, op, rng);
            let gap: f64 = Exp1.sample(rng);
            let t = hazard.cumulative[next] + gap;
            fire_at = hazard.next_after(t).map(|k| {
                next = k;
                hazard.sites[k]
            });
        } else {
            apply_op(&mut state, &mut bits, op, rng);
        }
    }
    let probs = state.marginal(&ideal.out_map, ideal.output.len());
    sample_index(&probs, rng)
}

/// Samples `shots` outcomes of the working register. Shot `s` draws all its
/// randomness from `(master_seed, circuit_index, s)`.
pub fn run_shots(program: &Program, ideal: &IdealRun, shots: usize, master_seed: u64, circuit_index: u64) -> Vec<u32> {
    let hazard = Hazard::new(program);
    (0..shots as u64)
        .map(|s| {
            let mut rng = seed::rng(master_seed, &[seed::stream::SHOT, circuit_index, s]);
            run_shot(program, ideal, &hazard, &mut rng)
        })
        .collect()
}

/// One-call trajectory sampling of a compiled circuit. Output bit `i` is
/// working qubit `i`.
pub fn run_noisy<R: Rng + ?Sized>(
    pc: &PhysicalCircuit,
    noise: &NoiseAttachment,
    shots: usize,
    rng: &mut R,
) -> Result<Vec<u32>> {
    if shots == 0 {
        return Err(Error::InvalidArgument("shots must be at least 1".into()));
    }
    let program = lower(pc, noise)?;
    let ideal = ideal_run(&program, rng)?;
    let master: u64 = rng.random();
    Ok(run_shots(&program, &ideal, shots, master, 0))
}
