//! Lowering of compiled circuits plus a noise attachment into a flat list of
//! simulator operations.

use serde::{Deserialize, Serialize};

use crate::circuits::{BlockKind, Gate, PhysicalCircuit};
use crate::linalg::{cnot_high_control, cnot_low_control, kron, Mat2, Mat4};
use crate::noisemodel::NoiseSpec;
use crate::topology::QubitId;
use crate::{Error, Result};

/// Where depolarizing channels are inserted.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseMode {
    /// One two-qubit depolarizing channel after every SU(4) body and every
    /// swap; each memory qubit is depolarized once per telegated SU(4).
    TwoQubitGate,
    /// Two single-qubit depolarizing channels after every SU(4) body and
    /// every swap; memory noise as in `TwoQubitGate`.
    PerSu4,
    /// Gate-level noise: ε₁ after every single-qubit gate and two
    /// single-qubit channels at ε after every CNOT (swaps are three CNOTs).
    PerBasisGate,
}

impl std::fmt::Display for NoiseMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            NoiseMode::TwoQubitGate => "two-qubit-gate",
            NoiseMode::PerSu4 => "per-su4",
            NoiseMode::PerBasisGate => "per-basis-gate",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NoiseAttachment {
    pub mode: NoiseMode,
    /// Per-qubit rate ε_q, indexed by qubit id.
    pub rates: Vec<f64>,
    /// Rate of the two-qubit channel applied to every fresh Bell pair.
    pub bell_error: f64,
    /// Single-qubit gate rate as a fraction of the qubit's rate (gate-level
    /// mode only).
    pub single_qubit_fraction: f64,
}

impl NoiseAttachment {
    pub fn new(mode: NoiseMode, rates: Vec<f64>, bell_error: f64) -> Result<Self> {
        for &r in rates.iter().chain([&bell_error]) {
            if !(0.0..=1.0).contains(&r) {
                return Err(Error::InvalidArgument(format!("noise rate {r} outside [0, 1]")));
            }
        }
        Ok(Self {
            mode,
            rates,
            bell_error,
            single_qubit_fraction: 0.0,
        })
    }

    pub fn from_spec(mode: NoiseMode, spec: &NoiseSpec) -> Result<Self> {
        Self::new(mode, spec.per_qubit_error.clone(), spec.entanglement_error)
    }

    pub fn noiseless(mode: NoiseMode, n_qubits: usize) -> Self {
        Self {
            mode,
            rates: vec![0.0; n_qubits],
            bell_error: 0.0,
            single_qubit_fraction: 0.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Op {
    U1 {
        q: usize,
        u: Mat2,
    },
    U2 {
        a: usize,
        b: usize,
        u: Mat4,
    },
    Cnot {
        control: usize,
        target: usize,
    },
    Swap {
        a: usize,
        b: usize,
    },
    Bell {
        a: usize,
        b: usize,
    },
    MeasureZ {
        q: usize,
        bit: usize,
    },
    MeasureX {
        q: usize,
        bit: usize,
    },
    Controlled {
        q: usize,
        u: Mat2,
        bit: usize,
    },
    /// Single-qubit depolarizing: X, Y or Z each with probability p/4.
    Depol1 {
        q: usize,
        p: f64,
    },
    /// Two-qubit depolarizing: each of the 15 non-identity Paulis with
    /// probability p/16.
    Depol2 {
        a: usize,
        b: usize,
        p: f64,
    },
    /// Depolarizing noise on the Bell pair of a nonlocal CNOT, pushed
    /// through the gadget onto its operands: the X parity of the pair's
    /// Pauli lands on `target`, the Z parity on `control`. `pair` selects
    /// the two-qubit channel, otherwise one memory qubit is depolarized.
    Frame {
        control: usize,
        target: usize,
        p: f64,
        pair: bool,
    },
}

impl Op {
    /// Probability that the channel applies a non-identity Pauli.
    pub fn fire_probability(&self) -> f64 {
        match *self {
            Op::Depol1 { p, .. } => 0.75 * p,
            Op::Depol2 { p, .. } | Op::Frame { p, pair: true, .. } => 15.0 / 16.0 * p,
            Op::Frame { p, pair: false, .. } => 0.75 * p,
            _ => 0.0,
        }
    }

    pub fn is_noise(&self) -> bool {
        matches!(self, Op::Depol1 { .. } | Op::Depol2 { .. } | Op::Frame { .. })
    }
}

/// A flat simulator program. Blocks mirror the compiled circuit and are the
/// granularity at which noiseless prefixes are cached.
#[derive(Clone, Debug, PartialEq)]
pub struct Program {
    pub n_qubits: usize,
    pub working: Vec<usize>,
    pub n_bits: usize,
    pub ops: Vec<Op>,
    /// `block_starts[b]` is the index of block `b`'s first op; one extra
    /// entry marks the end.
    pub block_starts: Vec<usize>,
    /// Block index of every op.
    pub block_of: Vec<usize>,
}

impl Program {
    pub fn n_blocks(&self) -> usize {
        self.block_starts.len() - 1
    }

    /// Indices of noise ops with a nonzero firing probability.
    pub fn noise_sites(&self) -> Vec<usize> {
        self.ops
            .iter()
            .enumerate()
            .filter(|(_, op)| op.fire_probability() > 0.0)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn has_measurements(&self) -> bool {
        self.ops
            .iter()
            .any(|op| matches!(op, Op::MeasureZ { .. } | Op::MeasureX { .. }))
    }
}

struct Lowering<'a> {
    noise: &'a NoiseAttachment,
    ops: Vec<Op>,
}

impl Lowering<'_> {
    fn rate(&self, q: usize) -> f64 {
        self.noise.rates[q]
    }

    fn depol1(&mut self, q: usize, p: f64) {
        if p > 0.0 {
            self.ops.push(Op::Depol1 { q, p });
        }
    }

    fn depol2(&mut self, a: usize, b: usize, p: f64) {
        if p > 0.0 {
            self.ops.push(Op::Depol2 { a, b, p });
        }
    }

    /// Noise closing an SU(4) body or a swap in the coarse modes.
    fn pair_noise(&mut self, a: usize, b: usize) {
        match self.noise.mode {
            NoiseMode::TwoQubitGate => {
                let p = 0.5 * (self.rate(a) + self.rate(b));
                self.depol2(a, b, p);
            }
            NoiseMode::PerSu4 => {
                self.depol1(a, self.rate(a));
                self.depol1(b, self.rate(b));
            }
            NoiseMode::PerBasisGate => unreachable!("gate-level mode places noise per gate"),
        }
    }

    fn cnot_with_noise(&mut self, control: usize, target: usize) {
        self.ops.push(Op::Cnot { control, target });
        if self.noise.mode == NoiseMode::PerBasisGate {
            self.depol1(control, self.rate(control));
            self.depol1(target, self.rate(target));
        }
    }

    /// Gate-by-gate lowering used for telegates in every mode and for all
    /// blocks in the gate-level mode.
    fn gates(&mut self, gates: &[Gate], memory_noise: Option<(usize, usize)>) {
        let gate_level = self.noise.mode == NoiseMode::PerBasisGate;
        let mut memory_noise = memory_noise;
        for g in gates {
            match *g {
                Gate::Single { q, u } => {
                    self.ops.push(Op::U1 { q: q.0, u });
                    if gate_level {
                        let p = self.noise.single_qubit_fraction * self.rate(q.0);
                        self.depol1(q.0, p);
                    }
                }
                Gate::Cnot { control, target } => self.cnot_with_noise(control.0, target.0),
                Gate::Swap { a, b } => {
                    if gate_level {
                        self.cnot_with_noise(a.0, b.0);
                        self.cnot_with_noise(b.0, a.0);
                        self.cnot_with_noise(a.0, b.0);
                    } else {
                        self.ops.push(Op::Swap { a: a.0, b: b.0 });
                    }
                }
                Gate::BellPrep { a, b } => {
                    self.ops.push(Op::Bell { a: a.0, b: b.0 });
                    self.depol2(a.0, b.0, self.noise.bell_error);
                    if let Some((ma, mb)) = memory_noise.take() {
                        self.depol1(ma, self.rate(ma));
                        self.depol1(mb, self.rate(mb));
                    }
                }
                Gate::MeasureZ { q, bit } => self.ops.push(Op::MeasureZ { q: q.0, bit }),
                Gate::MeasureX { q, bit } => self.ops.push(Op::MeasureX { q: q.0, bit }),
                Gate::Controlled { q, u, bit } => self.ops.push(Op::Controlled { q: q.0, u, bit }),
            }
        }
    }
}

/// Lowers a compiled circuit under a noise attachment.
pub fn lower(pc: &PhysicalCircuit, noise: &NoiseAttachment) -> Result<Program> {
    if noise.rates.len() != pc.n_qubits {
        return Err(Error::InvalidArgument(format!(
            "noise covers {} qubits, circuit has {}",
            noise.rates.len(),
            pc.n_qubits
        )));
    }
    let mut lw = Lowering { noise, ops: Vec::new() };
    let mut block_starts = Vec::with_capacity(pc.blocks.len() + 1);
    let mut block_of = Vec::new();
    for (bi, block) in pc.blocks.iter().enumerate() {
        block_starts.push(lw.ops.len());
        let coarse = noise.mode != NoiseMode::PerBasisGate;
        match &block.kind {
            BlockKind::Swap { a, b } if coarse => {
                lw.ops.push(Op::Swap { a: a.0, b: b.0 });
                lw.pair_noise(a.0, b.0);
            }
            BlockKind::Su4 { a, b, u } if coarse => {
                lw.ops.push(Op::U2 { a: a.0, b: b.0, u: *u });
                lw.pair_noise(a.0, b.0);
            }
            BlockKind::Telegate { a, b, memory, .. } if coarse => {
                lw.gates(&block.gates, Some((memory.0 .0, memory.1 .0)));
                lw.pair_noise(a.0, b.0);
            }
            _ => lw.gates(&block.gates, None),
        }
        block_of.resize(lw.ops.len(), bi);
    }
    block_starts.push(lw.ops.len());
    Ok(Program {
        n_qubits: pc.n_qubits,
        working: pc.working.iter().map(|q| q.0).collect(),
        n_bits: pc.n_bits,
        ops: lw.ops,
        block_starts,
        block_of,
    })
}

/// Pauli `k` as (x, z) bits.
pub(crate) fn pauli_bits(k: usize) -> (bool, bool) {
    (k == 1 || k == 2, k == 2 || k == 3)
}

fn gate_matrix(g: &Gate, a: usize, b: usize) -> Result<Mat4> {
    let id = Mat2::identity();
    let m = match *g {
        Gate::Single { q, u } if q.0 == a => kron(&u, &id),
        Gate::Single { q, u } if q.0 == b => kron(&id, &u),
        Gate::Cnot { control, target } if (control.0, target.0) == (a, b) => cnot_high_control(),
        Gate::Cnot { control, target } if (control.0, target.0) == (b, a) => cnot_low_control(),
        _ => {
            return Err(Error::InvalidArgument(format!(
                "gate {g:?} does not act on the telegate operands"
            )))
        }
    };
    Ok(m)
}

/// Lowers a compiled circuit onto its working register alone. Every
/// nonlocal CNOT becomes a local CNOT between its operands followed by the
/// memory noise mapped through the gadget, which leaves the working-register
/// output distribution unchanged: the Bell pair is fresh for every gadget,
/// the corrections undo the measurement outcomes, and a Pauli on the pair
/// reaches the operands as described on [`Op::Frame`]. Noiseless stretches
/// of a telegate are fused into one two-qubit unitary.
///
/// Only the coarse noise modes are supported; the gate-level mode places
/// noise between the gadget's own gates.
pub fn lower_working(pc: &PhysicalCircuit, noise: &NoiseAttachment) -> Result<Program> {
    if noise.mode == NoiseMode::PerBasisGate {
        return Err(Error::InvalidArgument(
            "working-register lowering needs a coarse noise mode".into(),
        ));
    }
    if noise.rates.len() != pc.n_qubits {
        return Err(Error::InvalidArgument(format!(
            "noise covers {} qubits, circuit has {}",
            noise.rates.len(),
            pc.n_qubits
        )));
    }
    let n = pc.working.len();
    let mut index = vec![usize::MAX; pc.n_qubits];
    for (i, q) in pc.working.iter().enumerate() {
        index[q.0] = i;
    }
    let full: Vec<f64> = pc.working.iter().map(|q| noise.rates[q.0]).collect();
    let local = NoiseAttachment {
        rates: full,
        ..noise.clone()
    };
    let mut lw = Lowering {
        noise: &local,
        ops: Vec::new(),
    };
    let mut block_starts = Vec::with_capacity(pc.blocks.len() + 1);
    let mut block_of = Vec::new();
    for (bi, block) in pc.blocks.iter().enumerate() {
        block_starts.push(lw.ops.len());
        match &block.kind {
            BlockKind::Swap { a, b } => {
                let (a, b) = (index[a.0], index[b.0]);
                lw.ops.push(Op::Swap { a, b });
                lw.pair_noise(a, b);
            }
            BlockKind::Su4 { a, b, u } => {
                let (a, b) = (index[a.0], index[b.0]);
                lw.ops.push(Op::U2 { a, b, u: *u });
                lw.pair_noise(a, b);
            }
            BlockKind::Telegate { a, b, memory, .. } => {
                let (ma, mb) = (noise.rates[memory.0 .0], noise.rates[memory.1 .0]);
                let (ga, gb) = (a.0, b.0);
                let (a, b) = (index[ga], index[gb]);
                let mut acc = Mat4::identity();
                let mut first = true;
                let mut gates = block.gates.iter();
                while let Some(g) = gates.next() {
                    if !matches!(g, Gate::BellPrep { .. }) {
                        acc = gate_matrix(g, ga, gb)? * acc;
                        continue;
                    }
                    // Bell, CNOT(c→m_c), MZ, cX, CNOT(m_t→t), MX, cZ
                    let rest: Vec<&Gate> = gates.by_ref().take(6).collect();
                    let (c, t) = match (rest.first(), rest.get(3)) {
                        (Some(Gate::Cnot { control, .. }), Some(Gate::Cnot { target, .. })) if rest.len() == 6 => {
                            (control.0, target.0)
                        }
                        _ => return Err(Error::InvalidArgument("malformed nonlocal CNOT in telegate".into())),
                    };
                    acc = gate_matrix(
                        &Gate::Cnot {
                            control: QubitId(c),
                            target: QubitId(t),
                        },
                        ga,
                        gb,
                    )? * acc;
                    lw.ops.push(Op::U2 { a, b, u: acc });
                    acc = Mat4::identity();
                    let (c, t) = (index[c], index[t]);
                    let frame = |p: f64, pair: bool| Op::Frame {
                        control: c,
                        target: t,
                        p,
                        pair,
                    };
                    if noise.bell_error > 0.0 {
                        lw.ops.push(frame(noise.bell_error, true));
                    }
                    if std::mem::take(&mut first) {
                        for p in [ma, mb] {
                            if p > 0.0 {
                                lw.ops.push(frame(p, false));
                            }
                        }
                    }
                }
                lw.ops.push(Op::U2 { a, b, u: acc });
                lw.pair_noise(a, b);
            }
        }
        block_of.resize(lw.ops.len(), bi);
    }
    block_starts.push(lw.ops.len());
    Ok(Program {
        n_qubits: n,
        working: (0..n).collect(),
        n_bits: 0,
        ops: lw.ops,
        block_starts,
        block_of,
    })
}
