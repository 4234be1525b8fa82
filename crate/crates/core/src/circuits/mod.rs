//! Quantum-volume circuits, two-qubit synthesis and compilation onto an
//! extended connectivity graph.

mod compile;
mod ejpp;
mod haar;
mod kak;
pub mod text;

use rand::seq::SliceRandom;
use rand::Rng;

pub use compile::{compile, Block, BlockKind, PhysicalCircuit};
pub use ejpp::ejpp_cnot;
pub use haar::sample_su4;
pub use kak::{factor_local, kak_decompose, KakDecomposition};

use crate::linalg::{unitarity_error2, Mat2, Mat4};
use crate::topology::QubitId;
use crate::{Error, Result};

/// A physical operation. Classical bits are indices into the circuit's bit
/// register.
#[derive(Clone, Debug, PartialEq)]
pub enum Gate {
    Single {
        q: QubitId,
        u: Mat2,
    },
    Cnot {
        control: QubitId,
        target: QubitId,
    },
    Swap {
        a: QubitId,
        b: QubitId,
    },
    /// Reset both qubits and prepare (|00⟩ + |11⟩)/√2.
    BellPrep {
        a: QubitId,
        b: QubitId,
    },
    MeasureZ {
        q: QubitId,
        bit: usize,
    },
    MeasureX {
        q: QubitId,
        bit: usize,
    },
    /// Apply `u` to `q` when classical bit `bit` is set.
    Controlled {
        q: QubitId,
        u: Mat2,
        bit: usize,
    },
}

impl Gate {
    pub fn qubits(&self) -> Vec<QubitId> {
        match *self {
            Gate::Single { q, .. }
            | Gate::MeasureZ { q, .. }
            | Gate::MeasureX { q, .. }
            | Gate::Controlled { q, .. } => {
                vec![q]
            }
            Gate::Cnot { control, target } => vec![control, target],
            Gate::Swap { a, b } | Gate::BellPrep { a, b } => vec![a, b],
        }
    }

    pub fn is_two_qubit(&self) -> bool {
        matches!(self, Gate::Cnot { .. } | Gate::Swap { .. } | Gate::BellPrep { .. })
    }

    pub fn validate(&self) -> Result<()> {
        let qs = self.qubits();
        if qs.len() == 2 && qs[0] == qs[1] {
            return Err(Error::InvalidArgument(format!("gate {self:?} repeats an operand")));
        }
        if let Gate::Single { u, .. } | Gate::Controlled { u, .. } = self {
            let e = unitarity_error2(u);
            if e > 1e-12 {
                return Err(Error::NotUnitary(e));
            }
        }
        Ok(())
    }
}

/// One Haar-random SU(4) on abstract qubits `a < b`; `a` is the more
/// significant tensor factor of `u`.
#[derive(Clone, Debug, PartialEq)]
pub struct Su4Gate {
    pub a: usize,
    pub b: usize,
    pub u: Mat4,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct Layer {
    pub gates: Vec<Su4Gate>,
}

/// An abstract N-qubit QV circuit over qubits `0..n_working`.
#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    pub n_working: usize,
    pub layers: Vec<Layer>,
}

impl Circuit {
    pub fn gates(&self) -> impl Iterator<Item = &Su4Gate> {
        self.layers.iter().flat_map(|l| l.gates.iter())
    }

    pub fn n_gates(&self) -> usize {
        self.layers.iter().map(|l| l.gates.len()).sum()
    }

    pub fn validate(&self) -> Result<()> {
        for (i, layer) in self.layers.iter().enumerate() {
            let mut used = vec![false; self.n_working];
            for g in &layer.gates {
                if g.a >= g.b || g.b >= self.n_working {
                    return Err(Error::InvalidArgument(format!(
                        "layer {i}: bad pair ({}, {})",
                        g.a, g.b
                    )));
                }
                if used[g.a] || used[g.b] {
                    return Err(Error::InvalidArgument(format!("layer {i}: pairs overlap")));
                }
                used[g.a] = true;
                used[g.b] = true;
            }
        }
        Ok(())
    }
}

/// Samples an N-layer QV circuit: each layer pairs up a uniform random
/// permutation of the qubits (one idle qubit for odd N) and attaches a fresh
/// Haar SU(4) to each pair. Pairs within a layer are ordered by their
/// smaller index.
pub fn sample_qv_circuit<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Circuit> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "QV circuits need at least 2 qubits, got {n}"
        )));
    }
    let mut layers = Vec::with_capacity(n);
    let mut perm: Vec<usize> = (0..n).collect();
    for _ in 0..n {
        perm.sort_unstable();
        perm.shuffle(rng);
        let mut pairs: Vec<(usize, usize)> = perm.chunks_exact(2).map(|p| (p[0].min(p[1]), p[0].max(p[1]))).collect();
        pairs.sort_unstable();
        let gates = pairs
            .into_iter()
            .map(|(a, b)| Su4Gate {
                a,
                b,
                u: sample_su4(rng),
            })
            .collect();
        layers.push(Layer { gates });
    }
    Ok(Circuit { n_working: n, layers })
}
