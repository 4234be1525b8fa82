use super::{ejpp_cnot, kak_decompose, Circuit, Gate};
use crate::linalg::Mat4;
use crate::topology::{swap_path, ExtendedGraph, QubitId, QubitRole};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub enum BlockKind {
    Swap {
        a: QubitId,
        b: QubitId,
    },
    /// A local SU(4) on adjacent qubits, `a` the more significant factor.
    Su4 {
        a: QubitId,
        b: QubitId,
        u: Mat4,
    },
    /// An SU(4) across QPUs whose three CNOTs each run through the memory
    /// pair; `memory.0` shares a QPU with `a`.
    Telegate {
        a: QubitId,
        b: QubitId,
        u: Mat4,
        memory: (QubitId, QubitId),
    },
}

/// One routing or gate step together with the primitive gates realizing it.
#[derive(Clone, Debug, PartialEq)]
pub struct Block {
    pub kind: BlockKind,
    pub gates: Vec<Gate>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PhysicalCircuit {
    pub n_qubits: usize,
    /// Working qubits in output bit order.
    pub working: Vec<QubitId>,
    pub blocks: Vec<Block>,
    pub n_bits: usize,
    pub entanglement_pairs_consumed: usize,
}

impl PhysicalCircuit {
    pub fn gates(&self) -> impl Iterator<Item = &Gate> {
        self.blocks.iter().flat_map(|b| b.gates.iter())
    }

    pub fn count_swaps(&self) -> usize {
        self.blocks
            .iter()
            .filter(|b| matches!(b.kind, BlockKind::Swap { .. }))
            .count()
    }

    pub fn count_telegates(&self) -> usize {
        self.blocks
            .iter()
            .filter(|b| matches!(b.kind, BlockKind::Telegate { .. }))
            .count()
    }

    /// Checks adjacency of every two-qubit gate and that memory qubits are
    /// only touched by swaps and telegate sequences.
    pub fn validate(&self, graph: &ExtendedGraph) -> Result<()> {
        for block in &self.blocks {
            for g in &block.gates {
                g.validate()?;
                let qs = g.qubits();
                if g.is_two_qubit() && graph.edge_kind(qs[0], qs[1]).is_none() {
                    return Err(Error::InvalidArgument(format!("{g:?} acts on non-adjacent qubits")));
                }
                let touches_memory = qs.iter().any(|&q| graph.role(q) == QubitRole::Memory);
                if touches_memory && matches!(block.kind, BlockKind::Su4 { .. }) {
                    return Err(Error::InvalidArgument(format!(
                        "{g:?} touches a memory qubit outside a telegate"
                    )));
                }
            }
        }
        if self.entanglement_pairs_consumed != 3 * self.count_telegates() {
            return Err(Error::InvalidArgument("entanglement pair count mismatch".into()));
        }
        Ok(())
    }
}

fn swap_block(a: usize, b: usize) -> Block {
    let (a, b) = (QubitId(a), QubitId(b));
    Block {
        kind: BlockKind::Swap { a, b },
        gates: vec![Gate::Swap { a, b }],
    }
}

/// Lowers an abstract circuit onto `graph`. Abstract qubit `i` lives on
/// `graph.working()[i]`.
pub fn compile(circuit: &Circuit, graph: &ExtendedGraph) -> Result<PhysicalCircuit> {
    if circuit.n_working != graph.n_working() {
        return Err(Error::InvalidArgument(format!(
            "circuit has {} qubits, device has {} working qubits",
            circuit.n_working,
            graph.n_working()
        )));
    }
    let working = graph.working();
    let mut blocks = Vec::new();
    let mut n_bits = 0;
    let mut pairs = 0;
    for g in circuit.gates() {
        let (lo, hi) = (working[g.a], working[g.b]);
        let kak = kak_decompose(&g.u)?;
        let path = swap_path(graph, lo, hi)?;
        let nodes: Vec<usize> = path.nodes.iter().map(|q| q.0).collect();
        let mut swaps: Vec<(usize, usize)> = Vec::new();
        let body = match path.crossing {
            None => {
                let walk = &nodes[..nodes.len() - 1];
                swaps.extend(walk.windows(2).map(|w| (w[0], w[1])));
                let x = QubitId(walk[walk.len() - 1]);
                Block {
                    kind: BlockKind::Su4 { a: x, b: hi, u: g.u },
                    gates: kak.to_gates(x, hi),
                }
            }
            Some((ma, mb)) => {
                let cut = nodes
                    .iter()
                    .position(|&v| v == ma.0)
                    .expect("crossing lies on the path");
                let near = &nodes[..cut];
                let far: Vec<usize> = nodes[cut + 2..].iter().rev().copied().collect();
                if near.is_empty() || far.is_empty() {
                    return Err(Error::InvalidPair(
                        lo.0,
                        hi.0,
                        "path starts or ends on a memory qubit".into(),
                    ));
                }
                swaps.extend(near.windows(2).map(|w| (w[0], w[1])));
                swaps.extend(far.windows(2).map(|w| (w[0], w[1])));
                let x = QubitId(near[near.len() - 1]);
                let y = QubitId(far[far.len() - 1]);
                let mut gates = Vec::new();
                for gate in kak.to_gates(x, y) {
                    match gate {
                        Gate::Cnot { control, target } => {
                            let memory = if control == x { (ma, mb) } else { (mb, ma) };
                            gates.extend(ejpp_cnot(graph, control, target, memory, (n_bits, n_bits + 1))?);
                            n_bits += 2;
                            pairs += 1;
                        }
                        other => gates.push(other),
                    }
                }
                Block {
                    kind: BlockKind::Telegate {
                        a: x,
                        b: y,
                        u: g.u,
                        memory: (ma, mb),
                    },
                    gates,
                }
            }
        };
        blocks.extend(swaps.iter().map(|&(a, b)| swap_block(a, b)));
        blocks.push(body);
        blocks.extend(swaps.iter().rev().map(|&(a, b)| swap_block(a, b)));
    }
    Ok(PhysicalCircuit {
        n_qubits: graph.n_qubits(),
        working: working.to_vec(),
        blocks,
        n_bits,
        entanglement_pairs_consumed: pairs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuits::{sample_qv_circuit, Layer, Su4Gate};
    use crate::seed;
    use crate::topology::{standard_topology, MemoryPlacement, TopologyKind};

    fn one_gate(n: usize, a: usize, b: usize) -> Circuit {
        let u = crate::circuits::sample_su4(&mut seed::rng(1, &[]));
        Circuit {
            n_working: n,
            layers: vec![Layer {
                gates: vec![Su4Gate { a, b, u }],
            }],
        }
    }

    #[test]
    fn fully_connected_needs_no_routing() {
        let g = standard_topology(TopologyKind::FullyConnected, 6, false, &MemoryPlacement::Hub).unwrap();
        let c = sample_qv_circuit(6, &mut seed::rng(2, &[])).unwrap();
        let pc = compile(&c, &g).unwrap();
        assert_eq!(pc.count_swaps(), 0);
        assert_eq!(pc.count_telegates(), 0);
        assert_eq!(
            pc.gates().filter(|g| matches!(g, Gate::Cnot { .. })).count(),
            3 * c.n_gates()
        );
        pc.validate(&g).unwrap();
    }

    #[test]
    fn line_swaps_out_and_back() {
        let g = standard_topology(TopologyKind::Line1D, 4, false, &MemoryPlacement::Hub).unwrap();
        let pc = compile(&one_gate(4, 0, 3), &g).unwrap();
        let kinds: Vec<_> = pc.blocks.iter().map(|b| b.kind.clone()).collect();
        assert_eq!(kinds.len(), 5);
        assert_eq!(
            kinds[0],
            BlockKind::Swap {
                a: QubitId(0),
                b: QubitId(1)
            }
        );
        assert_eq!(
            kinds[1],
            BlockKind::Swap {
                a: QubitId(1),
                b: QubitId(2)
            }
        );
        assert!(matches!(
            kinds[2],
            BlockKind::Su4 {
                a: QubitId(2),
                b: QubitId(3),
                ..
            }
        ));
        assert_eq!(
            kinds[3],
            BlockKind::Swap {
                a: QubitId(1),
                b: QubitId(2)
            }
        );
        assert_eq!(
            kinds[4],
            BlockKind::Swap {
                a: QubitId(0),
                b: QubitId(1)
            }
        );
        pc.validate(&g).unwrap();
    }

    #[test]
    fn cross_qpu_gate_uses_three_pairs() {
        let g = standard_topology(TopologyKind::Line1D, 4, true, &MemoryPlacement::Edge).unwrap();
        let pc = compile(&one_gate(4, 0, 3), &g).unwrap();
        assert_eq!(pc.entanglement_pairs_consumed, 3);
        assert_eq!(pc.count_telegates(), 1);
        assert_eq!(pc.n_bits, 6);
        assert_eq!(pc.gates().filter(|g| matches!(g, Gate::BellPrep { .. })).count(), 3);
        pc.validate(&g).unwrap();
    }

    #[test]
    fn compilation_is_deterministic() {
        let g = standard_topology(TopologyKind::Grid2D, 8, true, &MemoryPlacement::Hub).unwrap();
        let c = sample_qv_circuit(8, &mut seed::rng(3, &[])).unwrap();
        let a = compile(&c, &g).unwrap();
        assert_eq!(a, compile(&c, &g).unwrap());
        a.validate(&g).unwrap();
    }

    #[test]
    fn size_mismatch_is_rejected() {
        let g = standard_topology(TopologyKind::Line1D, 4, false, &MemoryPlacement::Hub).unwrap();
        assert!(compile(&one_gate(3, 0, 1), &g).is_err());
    }
}
