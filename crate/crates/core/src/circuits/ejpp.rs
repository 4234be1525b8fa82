use super::Gate;
use crate::linalg::{pauli_x, pauli_z};
use crate::topology::{EdgeKind, ExtendedGraph, QubitId, QubitRole};
use crate::{Error, Result};

/// Nonlocal CNOT from `control` to `target` through a fresh Bell pair on
/// `memory = (m_c, m_t)`, where `m_c` sits next to the control and `m_t`
/// next to the target. `bits` are the two classical bits used for the
/// corrections.
pub fn ejpp_cnot(
    graph: &ExtendedGraph,
    control: QubitId,
    target: QubitId,
    memory: (QubitId, QubitId),
    bits: (usize, usize),
) -> Result<Vec<Gate>> {
    let (mc, mt) = memory;
    let unavailable = |why: &str| Err(Error::MemoryUnavailable(format!("{mc}/{mt}: {why}")));
    if mc.0 >= graph.n_qubits() || mt.0 >= graph.n_qubits() {
        return unavailable("no such qubit");
    }
    if graph.role(mc) != QubitRole::Memory || graph.role(mt) != QubitRole::Memory {
        return unavailable("not memory qubits");
    }
    if graph.edge_kind(mc, mt) != Some(EdgeKind::Entanglement) {
        return unavailable("not joined by an entanglement channel");
    }
    if graph.edge_kind(control, mc) != Some(EdgeKind::Coupling)
        || graph.edge_kind(mt, target) != Some(EdgeKind::Coupling)
    {
        return unavailable("not adjacent to the gate operands");
    }
    let (b0, b1) = bits;
    Ok(vec![
        Gate::BellPrep { a: mc, b: mt },
        Gate::Cnot { control, target: mc },
        Gate::MeasureZ { q: mc, bit: b0 },
        Gate::Controlled {
            q: mt,
            u: pauli_x(),
            bit: b0,
        },
        Gate::Cnot { control: mt, target },
        Gate::MeasureX { q: mt, bit: b1 },
        Gate::Controlled {
            q: control,
            u: pauli_z(),
            bit: b1,
        },
    ])
}
