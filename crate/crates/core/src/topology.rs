//! Extended connectivity graphs for single-QPU and two-QPU devices, and the
//! shortest-path router used to place swap chains.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct QubitId(pub usize);

impl QubitId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for QubitId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "q{}", self.0)
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QubitRole {
    Working,
    Memory,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeKind {
    Coupling,
    Entanglement,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Qubit {
    pub id: QubitId,
    pub role: QubitRole,
    pub qpu: u32,
}

/// A device graph combining physical couplings inside each QPU with the
/// entanglement channel joining the memory qubits of two QPUs.
///
/// Construction validates every structural invariant, so a value of this
/// type is always routable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtendedGraph {
    qubits: Vec<Qubit>,
    coupling: BTreeSet<(usize, usize)>,
    entanglement: BTreeSet<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
    working: Vec<QubitId>,
    memory: Vec<QubitId>,
}

fn ordered(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

impl ExtendedGraph {
    /// Builds a graph from per-qubit `(role, qpu)` tuples (the position in the
    /// slice is the qubit id) and two edge lists.
    pub fn new(
        qubits: &[(QubitRole, u32)],
        coupling: impl IntoIterator<Item = (usize, usize)>,
        entanglement: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self> {
        let n = qubits.len();
        let qubits: Vec<Qubit> = qubits
            .iter()
            .enumerate()
            .map(|(i, &(role, qpu))| Qubit {
                id: QubitId(i),
                role,
                qpu,
            })
            .collect();

        let add = |set: &mut BTreeSet<(usize, usize)>, (a, b): (usize, usize)| -> Result<()> {
            if a >= n || b >= n {
                return Err(Error::InvalidGraph(format!(
                    "edge ({a}, {b}) references a missing qubit"
                )));
            }
            if a == b {
                return Err(Error::InvalidGraph(format!("self loop on qubit {a}")));
            }
            if !set.insert(ordered(a, b)) {
                return Err(Error::InvalidGraph(format!("duplicate edge ({a}, {b})")));
            }
            Ok(())
        };
        let mut coupling_set = BTreeSet::new();
        for e in coupling {
            add(&mut coupling_set, e)?;
        }
        let mut ent_set = BTreeSet::new();
        for e in entanglement {
            add(&mut ent_set, e)?;
        }
        if let Some(e) = coupling_set.intersection(&ent_set).next() {
            return Err(Error::InvalidGraph(format!(
                "edge {e:?} is both coupling and entanglement"
            )));
        }

        let mut adjacency = vec![Vec::new(); n];
        for &(a, b) in coupling_set.iter().chain(ent_set.iter()) {
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        for nbrs in &mut adjacency {
            nbrs.sort_unstable();
        }

        let working = qubits
            .iter()
            .filter(|q| q.role == QubitRole::Working)
            .map(|q| q.id)
            .collect();
        let memory = qubits
            .iter()
            .filter(|q| q.role == QubitRole::Memory)
            .map(|q| q.id)
            .collect();
        let graph = Self {
            qubits,
            coupling: coupling_set,
            entanglement: ent_set,
            adjacency,
            working,
            memory,
        };
        graph.validate()?;
        Ok(graph)
    }

    fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidGraph(m));
        if self.working.len() < 2 {
            return bad(format!("need at least 2 working qubits, found {}", self.working.len()));
        }
        if !matches!(self.memory.len(), 0 | 2) {
            return bad(format!("expected 0 or 2 memory qubits, found {}", self.memory.len()));
        }
        let qpus: BTreeSet<u32> = self.qubits.iter().map(|q| q.qpu).collect();
        if qpus.len() > 2 {
            return bad(format!("at most two QPUs are supported, found {}", qpus.len()));
        }
        for &(a, b) in &self.coupling {
            if self.qubits[a].qpu != self.qubits[b].qpu {
                return bad(format!("coupling edge ({a}, {b}) crosses QPUs"));
            }
        }
        let mut channel_use = vec![0usize; self.qubits.len()];
        for &(a, b) in &self.entanglement {
            if self.qubits[a].qpu == self.qubits[b].qpu {
                return bad(format!("entanglement edge ({a}, {b}) stays inside one QPU"));
            }
            if self.qubits[a].role != QubitRole::Memory || self.qubits[b].role != QubitRole::Memory {
                return bad(format!("entanglement edge ({a}, {b}) must join two memory qubits"));
            }
            channel_use[a] += 1;
            channel_use[b] += 1;
        }
        if let Some(q) = channel_use.iter().position(|&c| c > 1) {
            return bad(format!("memory qubit {q} takes part in more than one channel"));
        }
        for &m in &self.memory {
            let qpu = self.qubits[m.0].qpu;
            if self.memory.iter().filter(|o| self.qubits[o.0].qpu == qpu).count() > 1 {
                return bad(format!("QPU {qpu} holds more than one memory qubit"));
            }
        }
        for &qpu in &qpus {
            let members: Vec<usize> = self.qubits.iter().filter(|q| q.qpu == qpu).map(|q| q.id.0).collect();
            if !self.is_connected(&members, false) {
                return bad(format!("QPU {qpu} is not connected"));
            }
        }
        let all: Vec<usize> = (0..self.qubits.len()).collect();
        if !self.is_connected(&all, true) {
            return bad("graph is not connected".into());
        }
        Ok(())
    }

    fn is_connected(&self, members: &[usize], use_channels: bool) -> bool {
        let Some(&start) = members.first() else {
            return true;
        };
        let inside: BTreeSet<usize> = members.iter().copied().collect();
        let mut seen = BTreeSet::from([start]);
        let mut queue = VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            for &v in &self.adjacency[u] {
                if !inside.contains(&v) || seen.contains(&v) {
                    continue;
                }
                if !use_channels && self.entanglement.contains(&ordered(u, v)) {
                    continue;
                }
                seen.insert(v);
                queue.push_back(v);
            }
        }
        seen.len() == inside.len()
    }

    pub fn n_qubits(&self) -> usize {
        self.qubits.len()
    }

    pub fn n_working(&self) -> usize {
        self.working.len()
    }

    pub fn qubits(&self) -> &[Qubit] {
        &self.qubits
    }

    /// Working qubits in ascending id order. Abstract circuit qubit `i` maps
    /// onto `working()[i]`.
    pub fn working(&self) -> &[QubitId] {
        &self.working
    }

    pub fn memory(&self) -> &[QubitId] {
        &self.memory
    }

    pub fn role(&self, q: QubitId) -> QubitRole {
        self.qubits[q.0].role
    }

    pub fn qpu(&self, q: QubitId) -> u32 {
        self.qubits[q.0].qpu
    }

    pub fn is_dqc(&self) -> bool {
        !self.entanglement.is_empty()
    }

    pub fn neighbors(&self, q: QubitId) -> impl Iterator<Item = QubitId> + '_ {
        self.adjacency[q.0].iter().map(|&v| QubitId(v))
    }

    pub fn edge_kind(&self, a: QubitId, b: QubitId) -> Option<EdgeKind> {
        let e = ordered(a.0, b.0);
        if self.coupling.contains(&e) {
            Some(EdgeKind::Coupling)
        } else if self.entanglement.contains(&e) {
            Some(EdgeKind::Entanglement)
        } else {
            None
        }
    }

    pub fn coupling_edges(&self) -> impl Iterator<Item = (QubitId, QubitId)> + '_ {
        self.coupling.iter().map(|&(a, b)| (QubitId(a), QubitId(b)))
    }

    pub fn entanglement_edges(&self) -> impl Iterator<Item = (QubitId, QubitId)> + '_ {
        self.entanglement.iter().map(|&(a, b)| (QubitId(a), QubitId(b)))
    }

    /// Position of a working qubit in [`Self::working`].
    pub fn working_index(&self, q: QubitId) -> Option<usize> {
        self.working.binary_search(&q).ok()
    }

    /// Returns a copy with one extra coupling edge.
    pub fn with_coupling(&self, a: QubitId, b: QubitId) -> Result<Self> {
        let spec: Vec<(QubitRole, u32)> = self.qubits.iter().map(|q| (q.role, q.qpu)).collect();
        let mut coupling: Vec<(usize, usize)> = self.coupling.iter().copied().collect();
        coupling.push((a.0, b.0));
        Self::new(&spec, coupling, self.entanglement.iter().copied())
    }

    /// Parses the structured-text graph description written by
    /// [`Self::to_spec_string`].
    pub fn from_spec_str(text: &str) -> Result<Self> {
        let spec: GraphSpec = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        let mut qubits = spec.qubits;
        qubits.sort_by_key(|q| q.id);
        for (i, q) in qubits.iter().enumerate() {
            if q.id.0 != i {
                return Err(Error::InvalidGraph(format!(
                    "qubit ids must be dense from 0, missing {i}"
                )));
            }
        }
        let roles: Vec<(QubitRole, u32)> = qubits.iter().map(|q| (q.role, q.qpu)).collect();
        let pick = |kind| spec.edges.iter().filter(move |e| e.kind == kind).map(|e| (e.a, e.b));
        Self::new(&roles, pick(EdgeKind::Coupling), pick(EdgeKind::Entanglement))
    }

    pub fn to_spec_string(&self) -> String {
        let edges = self
            .coupling
            .iter()
            .map(|&(a, b)| EdgeSpec {
                kind: EdgeKind::Coupling,
                a,
                b,
            })
            .chain(self.entanglement.iter().map(|&(a, b)| EdgeSpec {
                kind: EdgeKind::Entanglement,
                a,
                b,
            }))
            .collect();
        let spec = GraphSpec {
            qubits: self.qubits.clone(),
            edges,
        };
        toml::to_string(&spec).expect("graph spec is always serializable")
    }
}

#[derive(Serialize, Deserialize)]
struct GraphSpec {
    qubits: Vec<Qubit>,
    edges: Vec<EdgeSpec>,
}

#[derive(Serialize, Deserialize)]
struct EdgeSpec {
    kind: EdgeKind,
    a: usize,
    b: usize,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TopologyKind {
    FullyConnected,
    #[serde(rename = "line1d")]
    Line1D,
    #[serde(rename = "grid2d")]
    Grid2D,
}

impl fmt::Display for TopologyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TopologyKind::FullyConnected => "fully-connected",
            TopologyKind::Line1D => "line1d",
            TopologyKind::Grid2D => "grid2d",
        })
    }
}

/// Where the memory qubit of each QPU attaches to its local graph.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MemoryPlacement {
    /// Local qubit of maximal degree, lowest index on ties.
    Hub,
    /// Outer endpoint of each line so the two lines join end to end.
    Edge,
    /// Explicit local attachment sites `[site_on_a, site_on_b]`.
    Explicit(Vec<usize>),
}

/// Most-square `rows × cols` factorization of `n` with `rows <= cols`.
pub fn grid_shape(n: usize) -> (usize, usize) {
    let mut rows = (n as f64).sqrt().floor() as usize;
    while rows > 1 && !n.is_multiple_of(rows) {
        rows -= 1;
    }
    let rows = rows.max(1);
    (rows, n / rows)
}

/// Coupling edges of a standard local topology over qubits `0..n`.
pub fn local_edges(kind: TopologyKind, n: usize) -> Vec<(usize, usize)> {
    match kind {
        TopologyKind::FullyConnected => {
            let mut e = Vec::with_capacity(n * n.saturating_sub(1) / 2);
            for a in 0..n {
                for b in a + 1..n {
                    e.push((a, b));
                }
            }
            e
        }
        TopologyKind::Line1D => (1..n).map(|i| (i - 1, i)).collect(),
        TopologyKind::Grid2D => {
            let (rows, cols) = grid_shape(n);
            let mut e = Vec::new();
            for r in 0..rows {
                for c in 0..cols {
                    let u = r * cols + c;
                    if c + 1 < cols {
                        e.push((u, u + 1));
                    }
                    if r + 1 < rows {
                        e.push((u, u + cols));
                    }
                }
            }
            e
        }
    }
}

fn hub_site(edges: &[(usize, usize)], n: usize) -> usize {
    let mut degree = vec![0usize; n];
    for &(a, b) in edges {
        degree[a] += 1;
        degree[b] += 1;
    }
    // max_by_key keeps the last maximum; scan in reverse to keep the lowest index.
    (0..n).rev().max_by_key(|&i| degree[i]).unwrap_or(0)
}

/// Builds one of the standard benchmark devices.
///
/// For `dqc = true` the working qubits are split evenly: QPU 0 holds ids
/// `0..n/2`, QPU 1 holds `n/2..n`, and the memory qubits are `n` (QPU 0) and
/// `n + 1` (QPU 1), joined by the entanglement channel.
pub fn standard_topology(
    kind: TopologyKind,
    n_working: usize,
    dqc: bool,
    placement: &MemoryPlacement,
) -> Result<ExtendedGraph> {
    let invalid = |m: String| Err(Error::InvalidTopology(m));
    if n_working < 2 {
        return invalid(format!("need at least 2 working qubits, got {n_working}"));
    }
    if !dqc {
        let roles = vec![(QubitRole::Working, 0); n_working];
        return ExtendedGraph::new(&roles, local_edges(kind, n_working), []);
    }
    if !n_working.is_multiple_of(2) {
        return invalid(format!(
            "a two-QPU device needs an even number of working qubits, got {n_working}"
        ));
    }
    let half = n_working / 2;
    let local = local_edges(kind, half);
    let (site_a, site_b) = match placement {
        MemoryPlacement::Hub => {
            let s = hub_site(&local, half);
            (s, s)
        }
        MemoryPlacement::Edge => {
            if kind != TopologyKind::Line1D {
                return invalid(format!("edge memory placement requires a line topology, got {kind}"));
            }
            if half < 2 {
                return invalid("edge memory placement needs at least two qubits per QPU".into());
            }
            (half - 1, 0)
        }
        MemoryPlacement::Explicit(sites) => {
            if sites.len() != 2 {
                return invalid(format!(
                    "explicit placement needs exactly two sites, got {}",
                    sites.len()
                ));
            }
            if sites.iter().any(|&s| s >= half) {
                return invalid(format!("explicit placement sites {sites:?} out of range 0..{half}"));
            }
            (sites[0], sites[1])
        }
    };
    let (mem_a, mem_b) = (n_working, n_working + 1);
    let mut roles = vec![(QubitRole::Working, 0); half];
    roles.extend(std::iter::repeat_n((QubitRole::Working, 1), half));
    roles.push((QubitRole::Memory, 0));
    roles.push((QubitRole::Memory, 1));
    let mut coupling: Vec<(usize, usize)> = local.clone();
    coupling.extend(local.iter().map(|&(a, b)| (a + half, b + half)));
    coupling.push((site_a, mem_a));
    coupling.push((half + site_b, mem_b));
    ExtendedGraph::new(&roles, coupling, [(mem_a, mem_b)])
}

/// A shortest route between two working qubits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SwapPath {
    pub nodes: Vec<QubitId>,
    /// The entanglement edge traversed, oriented from the `nodes[0]` side.
    pub crossing: Option<(QubitId, QubitId)>,
}

impl SwapPath {
    pub fn endpoints(&self) -> (QubitId, QubitId) {
        (self.nodes[0], *self.nodes.last().expect("paths are never empty"))
    }

    /// Number of edges on the path.
    pub fn len(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.len() < 2
    }
}

/// BFS distances from `target` over coupling and entanglement edges.
pub fn distances_to(graph: &ExtendedGraph, target: QubitId) -> Vec<Option<usize>> {
    let mut dist = vec![None; graph.n_qubits()];
    dist[target.0] = Some(0);
    let mut queue = VecDeque::from([target.0]);
    while let Some(u) = queue.pop_front() {
        let d = dist[u].expect("queued nodes have a distance");
        for &v in &graph.adjacency[u] {
            if dist[v].is_none() {
                dist[v] = Some(d + 1);
                queue.push_back(v);
            }
        }
    }
    dist
}

/// Shortest path from `q` to `q2` over the combined edge set. Among equal
/// length paths the lexicographically smallest node sequence wins.
pub fn swap_path(graph: &ExtendedGraph, q: QubitId, q2: QubitId) -> Result<SwapPath> {
    let n = graph.n_qubits();
    if q.0 >= n || q2.0 >= n {
        return Err(Error::InvalidPair(q.0, q2.0, "qubit out of range".into()));
    }
    if q == q2 {
        return Err(Error::InvalidPair(q.0, q2.0, "endpoints coincide".into()));
    }
    if graph.role(q) != QubitRole::Working || graph.role(q2) != QubitRole::Working {
        return Err(Error::InvalidPair(q.0, q2.0, "endpoints must be working qubits".into()));
    }
    let dist = distances_to(graph, q2);
    let Some(mut remaining) = dist[q.0] else {
        return Err(Error::Disconnected(q.0, q2.0));
    };
    let mut nodes = vec![q];
    let mut crossing = None;
    let mut u = q.0;
    while remaining > 0 {
        let next = graph.adjacency[u]
            .iter()
            .copied()
            .find(|&v| dist[v] == Some(remaining - 1))
            .expect("a BFS predecessor always exists");
        if graph.entanglement.contains(&ordered(u, next)) {
            if crossing.is_some() {
                return Err(Error::InvalidGraph(format!(
                    "path {q}->{q2} crosses more than one entanglement channel"
                )));
            }
            crossing = Some((QubitId(u), QubitId(next)));
        }
        nodes.push(QubitId(next));
        u = next;
        remaining -= 1;
    }
    Ok(SwapPath { nodes, crossing })
}
