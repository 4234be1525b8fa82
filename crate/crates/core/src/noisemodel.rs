//! Per-gate cost matrices, device allocation matrices and effective
//! preserving factors.
//!
//! A cost matrix counts the single-qubit depolarizing channels that one
//! compiled SU(4) deposits on each working qubit, broken down by the
//! physical qubit the channel originates from. Rows are working qubits,
//! columns are all qubits in id order, optionally followed by one column for
//! the entanglement pair noise.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};

use crate::topology::{swap_path, ExtendedGraph, QubitId, QubitRole};
use crate::{Error, Result};

pub type Rational = Ratio<i64>;

fn third() -> Rational {
    Rational::new(1, 3)
}

/// Error rates feeding the analytic model.
#[derive(Clone, Debug, PartialEq)]
pub struct NoiseSpec {
    /// Error rate ε_q indexed by qubit id; the preserving factor is 1 − ε_q.
    pub per_qubit_error: Vec<f64>,
    pub entanglement_error: f64,
    pub calibration_ratio: f64,
}

impl NoiseSpec {
    pub fn new(per_qubit_error: Vec<f64>, entanglement_error: f64, calibration_ratio: f64) -> Result<Self> {
        for (q, &e) in per_qubit_error.iter().enumerate() {
            if !(0.0..=1.0).contains(&e) {
                return Err(Error::InvalidArgument(format!(
                    "error rate {e} on qubit {q} outside [0, 1]"
                )));
            }
        }
        if !(0.0..=1.0).contains(&entanglement_error) {
            return Err(Error::InvalidArgument(format!(
                "entanglement error {entanglement_error} outside [0, 1]"
            )));
        }
        // fitted ratios can land slightly above 1, so only positivity is enforced
        if !(calibration_ratio > 0.0 && calibration_ratio.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "calibration ratio {calibration_ratio} must be positive"
            )));
        }
        Ok(Self {
            per_qubit_error,
            entanglement_error,
            calibration_ratio,
        })
    }

    /// Same rate on every working qubit, `memory_error` on memory qubits.
    pub fn uniform(
        graph: &ExtendedGraph,
        working_error: f64,
        memory_error: f64,
        entanglement_error: f64,
        calibration_ratio: f64,
    ) -> Result<Self> {
        let rates = graph
            .qubits()
            .iter()
            .map(|q| match q.role {
                QubitRole::Working => working_error,
                QubitRole::Memory => memory_error,
            })
            .collect();
        Self::new(rates, entanglement_error, calibration_ratio)
    }

    pub fn preserving(&self, q: QubitId) -> f64 {
        1.0 - self.per_qubit_error[q.0]
    }
}

/// Preserving factor placed on each working endpoint when a telegate
/// consumes a memory pair with factors `p_a` and `p_b`.
pub fn ejpp_shift_exponent(p_a: f64, p_b: f64) -> f64 {
    (p_a * p_b).cbrt()
}

/// Dense rational matrix with working-qubit rows and qubit columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CostMatrix {
    pub pair: (QubitId, QubitId),
    rows: Vec<QubitId>,
    n_qubits: usize,
    has_entanglement_column: bool,
    entries: Vec<Rational>,
}

impl CostMatrix {
    fn zeros(pair: (QubitId, QubitId), graph: &ExtendedGraph, with_ent: bool) -> Self {
        let rows = graph.working().to_vec();
        let n_qubits = graph.n_qubits();
        let cols = n_qubits + usize::from(with_ent);
        Self {
            pair,
            entries: vec![Rational::zero(); rows.len() * cols],
            rows,
            n_qubits,
            has_entanglement_column: with_ent,
        }
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.n_qubits + usize::from(self.has_entanglement_column)
    }

    pub fn rows(&self) -> &[QubitId] {
        &self.rows
    }

    pub fn has_entanglement_column(&self) -> bool {
        self.has_entanglement_column
    }

    /// Entry at row index `r` (position among working qubits) and column `c`.
    pub fn get(&self, r: usize, c: usize) -> Rational {
        self.entries[r * self.n_cols() + c]
    }

    fn at_mut(&mut self, r: usize, c: usize) -> &mut Rational {
        let cols = self.n_cols();
        &mut self.entries[r * cols + c]
    }

    pub fn row(&self, r: usize) -> &[Rational] {
        let cols = self.n_cols();
        &self.entries[r * cols..(r + 1) * cols]
    }

    /// Entanglement column entry for row `r`, zero when absent.
    pub fn entanglement(&self, r: usize) -> Rational {
        if self.has_entanglement_column {
            self.get(r, self.n_qubits)
        } else {
            Rational::zero()
        }
    }

    /// Sum over all rows and qubit columns, excluding the entanglement column.
    pub fn qubit_total(&self) -> Rational {
        (0..self.n_rows())
            .flat_map(|r| self.row(r)[..self.n_qubits].iter().copied())
            .sum()
    }

    pub fn entanglement_total(&self) -> Rational {
        (0..self.n_rows()).map(|r| self.entanglement(r)).sum()
    }

    pub fn column_sum(&self, c: usize) -> Rational {
        (0..self.n_rows()).map(|r| self.get(r, c)).sum()
    }

    /// Rows as nested vectors, handy for comparisons.
    pub fn to_rows(&self) -> Vec<Vec<Rational>> {
        (0..self.n_rows()).map(|r| self.row(r).to_vec()).collect()
    }

    /// CSV with one row per working qubit and exact rational entries.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("qubit");
        for c in 0..self.n_qubits {
            write!(out, ",q{c}").unwrap();
        }
        if self.has_entanglement_column {
            out.push_str(",ent");
        }
        out.push('\n');
        for (r, q) in self.rows.iter().enumerate() {
            write!(out, "q{}", q.0).unwrap();
            for v in self.row(r) {
                write!(out, ",{v}").unwrap();
            }
            out.push('\n');
        }
        out
    }
}

/// The full per-gate accounting including the entanglement column.
fn cost_with_entanglement(graph: &ExtendedGraph, q: QubitId, q2: QubitId) -> Result<CostMatrix> {
    let mut cm = CostMatrix::zeros((q, q2), graph, true);
    if q == q2 {
        return Ok(cm);
    }
    let (lo, hi) = if q < q2 { (q, q2) } else { (q2, q) };
    let path = swap_path(graph, lo, hi)?;
    let nodes: Vec<usize> = path.nodes.iter().map(|q| q.0).collect();

    let mut swaps: Vec<(usize, usize)> = Vec::new();
    let gate;
    let mut telegate = None;
    match path.crossing {
        None => {
            let walk = &nodes[..nodes.len() - 1];
            swaps.extend(walk.windows(2).map(|w| (w[0], w[1])));
            gate = (walk[walk.len() - 1], nodes[nodes.len() - 1]);
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
                    q.0,
                    q2.0,
                    "path starts or ends on a memory qubit".into(),
                ));
            }
            swaps.extend(near.windows(2).map(|w| (w[0], w[1])));
            swaps.extend(far.windows(2).map(|w| (w[0], w[1])));
            gate = (near[near.len() - 1], far[far.len() - 1]);
            telegate = Some((ma.0, mb.0));
        }
    }

    // occupant[position] = logical qubit currently stored there
    let mut occupant: Vec<usize> = (0..graph.n_qubits()).collect();
    let row_of = |logical: usize| graph.working_index(QubitId(logical));
    let ent_col = graph.n_qubits();
    let deposit = |cm: &mut CostMatrix, occupant: &[usize], position: usize, column: usize, w: Rational| {
        // memory qubits carry no data, so channels landing on them are dropped
        if let Some(r) = row_of(occupant[position]) {
            *cm.at_mut(r, column) += w;
        }
    };
    let one = Rational::from_integer(1);
    for &(a, b) in &swaps {
        occupant.swap(a, b);
        deposit(&mut cm, &occupant, a, a, one);
        deposit(&mut cm, &occupant, b, b, one);
    }
    let (x, y) = gate;
    deposit(&mut cm, &occupant, x, x, one);
    deposit(&mut cm, &occupant, y, y, one);
    if let Some((ma, mb)) = telegate {
        for m in [ma, mb, ent_col] {
            deposit(&mut cm, &occupant, x, m, third());
            deposit(&mut cm, &occupant, y, m, third());
        }
    }
    for &(a, b) in swaps.iter().rev() {
        occupant.swap(a, b);
        deposit(&mut cm, &occupant, a, a, one);
        deposit(&mut cm, &occupant, b, b, one);
    }
    Ok(cm)
}

fn drop_entanglement_column(cm: CostMatrix) -> CostMatrix {
    if !cm.has_entanglement_column {
        return cm;
    }
    let cols = cm.n_cols();
    let entries = cm
        .entries
        .chunks(cols)
        .flat_map(|row| row[..cols - 1].iter().copied())
        .collect();
    CostMatrix {
        entries,
        has_entanglement_column: false,
        ..cm
    }
}

/// Cost matrix of one SU(4) on the working pair `(q, q2)`.
///
/// The lower-indexed endpoint walks along the shortest path (the far endpoint
/// walks back toward the channel on paths that cross QPUs), every swap is
/// undone after the gate, and channels are attributed to the logical qubit
/// occupying a position at the time they act.
pub fn gate_cost_matrix(graph: &ExtendedGraph, q: QubitId, q2: QubitId) -> Result<CostMatrix> {
    for x in [q, q2] {
        if x.0 >= graph.n_qubits() || graph.role(x) != QubitRole::Working {
            return Err(Error::InvalidPair(q.0, q2.0, "endpoints must be working qubits".into()));
        }
    }
    cost_with_entanglement(graph, q, q2).map(drop_entanglement_column)
}

/// Appends the entanglement-noise column to a cost matrix.
pub fn extend_entanglement_column(cost: &CostMatrix, graph: &ExtendedGraph) -> Result<CostMatrix> {
    if cost.has_entanglement_column {
        return Ok(cost.clone());
    }
    let full = cost_with_entanglement(graph, cost.pair.0, cost.pair.1)?;
    let mut out = CostMatrix::zeros(cost.pair, graph, true);
    for r in 0..cost.n_rows() {
        for c in 0..cost.n_cols() {
            *out.at_mut(r, c) = cost.get(r, c);
        }
        *out.at_mut(r, cost.n_cols()) = full.entanglement(r);
    }
    Ok(out)
}

/// Device-level average of the gate cost matrices, always carrying the
/// entanglement column.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AllocationMatrix {
    pub matrix: CostMatrix,
}

impl AllocationMatrix {
    pub fn get(&self, r: usize, c: usize) -> Rational {
        self.matrix.get(r, c)
    }

    /// Characteristic cost: sum over working rows and all qubit columns.
    pub fn characteristic_cost(&self) -> Rational {
        self.matrix.qubit_total()
    }

    /// Sum of the entanglement column.
    pub fn entanglement_cost(&self) -> Rational {
        self.matrix.entanglement_total()
    }

    pub fn to_csv(&self) -> String {
        self.matrix.to_csv()
    }
}

/// Sums the cost matrices of all ordered working pairs and divides by
/// 2(N − 1).
pub fn allocation_matrix(graph: &ExtendedGraph) -> Result<AllocationMatrix> {
    let working = graph.working();
    let n = working.len() as i64;
    let anchor = (working[0], working[0]);
    let mut acc = CostMatrix::zeros(anchor, graph, true);
    for &q in working {
        for &q2 in working {
            if q == q2 {
                continue;
            }
            let c = cost_with_entanglement(graph, q, q2)?;
            for (a, b) in acc.entries.iter_mut().zip(&c.entries) {
                *a += b;
            }
        }
    }
    let norm = Rational::from_integer(2 * (n - 1));
    for v in &mut acc.entries {
        *v /= norm;
    }
    Ok(AllocationMatrix { matrix: acc })
}

/// P̄_q = Π_{q'} (1 − r ε_{q'})^{A_{q,q'}} · (1 − ε_E)^{A_{q,E}}, keyed by
/// working qubit.
pub fn effective_preserving(alloc: &AllocationMatrix, noise: &NoiseSpec) -> Result<BTreeMap<QubitId, f64>> {
    let m = &alloc.matrix;
    if noise.per_qubit_error.len() != m.n_qubits {
        return Err(Error::InvalidArgument(format!(
            "noise covers {} qubits, allocation covers {}",
            noise.per_qubit_error.len(),
            m.n_qubits
        )));
    }
    let r = noise.calibration_ratio;
    let mut out = BTreeMap::new();
    for (row, &q) in m.rows.iter().enumerate() {
        let mut log_p = 0.0;
        for c in 0..m.n_qubits {
            let a = m.get(row, c);
            if a.is_zero() {
                continue;
            }
            log_p += weighted_log((1.0 - r * noise.per_qubit_error[c]).max(0.0), a);
        }
        let a_e = m.entanglement(row);
        if !a_e.is_zero() {
            log_p += weighted_log(1.0 - noise.entanglement_error, a_e);
        }
        out.insert(q, log_p.exp());
    }
    Ok(out)
}

fn weighted_log(p: f64, weight: Rational) -> f64 {
    weight.to_f64().expect("small rationals convert") * p.ln()
}
