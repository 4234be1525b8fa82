mod common;

use common::density::{histogram, output_distribution, total_variation};
use qvdqc::circuits::{compile, sample_qv_circuit};
use qvdqc::noisemodel::NoiseSpec;
use qvdqc::seed;
use qvdqc::sim::{ideal_distribution, ideal_run, lower, lower_working, run_shots, NoiseAttachment, NoiseMode, Program};
use qvdqc::topology::{standard_topology, ExtendedGraph, MemoryPlacement, TopologyKind};

const KINDS: [TopologyKind; 3] = [TopologyKind::FullyConnected, TopologyKind::Line1D, TopologyKind::Grid2D];

fn noise(g: &ExtendedGraph, mode: NoiseMode, eps: f64, eps_m: f64, eps_e: f64) -> NoiseAttachment {
    let spec = NoiseSpec::uniform(g, eps, eps_m, eps_e, 1.0).unwrap();
    NoiseAttachment::from_spec(mode, &spec).unwrap()
}

fn sample(program: &Program, shots: usize, s: u64) -> Vec<f64> {
    let ideal = ideal_run(program, &mut seed::rng(s, &[0])).unwrap();
    let samples = run_shots(program, &ideal, shots, s, 0);
    histogram(&samples, 1 << program.working.len())
}

#[test]
fn oracle_reproduces_noiseless_output() {
    for kind in KINDS {
        let g = standard_topology(kind, 4, true, &MemoryPlacement::Hub).unwrap();
        let c = sample_qv_circuit(4, &mut seed::rng(11, &[])).unwrap();
        let pc = compile(&c, &g).unwrap();
        let p = lower(&pc, &NoiseAttachment::noiseless(NoiseMode::TwoQubitGate, g.n_qubits())).unwrap();
        let d = total_variation(&output_distribution(&p), &ideal_distribution(&c).unwrap());
        assert!(d < 1e-10, "{kind}: {d}");
    }
}

#[test]
fn working_register_lowering_is_exact() {
    for kind in KINDS {
        for n in [2, 4] {
            for mode in [NoiseMode::TwoQubitGate, NoiseMode::PerSu4] {
                let g = standard_topology(kind, n, true, &MemoryPlacement::Hub).unwrap();
                let c = sample_qv_circuit(n, &mut seed::rng(n as u64, &[1])).unwrap();
                let pc = compile(&c, &g).unwrap();
                let att = noise(&g, mode, 0.03, 0.05, 0.08);
                let full = output_distribution(&lower(&pc, &att).unwrap());
                let reduced = output_distribution(&lower_working(&pc, &att).unwrap());
                let d = total_variation(&full, &reduced);
                assert!(d < 1e-10, "{kind} n={n} {mode}: {d}");
            }
        }
    }
}

#[test]
fn working_register_lowering_rejects_gate_level_noise() {
    let g = standard_topology(TopologyKind::Line1D, 4, true, &MemoryPlacement::Hub).unwrap();
    let c = sample_qv_circuit(4, &mut seed::rng(3, &[])).unwrap();
    let pc = compile(&c, &g).unwrap();
    assert!(lower_working(&pc, &noise(&g, NoiseMode::PerBasisGate, 0.01, 0.01, 0.0)).is_err());
}

#[test]
fn trajectories_match_the_density_oracle_on_three_qubits() {
    let g = standard_topology(TopologyKind::Line1D, 3, false, &MemoryPlacement::Hub).unwrap();
    let c = sample_qv_circuit(3, &mut seed::rng(5, &[])).unwrap();
    let pc = compile(&c, &g).unwrap();
    for (i, mode) in [NoiseMode::TwoQubitGate, NoiseMode::PerSu4, NoiseMode::PerBasisGate]
        .into_iter()
        .enumerate()
    {
        let mut att = noise(&g, mode, 0.06, 0.06, 0.0);
        att.single_qubit_fraction = 0.1;
        let p = lower(&pc, &att).unwrap();
        let exact = output_distribution(&p);
        let d = total_variation(&sample(&p, 60_000, 20 + i as u64), &exact);
        assert!(d < 0.01, "{mode}: {d}");
    }
}

#[test]
fn trajectories_through_telegates_match_the_density_oracle() {
    let g = standard_topology(TopologyKind::Line1D, 2, true, &MemoryPlacement::Hub).unwrap();
    let c = sample_qv_circuit(2, &mut seed::rng(6, &[])).unwrap();
    let pc = compile(&c, &g).unwrap();
    for mode in [NoiseMode::TwoQubitGate, NoiseMode::PerBasisGate] {
        let p = lower(&pc, &noise(&g, mode, 0.05, 0.08, 0.1)).unwrap();
        let exact = output_distribution(&p);
        let d = total_variation(&sample(&p, 60_000, 31), &exact);
        assert!(d < 0.01, "{mode}: {d}");
    }
}

#[test]
fn reduced_trajectories_match_the_full_oracle() {
    let g = standard_topology(TopologyKind::Grid2D, 4, true, &MemoryPlacement::Hub).unwrap();
    let c = sample_qv_circuit(4, &mut seed::rng(8, &[])).unwrap();
    let pc = compile(&c, &g).unwrap();
    let att = noise(&g, NoiseMode::TwoQubitGate, 0.02, 0.04, 0.06);
    let exact = output_distribution(&lower(&pc, &att).unwrap());
    let d = total_variation(&sample(&lower_working(&pc, &att).unwrap(), 100_000, 41), &exact);
    assert!(d < 0.012, "{d}");
}
