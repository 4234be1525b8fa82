//! Exact density-matrix evaluation of a lowered program. Operators are built
//! as full matrices from their definitions, independently of the
//! statevector kernels, and measurements branch an ensemble keyed by the
//! classical bits that are still to be read.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use qvdqc::linalg::{hadamard, pauli, Mat2, Mat4};
use qvdqc::sim::{Op, Program};

type Dm = DMatrix<C64>;

fn bit(i: usize, q: usize) -> usize {
    (i >> q) & 1
}

/// Full operator of `u` acting on `qubits` (first listed is the most
/// significant index of `u`) in an `n`-qubit little-endian register.
fn embed(u: &DMatrix<C64>, qubits: &[usize], n: usize) -> Dm {
    let dim = 1 << n;
    let mask: usize = qubits.iter().map(|&q| 1 << q).sum();
    let sub = |i: usize| qubits.iter().fold(0, |acc, &q| (acc << 1) | bit(i, q));
    Dm::from_fn(dim, dim, |i, j| {
        if i & !mask != j & !mask {
            C64::new(0.0, 0.0)
        } else {
            u[(sub(i), sub(j))]
        }
    })
}

fn m2(u: &Mat2) -> DMatrix<C64> {
    DMatrix::from_fn(2, 2, |i, j| u[(i, j)])
}

fn m4(u: &Mat4) -> DMatrix<C64> {
    DMatrix::from_fn(4, 4, |i, j| u[(i, j)])
}

fn cnot() -> DMatrix<C64> {
    let mut m = DMatrix::zeros(4, 4);
    for (r, c) in [(0, 0), (1, 1), (2, 3), (3, 2)] {
        m[(r, c)] = C64::new(1.0, 0.0);
    }
    m
}

fn conj(rho: &Dm, u: &Dm) -> Dm {
    u * rho * u.adjoint()
}

fn projector(q: usize, value: usize, n: usize) -> Dm {
    Dm::from_fn(1 << n, 1 << n, |i, j| {
        if i == j && bit(i, q) == value {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

fn reset(rho: &Dm, q: usize, n: usize) -> Dm {
    // Kraus |0><0| and |0><1|
    let x = embed(&m2(&pauli(1)), &[q], n);
    let p0 = projector(q, 0, n);
    let p1 = projector(q, 1, n);
    &p0 * rho * &p0 + &x * &p1 * rho * &p1 * &x
}

fn pauli_mix(rho: &Dm, terms: &[(f64, Dm)]) -> Dm {
    let mut out = rho * C64::new(1.0 - terms.iter().map(|t| t.0).sum::<f64>(), 0.0);
    for (w, p) in terms {
        out += conj(rho, p) * C64::new(*w, 0.0);
    }
    out
}

fn pauli_string(ops: &[(usize, usize)], n: usize) -> Dm {
    let mut m = Dm::identity(1 << n, 1 << n);
    for &(q, k) in ops {
        m = embed(&m2(&pauli(k)), &[q], n) * m;
    }
    m
}

fn bits_of(k: usize) -> (bool, bool) {
    (k == 1 || k == 2, k == 2 || k == 3)
}

/// Working-register output distribution of `program`, indexed like the
/// samples of the trajectory engine.
pub fn output_distribution(program: &Program) -> Vec<f64> {
    let n = program.n_qubits;
    let dim = 1 << n;
    let mut last_read = vec![None; program.n_bits];
    for (i, op) in program.ops.iter().enumerate() {
        if let Op::Controlled { bit, .. } = op {
            last_read[*bit] = Some(i);
        }
    }
    let mut rho0 = Dm::zeros(dim, dim);
    rho0[(0, 0)] = C64::new(1.0, 0.0);
    let mut ensemble: Vec<(u64, Dm)> = vec![(0, rho0)];
    for (i, op) in program.ops.iter().enumerate() {
        let mut next: Vec<(u64, Dm)> = Vec::new();
        for (bits, rho) in ensemble {
            match op {
                Op::U1 { q, u } => next.push((bits, conj(&rho, &embed(&m2(u), &[*q], n)))),
                Op::U2 { a, b, u } => next.push((bits, conj(&rho, &embed(&m4(u), &[*a, *b], n)))),
                Op::Cnot { control, target } => next.push((bits, conj(&rho, &embed(&cnot(), &[*control, *target], n)))),
                Op::Swap { a, b } => {
                    let c1 = embed(&cnot(), &[*a, *b], n);
                    let c2 = embed(&cnot(), &[*b, *a], n);
                    next.push((bits, conj(&rho, &(&c1 * &c2 * &c1))));
                }
                Op::Bell { a, b } => {
                    let r = reset(&reset(&rho, *a, n), *b, n);
                    let r = conj(&r, &embed(&m2(&hadamard()), &[*a], n));
                    next.push((bits, conj(&r, &embed(&cnot(), &[*a, *b], n))));
                }
                Op::MeasureZ { q, bit } | Op::MeasureX { q, bit } => {
                    let h = embed(&m2(&hadamard()), &[*q], n);
                    let x_basis = matches!(op, Op::MeasureX { .. });
                    let r = if x_basis { conj(&rho, &h) } else { rho.clone() };
                    for v in 0..2 {
                        let p = projector(*q, v, n);
                        let mut branch = &p * &r * &p;
                        if x_basis {
                            branch = conj(&branch, &h);
                        }
                        let b = if v == 1 { bits | 1 << bit } else { bits & !(1 << bit) };
                        next.push((b, branch));
                    }
                }
                Op::Controlled { q, u, bit } => {
                    let r = if bits >> bit & 1 == 1 {
                        conj(&rho, &embed(&m2(u), &[*q], n))
                    } else {
                        rho
                    };
                    let b = if last_read[*bit] == Some(i) {
                        bits & !(1 << bit)
                    } else {
                        bits
                    };
                    next.push((b, r));
                }
                Op::Depol1 { q, p } => {
                    let terms: Vec<(f64, Dm)> = (1..4).map(|k| (p / 4.0, pauli_string(&[(*q, k)], n))).collect();
                    next.push((bits, pauli_mix(&rho, &terms)));
                }
                Op::Depol2 { a, b, p } => {
                    let terms: Vec<(f64, Dm)> = (1..16)
                        .map(|k| (p / 16.0, pauli_string(&[(*a, k >> 2), (*b, k & 3)], n)))
                        .collect();
                    next.push((bits, pauli_mix(&rho, &terms)));
                }
                Op::Frame {
                    control,
                    target,
                    p,
                    pair,
                } => {
                    let mapped = |x: bool, z: bool| {
                        let mut ops = Vec::new();
                        if x {
                            ops.push((*target, 1));
                        }
                        if z {
                            ops.push((*control, 3));
                        }
                        pauli_string(&ops, n)
                    };
                    let terms: Vec<(f64, Dm)> = if *pair {
                        (1..16)
                            .map(|k| {
                                let ((xa, za), (xb, zb)) = (bits_of(k >> 2), bits_of(k & 3));
                                (p / 16.0, mapped(xa ^ xb, za ^ zb))
                            })
                            .collect()
                    } else {
                        (1..4)
                            .map(|k| {
                                let (x, z) = bits_of(k);
                                (p / 4.0, mapped(x, z))
                            })
                            .collect()
                    };
                    next.push((bits, pauli_mix(&rho, &terms)));
                }
            }
        }
        next.sort_by_key(|e| e.0);
        ensemble = Vec::new();
        for (b, r) in next {
            match ensemble.last_mut() {
                Some((lb, lr)) if *lb == b => *lr += r,
                _ => ensemble.push((b, r)),
            }
        }
    }
    let mut out = vec![0.0; 1 << program.working.len()];
    for (_, rho) in &ensemble {
        for i in 0..dim {
            let o: usize = program.working.iter().enumerate().map(|(k, &q)| bit(i, q) << k).sum();
            out[o] += rho[(i, i)].re;
        }
    }
    out
}

pub fn total_variation(a: &[f64], b: &[f64]) -> f64 {
    0.5 * a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>()
}

pub fn histogram(samples: &[u32], dim: usize) -> Vec<f64> {
    let mut h = vec![0.0; dim];
    for &s in samples {
        h[s as usize] += 1.0 / samples.len() as f64;
    }
    h
}
