//! Line-oriented text dumps of circuits: one gate per line, operands first,
//! then unitary entries in row-major order as `re,im` pairs.
//!
//! ```text
//! # qvdqc-circuit v1
//! qubits 2
//! layer
//! su4 0 1 1,0 0,0 ...
//! ```

use std::fmt::Write as _;

use super::{Circuit, Gate, Layer, PhysicalCircuit, Su4Gate};
use crate::linalg::{Mat2, Mat4, C64};
use crate::topology::QubitId;
use crate::{Error, Result};

pub const CIRCUIT_HEADER: &str = "# qvdqc-circuit v1";
pub const PHYSICAL_HEADER: &str = "# qvdqc-physical v1";

fn push_entries<'a>(out: &mut String, entries: impl Iterator<Item = &'a C64>) {
    for z in entries {
        write!(out, " {},{}", z.re, z.im).unwrap();
    }
}

fn push_mat2(out: &mut String, u: &Mat2) {
    push_entries(out, u.transpose().iter());
}

fn push_mat4(out: &mut String, u: &Mat4) {
    push_entries(out, u.transpose().iter());
}

pub fn write_circuit(c: &Circuit) -> String {
    let mut out = format!("{CIRCUIT_HEADER}\nqubits {}\n", c.n_working);
    for layer in &c.layers {
        out.push_str("layer\n");
        for g in &layer.gates {
            write!(out, "su4 {} {}", g.a, g.b).unwrap();
            push_mat4(&mut out, &g.u);
            out.push('\n');
        }
    }
    out
}

fn write_gate(out: &mut String, g: &Gate) {
    match g {
        Gate::Single { q, u } => {
            write!(out, "u1 {}", q.0).unwrap();
            push_mat2(out, u);
        }
        Gate::Cnot { control, target } => write!(out, "cx {} {}", control.0, target.0).unwrap(),
        Gate::Swap { a, b } => write!(out, "swap {} {}", a.0, b.0).unwrap(),
        Gate::BellPrep { a, b } => write!(out, "bell {} {}", a.0, b.0).unwrap(),
        Gate::MeasureZ { q, bit } => write!(out, "mz {} {}", q.0, bit).unwrap(),
        Gate::MeasureX { q, bit } => write!(out, "mx {} {}", q.0, bit).unwrap(),
        Gate::Controlled { q, u, bit } => {
            write!(out, "cu1 {} {}", q.0, bit).unwrap();
            push_mat2(out, u);
        }
    }
    out.push('\n');
}

pub fn write_physical(pc: &PhysicalCircuit) -> String {
    let mut out = format!("{PHYSICAL_HEADER}\nqubits {}\nbits {}\n", pc.n_qubits, pc.n_bits);
    for g in pc.gates() {
        write_gate(&mut out, g);
    }
    out
}

struct Cursor<'a> {
    line: usize,
    words: std::str::SplitWhitespace<'a>,
}

impl Cursor<'_> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            line: self.line,
            msg: msg.into(),
        })
    }

    fn usize(&mut self) -> Result<usize> {
        match self.words.next().map(str::parse::<usize>) {
            Some(Ok(v)) => Ok(v),
            _ => self.err("expected an unsigned integer"),
        }
    }

    fn complex(&mut self) -> Result<C64> {
        let Some(word) = self.words.next() else {
            return self.err("missing matrix entry");
        };
        let parsed = word
            .split_once(',')
            .and_then(|(re, im)| Some(C64::new(re.parse().ok()?, im.parse().ok()?)));
        match parsed {
            Some(z) => Ok(z),
            None => self.err(format!("bad complex entry {word:?}")),
        }
    }

    fn entries(&mut self, n: usize) -> Result<Vec<C64>> {
        (0..n).map(|_| self.complex()).collect()
    }

    fn finish(&mut self) -> Result<()> {
        match self.words.next() {
            None => Ok(()),
            Some(w) => self.err(format!("unexpected trailing token {w:?}")),
        }
    }
}

fn lines(text: &str) -> impl Iterator<Item = (usize, &str, Cursor<'_>)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.trim();
        if l.is_empty() || l.starts_with('#') {
            return None;
        }
        let mut words = l.split_whitespace();
        let kind = words.next()?;
        Some((i + 1, kind, Cursor { line: i + 1, words }))
    })
}

pub fn parse_circuit(text: &str) -> Result<Circuit> {
    let mut n = None;
    let mut layers: Vec<Layer> = Vec::new();
    for (line, kind, mut cur) in lines(text) {
        match kind {
            "qubits" => n = Some(cur.usize()?),
            "layer" => layers.push(Layer::default()),
            "su4" => {
                let a = cur.usize()?;
                let b = cur.usize()?;
                let e = cur.entries(16)?;
                let Some(layer) = layers.last_mut() else {
                    return cur.err("gate before the first layer");
                };
                layer.gates.push(Su4Gate {
                    a,
                    b,
                    u: Mat4::from_row_slice(&e),
                });
            }
            other => {
                return Err(Error::Parse {
                    line,
                    msg: format!("unknown line kind {other:?}"),
                })
            }
        }
        cur.finish()?;
    }
    let Some(n_working) = n else {
        return Err(Error::Parse {
            line: 0,
            msg: "missing qubits line".into(),
        });
    };
    let c = Circuit { n_working, layers };
    c.validate()?;
    Ok(c)
}

/// Parses a physical dump back into its flat gate list.
pub fn parse_gates(text: &str) -> Result<Vec<Gate>> {
    let mut gates = Vec::new();
    for (line, kind, mut cur) in lines(text) {
        let q = |cur: &mut Cursor| cur.usize().map(QubitId);
        let g = match kind {
            "qubits" | "bits" => {
                cur.usize()?;
                None
            }
            "u1" => {
                let q = q(&mut cur)?;
                Some(Gate::Single {
                    q,
                    u: Mat2::from_row_slice(&cur.entries(4)?),
                })
            }
            "cx" => Some(Gate::Cnot {
                control: q(&mut cur)?,
                target: q(&mut cur)?,
            }),
            "swap" => Some(Gate::Swap {
                a: q(&mut cur)?,
                b: q(&mut cur)?,
            }),
            "bell" => Some(Gate::BellPrep {
                a: q(&mut cur)?,
                b: q(&mut cur)?,
            }),
            "mz" => Some(Gate::MeasureZ {
                q: q(&mut cur)?,
                bit: cur.usize()?,
            }),
            "mx" => Some(Gate::MeasureX {
                q: q(&mut cur)?,
                bit: cur.usize()?,
            }),
            "cu1" => {
                let q = q(&mut cur)?;
                let bit = cur.usize()?;
                Some(Gate::Controlled {
                    q,
                    u: Mat2::from_row_slice(&cur.entries(4)?),
                    bit,
                })
            }
            other => {
                return Err(Error::Parse {
                    line,
                    msg: format!("unknown gate {other:?}"),
                })
            }
        };
        cur.finish()?;
        gates.extend(g);
    }
    Ok(gates)
}
