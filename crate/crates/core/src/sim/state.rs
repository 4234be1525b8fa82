use rand::Rng;

use crate::linalg::{Mat2, Mat4, C64};

/// Little-endian statevector: bit `i` of an index is qubit `i`.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<C64>,
}

/// Inserts a zero bit at position `pos` of `x`.
#[inline]
fn insert_zero(x: usize, pos: usize) -> usize {
    let low = x & ((1 << pos) - 1);
    ((x >> pos) << (pos + 1)) | low
}

impl StateVector {
    pub fn zero(n: usize) -> Self {
        let mut amps = vec![C64::new(0.0, 0.0); 1 << n];
        amps[0] = C64::new(1.0, 0.0);
        Self { n, amps }
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn from_amplitudes(amps: Vec<C64>) -> Self {
        let n = amps.len().trailing_zeros() as usize;
        assert_eq!(1 << n, amps.len(), "length must be a power of two");
        Self { n, amps }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|z| z.norm_sqr()).collect()
    }

    pub fn apply_1q(&mut self, q: usize, u: &Mat2) {
        let m = 1 << q;
        let (u00, u01, u10, u11) = (u[(0, 0)], u[(0, 1)], u[(1, 0)], u[(1, 1)]);
        for k in 0..self.amps.len() / 2 {
            let i0 = insert_zero(k, q);
            let i1 = i0 | m;
            let (a0, a1) = (self.amps[i0], self.amps[i1]);
            self.amps[i0] = u00 * a0 + u01 * a1;
            self.amps[i1] = u10 * a0 + u11 * a1;
        }
    }

    /// Applies `u` to `(qa, qb)` with `qa` as the more significant factor.
    pub fn apply_2q(&mut self, qa: usize, qb: usize, u: &Mat4) {
        let (ma, mb) = (1 << qa, 1 << qb);
        let (lo, hi) = if qa < qb { (qa, qb) } else { (qb, qa) };
        for k in 0..self.amps.len() / 4 {
            let base = insert_zero(insert_zero(k, lo), hi);
            let idx = [base, base | mb, base | ma, base | ma | mb];
            let v = idx.map(|i| self.amps[i]);
            for r in 0..4 {
                self.amps[idx[r]] = u[(r, 0)] * v[0] + u[(r, 1)] * v[1] + u[(r, 2)] * v[2] + u[(r, 3)] * v[3];
            }
        }
    }

    pub fn cnot(&mut self, control: usize, target: usize) {
        let (mc, mt) = (1 << control, 1 << target);
        for i in 0..self.amps.len() {
            if i & mc != 0 && i & mt == 0 {
                self.amps.swap(i, i | mt);
            }
        }
    }

    pub fn swap(&mut self, a: usize, b: usize) {
        let (ma, mb) = (1 << a, 1 << b);
        for i in 0..self.amps.len() {
            if i & ma != 0 && i & mb == 0 {
                self.amps.swap(i, (i & !ma) | mb);
            }
        }
    }

    /// Pauli `k` (0 = I, 1 = X, 2 = Y, 3 = Z) on qubit `q`.
    pub fn pauli(&mut self, q: usize, k: usize) {
        let m = 1 << q;
        match k {
            0 => {}
            1 => {
                for i in 0..self.amps.len() {
                    if i & m == 0 {
                        self.amps.swap(i, i | m);
                    }
                }
            }
            2 => {
                let i_unit = C64::new(0.0, 1.0);
                for i in 0..self.amps.len() {
                    if i & m == 0 {
                        let (a0, a1) = (self.amps[i], self.amps[i | m]);
                        self.amps[i] = -i_unit * a1;
                        self.amps[i | m] = i_unit * a0;
                    }
                }
            }
            3 => {
                for i in 0..self.amps.len() {
                    if i & m != 0 {
                        self.amps[i] = -self.amps[i];
                    }
                }
            }
            _ => panic!("pauli index {k} out of range"),
        }
    }

    pub fn prob_one(&self, q: usize) -> f64 {
        let m = 1 << q;
        self.amps
            .iter()
            .enumerate()
            .filter(|(i, _)| i & m != 0)
            .map(|(_, z)| z.norm_sqr())
            .sum()
    }

    /// Projective Z measurement; collapses and renormalizes.
    pub fn measure_z<R: Rng + ?Sized>(&mut self, q: usize, rng: &mut R) -> bool {
        let p1 = self.prob_one(q);
        let outcome = if p1 <= 0.0 {
            false
        } else if p1 >= 1.0 {
            true
        } else {
            rng.random::<f64>() < p1
        };
        let keep = if outcome { p1 } else { 1.0 - p1 };
        let scale = 1.0 / keep.sqrt();
        let m = 1 << q;
        for (i, z) in self.amps.iter_mut().enumerate() {
            if (i & m != 0) == outcome {
                *z *= scale;
            } else {
                *z = C64::new(0.0, 0.0);
            }
        }
        outcome
    }

    pub fn reset<R: Rng + ?Sized>(&mut self, q: usize, rng: &mut R) {
        if self.measure_z(q, rng) {
            self.pauli(q, 1);
        }
    }

    /// Probabilities of the bits selected by `map`, where `map[i]` is the
    /// output index of full index `i`.
    pub fn marginal(&self, map: &[u32], out_dim: usize) -> Vec<f64> {
        let mut out = vec![0.0; out_dim];
        for (z, &o) in self.amps.iter().zip(map) {
            out[o as usize] += z.norm_sqr();
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{cnot_high_control, hadamard, kron, pauli_y, swap4};
    use crate::seed;

    fn random_state(n: usize, s: u64) -> StateVector {
        let mut rng = seed::rng(s, &[]);
        let amps: Vec<C64> = (0..1 << n)
            .map(|_| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
            .collect();
        let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        StateVector::from_amplitudes(amps.into_iter().map(|z| z / norm).collect())
    }

    fn close(a: &StateVector, b: &StateVector) -> bool {
        a.amps.iter().zip(&b.amps).all(|(x, y)| (x - y).norm() < 1e-12)
    }

    #[test]
    fn specialised_kernels_match_the_dense_ones() {
        let s = random_state(4, 1);
        for (a, b) in [(0, 1), (2, 0), (3, 1)] {
            let mut x = s.clone();
            x.cnot(a, b);
            let mut y = s.clone();
            y.apply_2q(a, b, &cnot_high_control());
            assert!(close(&x, &y));
            let mut x = s.clone();
            x.swap(a, b);
            let mut y = s.clone();
            y.apply_2q(a, b, &swap4());
            assert!(close(&x, &y));
        }
        let mut x = s.clone();
        x.pauli(2, 2);
        let mut y = s.clone();
        y.apply_1q(2, &pauli_y());
        assert!(close(&x, &y));
    }

    #[test]
    fn two_qubit_ordering() {
        // H on the significant factor of (q2, q0) acts on qubit 2
        let mut x = StateVector::zero(3);
        x.apply_2q(2, 0, &kron(&hadamard(), &Mat2::identity()));
        let p = x.probabilities();
        assert!((p[0] - 0.5).abs() < 1e-15 && (p[4] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn measurement_collapses() {
        let mut rng = seed::rng(3, &[]);
        let mut s = StateVector::zero(2);
        s.apply_1q(0, &hadamard());
        s.cnot(0, 1);
        let m = s.measure_z(0, &mut rng);
        assert_eq!(s.measure_z(1, &mut rng), m);
        assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
        s.reset(0, &mut rng);
        assert_eq!(s.prob_one(0), 0.0);
    }
}
