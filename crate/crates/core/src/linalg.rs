//! Small dense complex matrices used by the gate library and the compiler.
//!
//! Two-qubit matrices act on `(a, b)` with `a` as the more significant
//! tensor factor: basis index `2·bit(a) + bit(b)`.

use nalgebra::{Matrix2, Matrix4};
use num_complex::Complex64;

pub type C64 = Complex64;
pub type Mat2 = Matrix2<C64>;
pub type Mat4 = Matrix4<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn pauli_x() -> Mat2 {
    Mat2::new(ZERO, ONE, ONE, ZERO)
}

pub fn pauli_y() -> Mat2 {
    Mat2::new(ZERO, -I, I, ZERO)
}

pub fn pauli_z() -> Mat2 {
    Mat2::new(ONE, ZERO, ZERO, -ONE)
}

pub fn hadamard() -> Mat2 {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    Mat2::new(c(h, 0.0), c(h, 0.0), c(h, 0.0), c(-h, 0.0))
}

/// Pauli by index: 0 = I, 1 = X, 2 = Y, 3 = Z.
pub fn pauli(k: usize) -> Mat2 {
    match k {
        0 => Mat2::identity(),
        1 => pauli_x(),
        2 => pauli_y(),
        3 => pauli_z(),
        _ => panic!("pauli index {k} out of range"),
    }
}

pub fn rz(theta: f64) -> Mat2 {
    let h = theta / 2.0;
    Mat2::new(C64::from_polar(1.0, -h), ZERO, ZERO, C64::from_polar(1.0, h))
}

pub fn ry(theta: f64) -> Mat2 {
    let (s, co) = (theta / 2.0).sin_cos();
    Mat2::new(c(co, 0.0), c(-s, 0.0), c(s, 0.0), c(co, 0.0))
}

pub fn kron(a: &Mat2, b: &Mat2) -> Mat4 {
    Mat4::from_fn(|i, j| a[(i >> 1, j >> 1)] * b[(i & 1, j & 1)])
}

/// CNOT with the control on the more significant factor.
pub fn cnot_high_control() -> Mat4 {
    let mut m = Mat4::zeros();
    m[(0, 0)] = ONE;
    m[(1, 1)] = ONE;
    m[(2, 3)] = ONE;
    m[(3, 2)] = ONE;
    m
}

/// CNOT with the control on the less significant factor.
pub fn cnot_low_control() -> Mat4 {
    let mut m = Mat4::zeros();
    m[(0, 0)] = ONE;
    m[(3, 1)] = ONE;
    m[(2, 2)] = ONE;
    m[(1, 3)] = ONE;
    m
}

pub fn swap4() -> Mat4 {
    let mut m = Mat4::zeros();
    m[(0, 0)] = ONE;
    m[(1, 2)] = ONE;
    m[(2, 1)] = ONE;
    m[(3, 3)] = ONE;
    m
}

/// Largest entry magnitude of `U†U − I`.
pub fn unitarity_error2(u: &Mat2) -> f64 {
    (u.adjoint() * u - Mat2::identity())
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

pub fn unitarity_error4(u: &Mat4) -> f64 {
    (u.adjoint() * u - Mat4::identity())
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

/// Max-entry distance between `a` and `b` after removing the best global phase.
pub fn phase_distance4(a: &Mat4, b: &Mat4) -> f64 {
    let overlap = (a.adjoint() * b).trace();
    let phase = if overlap.norm() > 1e-300 {
        overlap / overlap.norm()
    } else {
        ONE
    };
    (a * phase - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn phase_distance2(a: &Mat2, b: &Mat2) -> f64 {
    let overlap = (a.adjoint() * b).trace();
    let phase = if overlap.norm() > 1e-300 {
        overlap / overlap.norm()
    } else {
        ONE
    };
    (a * phase - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cnot_orientations() {
        let swap = swap4();
        assert!(phase_distance4(&(swap * cnot_high_control() * swap), &cnot_low_control()) < 1e-15);
        let hh = kron(&hadamard(), &hadamard());
        assert!(phase_distance4(&(hh * cnot_high_control() * hh), &cnot_low_control()) < 1e-14);
    }

    #[test]
    fn rotations_are_unitary() {
        for t in [0.0, 0.3, -2.0, 7.5] {
            assert!(unitarity_error2(&rz(t)) < 1e-15);
            assert!(unitarity_error2(&ry(t)) < 1e-15);
        }
        assert!(unitarity_error4(&kron(&pauli_y(), &hadamard())) < 1e-15);
    }

    #[test]
    fn kron_ordering() {
        let x1 = kron(&pauli_x(), &Mat2::identity());
        // X on the high factor maps |00> to |10> = index 2
        assert_eq!(x1[(2, 0)], ONE);
    }
}
