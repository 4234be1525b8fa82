use nalgebra::Complex;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::linalg::{Mat4, C64};

/// Haar-random element of SU(4): QR of a complex Ginibre matrix with the
/// phases of R's diagonal pushed into Q, then scaled to unit determinant.
pub fn sample_su4<R: Rng + ?Sized>(rng: &mut R) -> Mat4 {
    let g = Mat4::from_fn(|_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re, im)
    });
    let qr = g.qr();
    let (mut q, r) = qr.unpack();
    for j in 0..4 {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            Complex::new(1.0, 0.0)
        };
        for i in 0..4 {
            q[(i, j)] *= phase;
        }
    }
    let det = q.determinant();
    q / det.powf(0.25)
}
