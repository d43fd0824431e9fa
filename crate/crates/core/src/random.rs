//! Random test objects: Haar unitaries, parameter sequences and Blaschke
//! products with separated zeros.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::colligation::UnitaryColligation;
use crate::error::Result;
use crate::linalg::{CMatrix, C64};
use crate::rational::{BlaschkeProduct, SchurParameterSequence};

pub fn unimodular<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU))
}

/// Uniform point of the disc of radius `radius`.
pub fn disc_point<R: Rng + ?Sized>(rng: &mut R, radius: f64) -> C64 {
    let r = radius * rng.random::<f64>().sqrt();
    C64::from_polar(r, rng.random_range(0.0..std::f64::consts::TAU))
}

/// Haar-distributed `n x n` unitary: QR of a complex Gaussian matrix with
/// the phases of `diag(R)` moved into `Q`.
pub fn haar_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMatrix {
    let g = CMatrix::from_fn(n, n, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re, im) / std::f64::consts::SQRT_2
    });
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for k in 0..n {
        let d = r[(k, k)];
        if d.norm() > 0.0 {
            let phase = d / d.norm();
            let mut col = q.column_mut(k);
            col *= phase;
        }
    }
    q
}

/// Colligation with a Haar-distributed `(n+1) x (n+1)` matrix; minimal with
/// probability one.
pub fn colligation<R: Rng + ?Sized>(rng: &mut R, n: usize) -> UnitaryColligation {
    UnitaryColligation::new(haar_unitary(rng, n + 1)).expect("Haar sample is unitary")
}

/// `n` parameters uniform in the disc of radius `max_modulus` followed by a
/// unimodular terminal value.
pub fn schur_parameters<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    max_modulus: f64,
) -> SchurParameterSequence {
    let mut params: Vec<C64> = (0..n).map(|_| disc_point(rng, max_modulus)).collect();
    params.push(unimodular(rng));
    SchurParameterSequence::new(params).expect("sampled parameters are valid")
}

/// Blaschke product of degree `n` with zeros in `|z| <= max_modulus` and
/// pairwise distance at least `min_separation` (rejection sampling).
pub fn blaschke<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    max_modulus: f64,
    min_separation: f64,
) -> Result<BlaschkeProduct> {
    let mut zeros: Vec<C64> = Vec::with_capacity(n);
    while zeros.len() < n {
        let z = disc_point(rng, max_modulus);
        if zeros.iter().all(|w| (w - z).norm() >= min_separation) {
            zeros.push(z);
        }
    }
    BlaschkeProduct::new(unimodular(rng), zeros)
}
