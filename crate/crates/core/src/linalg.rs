//! Small dense complex helpers on top of `nalgebra`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tol;

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

/// Largest entry modulus, `0` for an empty matrix.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, x| acc.max(x.norm()))
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    if a.shape() != b.shape() {
        return f64::INFINITY;
    }
    a.iter()
        .zip(b.iter())
        .fold(0.0, |acc, (x, y)| acc.max((x - y).norm()))
}

/// `max(|M*M - I|_max, |MM* - I|_max)`; infinite for non-square input.
pub fn unitarity_residual(m: &CMatrix) -> f64 {
    if !m.is_square() {
        return f64::INFINITY;
    }
    let n = m.nrows();
    let id = identity(n);
    let left = m.adjoint() * m;
    let right = m * m.adjoint();
    max_abs_diff(&left, &id).max(max_abs_diff(&right, &id))
}

/// `diag(1, V)` for an `n x n` block `V`.
pub fn embed_state(v: &CMatrix) -> CMatrix {
    embed_lower_right(v, 1)
}

/// `diag(I_offset, V)`.
pub fn embed_lower_right(v: &CMatrix, offset: usize) -> CMatrix {
    let n = v.nrows() + offset;
    let mut out = identity(n);
    out.view_mut((offset, offset), (v.nrows(), v.ncols()))
        .copy_from(v);
    out
}

/// Conjugates `m` by the state gauge: `diag(1, V*) M diag(1, V)`.
pub fn state_conjugate(m: &CMatrix, v: &CMatrix) -> CMatrix {
    let w = embed_state(v);
    w.adjoint() * m * w
}

/// Solves `a x = b` by LU with partial pivoting. Fails with `NearPole` when a
/// pivot falls below `tol::POLE` relative to the largest entry of `a`.
pub fn solve(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    if a.nrows() == 0 {
        return Ok(b.clone());
    }
    let lu = a.clone().lu();
    let pivot = lu
        .u()
        .diagonal()
        .iter()
        .fold(f64::INFINITY, |acc, x| acc.min(x.norm()));
    let scale = max_abs(a).max(1.0);
    if !(pivot > tol::POLE * scale) {
        return Err(Error::NearPole { modulus: pivot });
    }
    lu.solve(b).ok_or(Error::NearPole { modulus: pivot })
}

/// Determinant via LU.
pub fn det(a: &CMatrix) -> C64 {
    if a.nrows() == 0 {
        return ONE;
    }
    a.clone().lu().determinant()
}

/// Singular values in non-increasing order.
pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let svd = m.clone().svd(false, false);
    let mut sv: Vec<f64> = svd.singular_values.iter().copied().collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    sv
}

/// Numerical rank of a matrix with `n` rows under [`tol::rank_threshold`].
pub fn rank_from_singular_values(sv: &[f64], n: usize) -> usize {
    let sigma_max = sv.first().copied().unwrap_or(0.0);
    if sigma_max == 0.0 {
        return 0;
    }
    let threshold = tol::rank_threshold(n, sigma_max);
    sv.iter().filter(|&&s| s > threshold).count()
}

/// Unitary polar factor `W V*` of `m = W Sigma V*`.
pub fn polar_unitary(m: &CMatrix) -> CMatrix {
    if m.nrows() == 0 {
        return m.clone();
    }
    let svd = m.clone().svd(true, true);
    let u = svd.u.expect("left singular vectors requested");
    let v_t = svd.v_t.expect("right singular vectors requested");
    u * v_t
}

/// Hermitian inner product `y* x` of two column vectors.
pub fn inner(x: &CVector, y: &CVector) -> C64 {
    y.iter().zip(x.iter()).map(|(a, b)| a.conj() * b).sum()
}

pub fn row_vector(values: &[C64]) -> CMatrix {
    CMatrix::from_row_slice(1, values.len(), values)
}

pub fn column_vector(values: &[C64]) -> CMatrix {
    CMatrix::from_column_slice(values.len(), 1, values)
}
