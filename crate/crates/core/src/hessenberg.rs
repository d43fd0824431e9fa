//! Row matching by complex reflectors and reduction of a square matrix to
//! special lower (or upper) Hessenberg form by a state gauge `diag(1, V)`.

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, C64, ONE, ZERO};
use crate::tol;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    Lower,
    Upper,
}

impl Orientation {
    pub fn as_str(self) -> &'static str {
        match self {
            Orientation::Lower => "lower",
            Orientation::Upper => "upper",
        }
    }
}

/// Which reflector normalizes a row segment during the reduction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReflectorBranch {
    /// `V = lambda (I - 2 w w^* / |w|^2)` with `lambda B1 B2^* >= 0`.
    #[default]
    Phase,
    /// LAPACK-style Householder with the sign chosen away from cancellation,
    /// followed by a diagonal phase fix.
    Householder,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HessenbergCertificate {
    pub h: CMatrix,
    pub v: CMatrix,
    pub orientation: Orientation,
    /// Superdiagonal (lower) or subdiagonal (upper) entries, all real.
    pub band: Vec<f64>,
    /// `|diag(1,V*) M diag(1,V) - H|_max`
    pub reproduction_residual: f64,
}

impl HessenbergCertificate {
    /// Largest modulus outside the band, relative to `max |H|`.
    pub fn structural_residual(&self) -> f64 {
        let scale = linalg::max_abs(&self.h).max(f64::MIN_POSITIVE);
        let mut worst: f64 = 0.0;
        for j in 0..self.h.nrows() {
            for k in 0..self.h.ncols() {
                let outside = match self.orientation {
                    Orientation::Lower => k > j + 1,
                    Orientation::Upper => j > k + 1,
                };
                if outside {
                    worst = worst.max(self.h[(j, k)].norm());
                }
            }
        }
        worst / scale
    }
}

/// Unitary `V` with `B1 V = B2` for rows of equal norm.
pub fn match_rows(b1: &[C64], b2: &[C64]) -> Result<CMatrix> {
    if b1.len() != b2.len() {
        return Err(Error::DimensionMismatch {
            expected: b1.len(),
            found: b2.len(),
        });
    }
    let n1 = norm(b1);
    let n2 = norm(b2);
    if n1 == 0.0 || n2 == 0.0 {
        return Err(Error::ZeroVector);
    }
    if (n1 - n2).abs() > tol::NORM * n1.max(1.0) {
        return Err(Error::NormMismatch {
            left: n1,
            right: n2,
        });
    }
    let n = b1.len();
    let p: C64 = b1.iter().zip(b2).map(|(x, y)| x * y.conj()).sum();
    let lambda = if p.norm() == 0.0 {
        ONE
    } else {
        p.conj() / p.norm()
    };
    // w_j = conj(b1_j) - lambda conj(b2_j); V = lambda (I - 2 w w^* / |w|^2)
    let w: Vec<C64> = b1
        .iter()
        .zip(b2)
        .map(|(x, y)| x.conj() - lambda * y.conj())
        .collect();
    let w_sq: f64 = w.iter().map(|x| x.norm_sqr()).sum();
    let mut v = CMatrix::identity(n, n) * lambda;
    if w_sq <= (tol::STRUCT * n1).powi(2) {
        return Ok(v);
    }
    for j in 0..n {
        for k in 0..n {
            v[(j, k)] -= lambda * w[j] * w[k].conj() * (2.0 / w_sq);
        }
    }
    Ok(v)
}

/// Unitary `V` with `B V = [|B|, 0, ..., 0]`.
pub fn normalize_first_row(b: &[C64]) -> Result<CMatrix> {
    normalize_first_row_with(b, ReflectorBranch::Phase)
}

pub fn normalize_first_row_with(b: &[C64], branch: ReflectorBranch) -> Result<CMatrix> {
    let r = norm(b);
    if r == 0.0 {
        return Err(Error::ZeroVector);
    }
    match branch {
        ReflectorBranch::Phase => {
            let mut target = vec![ZERO; b.len()];
            target[0] = C64::new(r, 0.0);
            match_rows(b, &target)
        }
        ReflectorBranch::Householder => Ok(householder_row(b, r)),
    }
}

// V^T x = |x| e_1 for x = b^T: P x = alpha e_1 with the Hermitian reflector P,
// then a phase on the first coordinate turns alpha into |alpha|.
fn householder_row(b: &[C64], r: f64) -> CMatrix {
    let n = b.len();
    let phase = if b[0].norm() == 0.0 {
        ONE
    } else {
        b[0] / b[0].norm()
    };
    let alpha = -phase * r;
    let mut u: Vec<C64> = b.to_vec();
    u[0] -= alpha;
    let u_sq: f64 = u.iter().map(|x| x.norm_sqr()).sum();
    let mut p = CMatrix::identity(n, n);
    if u_sq > 0.0 {
        for j in 0..n {
            for k in 0..n {
                p[(j, k)] -= u[j] * u[k].conj() * (2.0 / u_sq);
            }
        }
    }
    let fix = alpha.conj() / alpha.norm();
    let mut vt = p;
    for k in 0..n {
        vt[(0, k)] *= fix;
    }
    vt.transpose()
}

pub fn reduce_to_special_lower_hessenberg(m: &CMatrix) -> Result<HessenbergCertificate> {
    reduce_lower_with(m, ReflectorBranch::Phase)
}

/// Lower reduction with an explicit reflector branch. Both branches yield the
/// same `H` on inputs with non-vanishing superdiagonal.
pub fn reduce_lower_with(m: &CMatrix, branch: ReflectorBranch) -> Result<HessenbergCertificate> {
    if !m.is_square() || m.nrows() < 2 {
        return Err(Error::InvalidInput(format!(
            "reduction needs a square matrix of size at least 2, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    let n = m.nrows() - 1;
    let scale = linalg::max_abs(m);
    let mut h = m.clone();
    let mut v_total = linalg::identity(n);
    let mut band = Vec::with_capacity(n);
    for l in 0..n {
        let segment: Vec<C64> = (l + 1..=n).map(|k| h[(l, k)]).collect();
        let r = norm(&segment);
        if r > tol::STRUCT * scale {
            let w = normalize_first_row_with(&segment, branch)?;
            let step = linalg::embed_lower_right(&w, l + 1);
            h = step.adjoint() * h * &step;
            v_total *= linalg::embed_lower_right(&w, l);
        }
        let r_entry = if r > tol::STRUCT * scale { r } else { 0.0 };
        h[(l, l + 1)] = C64::new(r_entry, 0.0);
        for k in l + 2..=n {
            h[(l, k)] = ZERO;
        }
        band.push(r_entry);
    }
    let reproduced = linalg::state_conjugate(m, &v_total);
    let reproduction_residual = linalg::max_abs_diff(&reproduced, &h);
    Ok(HessenbergCertificate {
        h,
        v: v_total,
        orientation: Orientation::Lower,
        band,
        reproduction_residual,
    })
}

/// Reduces `M*` to special lower form with gauge `V`; the same gauge makes
/// `M` special upper Hessenberg.
pub fn reduce_to_special_upper_hessenberg(m: &CMatrix) -> Result<HessenbergCertificate> {
    let lower = reduce_to_special_lower_hessenberg(&m.adjoint())?;
    let h = lower.h.adjoint();
    let reproduced = linalg::state_conjugate(m, &lower.v);
    let reproduction_residual = linalg::max_abs_diff(&reproduced, &h);
    Ok(HessenbergCertificate {
        h,
        v: lower.v,
        orientation: Orientation::Upper,
        band: lower.band,
        reproduction_residual,
    })
}

pub fn reduce(m: &CMatrix, orientation: Orientation) -> Result<HessenbergCertificate> {
    match orientation {
        Orientation::Lower => reduce_to_special_lower_hessenberg(m),
        Orientation::Upper => reduce_to_special_upper_hessenberg(m),
    }
}

/// Zero above the superdiagonal and a real non-negative superdiagonal, with
/// `tol` relative to `max |M|`.
pub fn is_special_lower_hessenberg(m: &CMatrix, tol: f64) -> bool {
    if !m.is_square() {
        return false;
    }
    let eps = tol * linalg::max_abs(m);
    let n = m.nrows();
    for j in 0..n {
        for k in j + 2..n {
            if m[(j, k)].norm() > eps {
                return false;
            }
        }
        if j + 1 < n {
            let x = m[(j, j + 1)];
            if x.im.abs() > eps || x.re < -eps {
                return false;
            }
        }
    }
    true
}

/// Special lower Hessenberg with every superdiagonal entry above `tol`
/// (relative to `max |M|`).
pub fn is_hl_nonsingular(m: &CMatrix, tol: f64) -> bool {
    if !is_special_lower_hessenberg(m, tol) {
        return false;
    }
    let eps = tol * linalg::max_abs(m);
    (0..m.nrows().saturating_sub(1)).all(|j| m[(j, j + 1)].re > eps)
}

/// Minimality of a unitary colligation matrix read off the superdiagonal of
/// its special lower Hessenberg form.
pub fn hessenberg_minimality(u: &CMatrix) -> Result<bool> {
    if !u.is_square() || u.nrows() == 0 {
        return Err(Error::InvalidInput("matrix must be square".into()));
    }
    let residual = linalg::unitarity_residual(u);
    if !(residual <= tol::UNITARY) {
        return Err(Error::NotUnitary { residual });
    }
    if u.nrows() == 1 {
        return Ok(true);
    }
    let n = u.nrows() - 1;
    let cert = reduce_to_special_lower_hessenberg(u)?;
    let threshold = tol::rank_threshold(n, 1.0);
    Ok(cert.band.iter().all(|&x| x > threshold))
}

fn norm(v: &[C64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}
