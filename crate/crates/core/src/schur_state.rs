//! The Schur algorithm carried out on colligation matrices, and the
//! construction of a colligation directly from Schur parameters.

use crate::colligation::UnitaryColligation;
use crate::error::{Error, Result};
use crate::hessenberg;
use crate::linalg::{self, CMatrix, C64};
use crate::rational::SchurParameterSequence;
use crate::tol;

/// Parameters, the nested colligation matrices `U^0, ..., U^n` and the
/// denominators `chi_p(z) = det(I - z D^p)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SchurStateTrace {
    pub parameters: Vec<C64>,
    pub matrices: Vec<CMatrix>,
    pub denominators: Vec<Vec<C64>>,
}

impl SchurStateTrace {
    pub fn parameter_sequence(&self) -> Result<SchurParameterSequence> {
        SchurParameterSequence::new(self.parameters.clone())
    }
}

/// Gauge so that `B = [sqrt(1 - |A|^2), 0, ..., 0]`. Returns the gauged
/// colligation and the gauge.
pub fn normalize_b_row(col: &UnitaryColligation) -> Result<(UnitaryColligation, CMatrix)> {
    let a = col.a();
    if !(a.norm() < 1.0 - tol::DISC) {
        return Err(Error::Terminal {
            step: 0,
            modulus: a.norm(),
        });
    }
    let b: Vec<C64> = col.b().iter().copied().collect();
    let v = hessenberg::normalize_first_row(&b)?;
    Ok((col.apply_state_gauge(&v)?, v))
}

fn b_row_residual(col: &UnitaryColligation) -> f64 {
    let b = col.b();
    let head = b[(0, 0)];
    let mut residual = head.im.abs().max((-head.re).max(0.0));
    for k in 1..b.ncols() {
        residual = residual.max(b[(0, k)].norm());
    }
    residual
}

/// One Schur step on a colligation whose `B` row is `[D, 0, ..., 0]`.
/// Returns `s = A` and the colligation obtained by deleting the first row
/// and the second column and rescaling the first column by `1/D`.
pub fn schur_step(col: &UnitaryColligation) -> Result<(C64, UnitaryColligation)> {
    let n = col.n();
    if n == 0 {
        return Err(Error::InvalidInput(
            "schur step needs a colligation with non-trivial state".into(),
        ));
    }
    let s = col.a();
    if !(s.norm() < 1.0 - tol::DISC) {
        return Err(Error::Terminal {
            step: 0,
            modulus: s.norm(),
        });
    }
    let residual = b_row_residual(col);
    if residual > tol::STRUCT.max(tol::UNITARY) {
        return Err(Error::NotNormalized { residual });
    }
    let m = col.matrix();
    // the stored entry equals sqrt(1 - |s|^2) up to roundoff and is the
    // better-conditioned divisor
    let delta = m[(0, 1)].re;
    let mut next = CMatrix::zeros(n, n);
    for i in 0..n {
        let c_i = m[(i + 1, 0)];
        next[(i, 0)] = c_i / delta;
        debug_assert!({
            let d_i0 = m[(i + 1, 1)];
            let subtractive = c_i * delta - d_i0 * s;
            let scale = 1.0 + (c_i / delta).norm();
            let ok = (subtractive - c_i / delta).norm() <= tol::ROUND * scale;
            ok && (s.norm() < 1e-3
                || (-d_i0 / s.conj() - c_i / delta).norm() <= tol::ROUND * scale / s.norm())
        });
        for k in 1..n {
            next[(i, k)] = m[(i + 1, k + 1)];
        }
    }
    Ok((s, UnitaryColligation::new(next)?))
}

/// Full state-space Schur algorithm. The input is reduced once to special
/// lower Hessenberg form; with `renormalize_each_step` the `B` row is
/// normalized again by a fresh gauge before every step.
///
/// An early unimodular parameter means the input was not minimal and is
/// reported as [`Error::NotMinimal`] with the partial trace.
pub fn schur_algorithm_state_space(
    col: &UnitaryColligation,
    renormalize_each_step: bool,
) -> Result<SchurStateTrace> {
    let n = col.n();
    let mut current = if n == 0 {
        col.clone()
    } else {
        let cert = hessenberg::reduce_to_special_lower_hessenberg(col.matrix())?;
        UnitaryColligation::new(cert.h)?
    };
    let mut parameters = Vec::with_capacity(n + 1);
    let mut matrices = Vec::with_capacity(n + 1);
    for step in 0..n {
        matrices.push(current.matrix().clone());
        let a = current.a();
        if !(a.norm() < 1.0 - tol::DISC) {
            let denominators = denominators_of(&matrices);
            return Err(Error::NotMinimal {
                step,
                modulus: a.norm(),
                partial: Box::new(SchurStateTrace {
                    parameters,
                    matrices,
                    denominators,
                }),
            });
        }
        if renormalize_each_step {
            current = normalize_b_row(&current)?.0;
            *matrices.last_mut().expect("pushed above") = current.matrix().clone();
        }
        let (s, next) = schur_step(&current)?;
        parameters.push(s);
        current = next;
    }
    parameters.push(current.a());
    matrices.push(current.matrix().clone());
    let denominators = denominators_of(&matrices);
    Ok(SchurStateTrace {
        parameters,
        matrices,
        denominators,
    })
}

fn denominators_of(matrices: &[CMatrix]) -> Vec<Vec<C64>> {
    matrices
        .iter()
        .map(|m| {
            let n = m.nrows() - 1;
            denominator(&m.view((1, 1), (n, n)).into_owned())
        })
        .collect()
}

/// Coefficients of `det(I - z D)` in ascending powers, from its values at the
/// `(n+1)`-th roots of unity.
pub fn denominator(d: &CMatrix) -> Vec<C64> {
    let n = d.nrows();
    let count = n + 1;
    let points: Vec<C64> = (0..count)
        .map(|k| C64::from_polar(1.0, std::f64::consts::TAU * k as f64 / count as f64))
        .collect();
    let values: Vec<C64> = points
        .iter()
        .map(|&w| linalg::det(&(linalg::identity(n) - d * w)))
        .collect();
    (0..count)
        .map(|j| {
            let sum: C64 = points
                .iter()
                .zip(&values)
                .map(|(w, v)| v * w.powu(j as u32).conj())
                .sum();
            sum / count as f64
        })
        .collect()
}

/// Denominators stored in the trace.
pub fn denominator_chain(trace: &SchurStateTrace) -> Vec<Vec<C64>> {
    denominators_of(&trace.matrices)
}

/// Entrywise closed form of the colligation with the given parameters.
pub fn closed_form_matrix(p: &SchurParameterSequence) -> CMatrix {
    let s = p.as_slice();
    let n = p.degree();
    let delta = p.deltas();
    let mut u = CMatrix::zeros(n + 1, n + 1);
    u[(0, 0)] = s[0];
    for j in 1..=n {
        // prod_{i=k}^{j-1} delta_i, built from k = j downwards
        let mut tail = 1.0;
        for k in (1..=j).rev() {
            u[(j, k)] = -s[j] * tail * s[k - 1].conj();
            tail *= delta[k - 1];
        }
        u[(j, 0)] = s[j] * tail;
    }
    for j in 0..n {
        u[(j, j + 1)] = C64::new(delta[j], 0.0);
    }
    u
}

/// `diag(I_n, s_n) G_{n-1} ... G_0` with `G_p` the elementary rotation
/// `[[s_p, D_p], [D_p, -conj(s_p)]]` in coordinates `(p, p+1)`.
pub fn product_form_matrix(p: &SchurParameterSequence) -> CMatrix {
    let s = p.as_slice();
    let n = p.degree();
    let delta = p.deltas();
    let mut u = linalg::identity(n + 1);
    u[(n, n)] = s[n];
    for k in (0..n).rev() {
        let mut g = linalg::identity(n + 1);
        let d = C64::new(delta[k], 0.0);
        g[(k, k)] = s[k];
        g[(k, k + 1)] = d;
        g[(k + 1, k)] = d;
        g[(k + 1, k + 1)] = -s[k].conj();
        u *= g;
    }
    u
}

/// Builds the colligation from the closed form and checks it against the
/// product form.
pub fn colligation_from_schur_parameters(p: &SchurParameterSequence) -> Result<UnitaryColligation> {
    let closed = closed_form_matrix(p);
    let product = product_form_matrix(p);
    let gap = linalg::max_abs_diff(&closed, &product);
    if gap > 1e-12 {
        return Err(Error::InternalInconsistency(format!(
            "closed and product forms differ by {gap:e}"
        )));
    }
    UnitaryColligation::new(closed)
}
